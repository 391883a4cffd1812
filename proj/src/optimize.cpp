#include "rsineq/optimize.hpp"

#include "rsineq/error.hpp"
#include "rsineq/parallel.hpp"
#include "rsineq/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace rsineq {

namespace {

std::size_t angles_per_direction(SettingsMode mode) { return mode == SettingsMode::Coplanar ? 1 : 2; }

BlochVector direction_at(SettingsMode mode, const std::vector<double>& p, std::size_t offset) {
    return mode == SettingsMode::Coplanar ? BlochVector::coplanar(p[offset]) : BlochVector::spherical(p[offset], p[offset + 1]);
}

}  // namespace

std::size_t SettingsParametrization::parameter_count() const {
    const std::size_t k = angles_per_direction(mode);
    std::size_t n = variables.size() * k;
    if (family == StateFamily::ProductShared) n += k;
    if (family == StateFamily::ProductIndependent) n += 2 * k;
    return n;
}

Settings SettingsParametrization::settings(const std::vector<double>& params) const {
    if (params.size() != parameter_count()) throw Error(ErrorCode::DimensionMismatch, "parameter count mismatch");
    const std::size_t k = angles_per_direction(mode);
    Settings out;
    for (std::size_t i = 0; i < variables.size(); ++i) out.insert_or_assign(variables[i], direction_at(mode, params, i * k));
    return out;
}

DensityMatrix SettingsParametrization::state(const std::vector<double>& params) const {
    const std::size_t k = angles_per_direction(mode);
    const std::size_t base = variables.size() * k;
    switch (family) {
        case StateFamily::Fixed:
            if (!fixed_state) throw Error(ErrorCode::InvalidArgument, "fixed state family without a state");
            return *fixed_state;
        case StateFamily::AlignedWith: {
            if (!aligned_variable) throw Error(ErrorCode::InvalidArgument, "aligned family without a variable");
            const auto s = settings(params);
            auto it = s.find(*aligned_variable);
            if (it == s.end()) throw Error(ErrorCode::MissingSetting, "no setting for " + aligned_variable->str());
            return DensityMatrix::product(it->second, it->second);
        }
        case StateFamily::ProductShared: {
            const BlochVector n = direction_at(mode, params, base);
            return DensityMatrix::product(n, n);
        }
        case StateFamily::ProductIndependent:
            return DensityMatrix::product(direction_at(mode, params, base), direction_at(mode, params, base + k));
    }
    throw Error(ErrorCode::InvalidArgument, "unknown state family");
}

OptimizationResult maximize_violation(const CorrelationInequality& ineq, const TermAssignment& assignment,
                                      const SettingsParametrization& parametrization, const OptimizeOptions& options) {
    const std::size_t dims = parametrization.parameter_count();
    if (dims == 0) throw Error(ErrorCode::InvalidArgument, "nothing to optimize");
    if (options.grid < 2 || options.starts == 0) throw Error(ErrorCode::InvalidArgument, "grid >= 2 and starts >= 1 required");
    const double sign = ineq.direction == Comparator::LessEq ? 1.0 : -1.0;
    auto objective = [&](const std::vector<double>& p) {
        return sign * evaluate_inequality_quantum(ineq, parametrization.state(p), parametrization.settings(p), assignment);
    };

    // Grid so that the scan uses at most half the budget.
    std::size_t g = options.grid;
    auto grid_size = [dims](std::size_t per) {
        double total = 1.0;
        for (std::size_t i = 0; i < dims; ++i) total *= static_cast<double>(per);
        return total;
    };
    while (g > 2 && grid_size(g) > static_cast<double>(options.budget) / 2.0) --g;
    const auto points = static_cast<std::size_t>(grid_size(g));
    const double spacing = 2.0 * std::numbers::pi / static_cast<double>(g);
    std::vector<double> origin(dims, -std::numbers::pi);
    if (options.seed) {
        for (std::size_t d = 0; d < dims; ++d) origin[d] += spacing * counter_uniform(*options.seed, 0, d);
    }
    auto grid_point = [&](std::size_t idx) {
        std::vector<double> p(dims);
        for (std::size_t d = dims; d-- > 0;) {
            p[d] = origin[d] + spacing * static_cast<double>(idx % g);
            idx /= g;
        }
        return p;
    };

    std::vector<double> values(points);
    constexpr std::size_t kBlock = 4096;
    parallel_for((points + kBlock - 1) / kBlock, [&](std::size_t b) {
        for (std::size_t i = b * kBlock; i < std::min(points, (b + 1) * kBlock); ++i) values[i] = objective(grid_point(i));
    });
    std::vector<std::size_t> order(points);
    for (std::size_t i = 0; i < points; ++i) order[i] = i;
    const std::size_t starts = std::min(options.starts, points);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(starts), order.end(),
                      [&](std::size_t a, std::size_t b) { return values[a] > values[b] || (values[a] == values[b] && a < b); });

    OptimizationResult result;
    result.grid_points_per_angle = g;
    result.evaluations = points;
    std::vector<double> best = grid_point(order[0]);
    double best_value = values[order[0]];
    bool exhausted = false;

    for (std::size_t s = 0; s < starts && !exhausted; ++s) {
        std::vector<double> x = grid_point(order[s]);
        double fx = values[order[s]];
        double step = spacing / 2.0;
        while (step >= options.min_step && !exhausted) {
            bool improved = false;
            for (std::size_t d = 0; d < dims && !exhausted; ++d) {
                for (double dir : {1.0, -1.0}) {
                    if (result.evaluations >= options.budget) {
                        exhausted = true;
                        break;
                    }
                    std::vector<double> y = x;
                    y[d] += dir * step;
                    const double fy = objective(y);
                    ++result.evaluations;
                    if (fy > fx) {
                        x = std::move(y);
                        fx = fy;
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) step /= 2.0;
        }
        if (fx > best_value) {
            best_value = fx;
            best = x;
        }
    }
    result.status = exhausted ? OptimizeStatus::BudgetExhausted : OptimizeStatus::Converged;
    result.parameters = best;
    result.settings = parametrization.settings(best);
    result.value = sign * best_value;
    return result;
}

HybridSettings coplanar_settings_for_angles(double theta1, double theta2) {
    HybridSettings s;
    s.x2 = BlochVector::coplanar(0.0);
    s.x1 = BlochVector::coplanar(theta1);
    s.y2 = BlochVector::coplanar(0.0);
    s.y1 = BlochVector::coplanar(theta2);
    return s;
}

double EnvelopeScan::theta(std::size_t i) const {
    return -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(resolution);
}

void EnvelopeScan::write_csv(std::ostream& out) const {
    out << "theta1,theta2,value\n";
    char line[96];
    for (std::size_t i = 0; i < resolution; ++i) {
        for (std::size_t j = 0; j < resolution; ++j) {
            std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", theta(i), theta(j), values[i * resolution + j]);
            out << line;
        }
    }
}

EnvelopeScan scan_envelope(std::size_t resolution) {
    if (resolution < 2) throw Error(ErrorCode::InvalidArgument, "resolution must be at least 2");
    EnvelopeScan scan;
    scan.resolution = resolution;
    scan.values.resize(resolution * resolution);
    parallel_for(resolution, [&](std::size_t i) {
        for (std::size_t j = 0; j < resolution; ++j) {
            scan.values[i * resolution + j] = tsirelson_envelope(scan.theta(i), scan.theta(j));
        }
    });
    scan.max = *std::max_element(scan.values.begin(), scan.values.end());
    for (std::size_t i = 0; i < resolution; ++i) {
        for (std::size_t j = 0; j < resolution; ++j) {
            if (scan.values[i * resolution + j] >= scan.max - 1e-12) {
                scan.argmax.push_back({scan.theta(i), scan.theta(j), scan.values[i * resolution + j]});
            }
        }
    }
    return scan;
}

}  // namespace rsineq
