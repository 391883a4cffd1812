#include "rsineq/simplex.hpp"

#include "rsineq/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rsineq {

void LpProblem::add_row(std::vector<double> coefficients, RowSense sense, double rhs) {
    rows.push_back({std::move(coefficients), sense, rhs});
}

std::string_view lp_status_name(LpStatus s) noexcept {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

namespace {

double lower_of(const LpProblem& p, std::size_t j) { return p.lower.empty() ? 0.0 : p.lower[j]; }
double upper_of(const LpProblem& p, std::size_t j) { return p.upper.empty() ? kInfinity : p.upper[j]; }

// x_j = offset + sign * x'[plus] - x'[minus]
struct ColumnMap {
    double offset = 0.0;
    double sign = 1.0;
    std::size_t plus = 0;
    std::ptrdiff_t minus = -1;
};

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), data_(rows * (cols + 1), 0.0), obj_(cols + 1, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data_[i * (n_ + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * (n_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, n_); }
    double rhs(std::size_t i) const { return at(i, n_); }
    std::vector<double>& obj() { return obj_; }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

    void pivot(std::size_t r, std::size_t c, double pivot_tol) {
        const double p = at(r, c);
        if (std::abs(p) < pivot_tol) {
            throw Error(ErrorCode::NumericalBreakdown, "pivot magnitude " + std::to_string(std::abs(p)) + " below tolerance");
        }
        double* prow = &data_[r * (n_ + 1)];
        const double inv = 1.0 / p;
        for (std::size_t j = 0; j <= n_; ++j) prow[j] *= inv;
        prow[c] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            double* row = &data_[i * (n_ + 1)];
            const double f = row[c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= n_; ++j) row[j] -= f * prow[j];
            row[c] = 0.0;
        }
        const double f = obj_[c];
        if (f != 0.0) {
            for (std::size_t j = 0; j <= n_; ++j) obj_[j] -= f * prow[j];
            obj_[c] = 0.0;
        }
    }

    void drop_row(std::size_t r) {
        data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(r * (n_ + 1)),
                    data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * (n_ + 1)));
        --m_;
    }

    void set_costs(const std::vector<double>& cost, const std::vector<std::size_t>& basis) {
        std::fill(obj_.begin(), obj_.end(), 0.0);
        for (std::size_t j = 0; j < n_; ++j) obj_[j] = cost[j];
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = cost[basis[i]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j <= n_; ++j) obj_[j] -= cb * at(i, j);
        }
    }

private:
    std::size_t m_, n_;
    std::vector<double> data_;
    std::vector<double> obj_;  // reduced costs, last entry = -objective
};

enum class RunResult { Optimal, Unbounded };

// Minimizes the cost loaded into the tableau over columns [0, allowed).
RunResult run_simplex(Tableau& t, std::vector<std::size_t>& basis, std::size_t allowed, const SimplexOptions& opt,
                      std::size_t& iterations, std::size_t max_iterations) {
    auto& obj = t.obj();
    for (;;) {
        std::size_t enter = allowed;
        for (std::size_t j = 0; j < allowed; ++j) {
            if (obj[j] < -opt.optimality_tolerance) {  // Bland: lowest index
                enter = j;
                break;
            }
        }
        if (enter == allowed) return RunResult::Optimal;

        std::size_t leave = t.rows();
        double best = kInfinity;
        for (std::size_t i = 0; i < t.rows(); ++i) {
            const double a = t.at(i, enter);
            if (a <= opt.feasibility_tolerance) continue;
            const double ratio = std::max(t.rhs(i), 0.0) / a;
            if (leave == t.rows()) {
                best = ratio;
                leave = i;
                continue;
            }
            const double tie = 1e-12 * (1.0 + best);
            if (ratio < best - tie) {
                best = ratio;
                leave = i;
            } else if (ratio <= best + tie && basis[i] < basis[leave]) {  // Bland tie-break
                best = std::min(best, ratio);
                leave = i;
            }
        }
        if (leave == t.rows()) return RunResult::Unbounded;

        t.pivot(leave, enter, opt.pivot_tolerance);
        basis[leave] = enter;
        if (++iterations > max_iterations) {
            throw Error(ErrorCode::NumericalBreakdown, "simplex exceeded " + std::to_string(max_iterations) + " iterations");
        }
    }
}

}  // namespace

double max_constraint_violation(const LpProblem& problem, const std::vector<double>& x) {
    double worst = 0.0;
    for (const auto& row : problem.rows) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < row.coefficients.size(); ++j) lhs += row.coefficients[j] * x[j];
        double v = 0.0;
        switch (row.sense) {
            case RowSense::LessEq: v = lhs - row.rhs; break;
            case RowSense::GreaterEq: v = row.rhs - lhs; break;
            case RowSense::Equal: v = std::abs(lhs - row.rhs); break;
        }
        worst = std::max(worst, v);
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        worst = std::max(worst, lower_of(problem, j) - x[j]);
        worst = std::max(worst, x[j] - upper_of(problem, j));
    }
    return worst;
}

LpSolution simplex_solve(const LpProblem& problem, const SimplexOptions& options) {
    const std::size_t n = problem.num_variables();
    if ((!problem.lower.empty() && problem.lower.size() != n) || (!problem.upper.empty() && problem.upper.size() != n)) {
        throw Error(ErrorCode::DimensionMismatch, "bound vectors do not match the objective length");
    }
    for (const auto& row : problem.rows) {
        if (row.coefficients.size() != n) {
            throw Error(ErrorCode::DimensionMismatch, "row has " + std::to_string(row.coefficients.size()) +
                                                          " coefficients, expected " + std::to_string(n));
        }
        if (!std::isfinite(row.rhs)) throw Error(ErrorCode::InvalidArgument, "non-finite right-hand side");
        for (double a : row.coefficients) {
            if (!std::isfinite(a)) throw Error(ErrorCode::InvalidArgument, "non-finite constraint coefficient");
        }
    }
    for (double c : problem.objective) {
        if (!std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "non-finite objective coefficient");
    }

    LpSolution result;

    // Shift/split variables so every structural column is >= 0.
    std::vector<ColumnMap> cmap(n);
    std::size_t ns = 0;
    std::vector<std::pair<std::size_t, double>> upper_rows;  // column, capacity
    for (std::size_t j = 0; j < n; ++j) {
        const double lo = lower_of(problem, j), hi = upper_of(problem, j);
        if (lo > hi) return result;  // empty box: infeasible
        ColumnMap& c = cmap[j];
        if (std::isfinite(lo)) {
            c.offset = lo;
            c.plus = ns++;
            if (std::isfinite(hi)) upper_rows.emplace_back(c.plus, hi - lo);
        } else if (std::isfinite(hi)) {
            c.offset = hi;
            c.sign = -1.0;
            c.plus = ns++;
        } else {
            c.plus = ns++;
            c.minus = static_cast<std::ptrdiff_t>(ns++);
        }
    }

    struct StdRow {
        std::vector<double> a;
        RowSense sense;
        double b;
    };
    std::vector<StdRow> rows;
    for (const auto& row : problem.rows) {
        StdRow r{std::vector<double>(ns, 0.0), row.sense, row.rhs};
        for (std::size_t j = 0; j < n; ++j) {
            const double a = row.coefficients[j];
            if (a == 0.0) continue;
            r.b -= a * cmap[j].offset;
            r.a[cmap[j].plus] += a * cmap[j].sign;
            if (cmap[j].minus >= 0) r.a[static_cast<std::size_t>(cmap[j].minus)] -= a;
        }
        rows.push_back(std::move(r));
    }
    for (const auto& [col, cap] : upper_rows) {
        StdRow r{std::vector<double>(ns, 0.0), RowSense::LessEq, cap};
        r.a[col] = 1.0;
        rows.push_back(std::move(r));
    }
    std::size_t n_slack = 0, n_art = 0;
    for (auto& r : rows) {
        if (r.b < 0) {
            for (double& a : r.a) a = -a;
            r.b = -r.b;
            if (r.sense == RowSense::LessEq) r.sense = RowSense::GreaterEq;
            else if (r.sense == RowSense::GreaterEq) r.sense = RowSense::LessEq;
        }
        if (r.sense != RowSense::Equal) ++n_slack;
        if (r.sense != RowSense::LessEq) ++n_art;
    }

    const std::size_t m = rows.size();
    const std::size_t first_art = ns + n_slack;
    const std::size_t ncols = first_art + n_art;
    Tableau t(m, ncols);
    std::vector<std::size_t> basis(m);
    std::size_t slack = ns, art = first_art;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < ns; ++j) t.at(i, j) = rows[i].a[j];
        t.rhs(i) = rows[i].b;
        switch (rows[i].sense) {
            case RowSense::LessEq:
                t.at(i, slack) = 1.0;
                basis[i] = slack++;
                break;
            case RowSense::GreaterEq:
                t.at(i, slack++) = -1.0;
                t.at(i, art) = 1.0;
                basis[i] = art++;
                break;
            case RowSense::Equal:
                t.at(i, art) = 1.0;
                basis[i] = art++;
                break;
        }
    }

    const std::size_t max_iter =
        options.max_iterations ? options.max_iterations : 200 * (m + ncols) + 1000;

    if (n_art > 0) {
        std::vector<double> phase1(ncols, 0.0);
        for (std::size_t j = first_art; j < ncols; ++j) phase1[j] = 1.0;
        t.set_costs(phase1, basis);
        run_simplex(t, basis, ncols, options, result.iterations, max_iter);
        const double infeasibility = -t.obj()[ncols];
        if (infeasibility > options.feasibility_tolerance) {
            result.status = LpStatus::Infeasible;
            return result;
        }
        // Pivot remaining (zero-level) artificials out; rows with no usable pivot are redundant.
        for (std::size_t i = 0; i < t.rows();) {
            if (basis[i] < first_art) {
                ++i;
                continue;
            }
            std::size_t best = first_art;
            double best_mag = options.feasibility_tolerance;
            for (std::size_t j = 0; j < first_art; ++j) {
                if (std::abs(t.at(i, j)) > best_mag) {
                    best_mag = std::abs(t.at(i, j));
                    best = j;
                }
            }
            if (best == first_art) {
                t.drop_row(i);
                basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(i));
            } else {
                t.pivot(i, best, options.pivot_tolerance);
                basis[i] = best;
                ++i;
            }
        }
    }

    std::vector<double> cost(ncols, 0.0);
    const double dir = problem.sense == ObjectiveSense::Maximize ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double c = dir * problem.objective[j];
        cost[cmap[j].plus] += c * cmap[j].sign;
        if (cmap[j].minus >= 0) cost[static_cast<std::size_t>(cmap[j].minus)] -= c;
    }
    t.set_costs(cost, basis);
    if (run_simplex(t, basis, first_art, options, result.iterations, max_iter) == RunResult::Unbounded) {
        result.status = LpStatus::Unbounded;
        return result;
    }

    std::vector<double> xs(ncols, 0.0);
    for (std::size_t i = 0; i < t.rows(); ++i) xs[basis[i]] = std::max(t.rhs(i), 0.0);
    result.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double v = cmap[j].offset + cmap[j].sign * xs[cmap[j].plus];
        if (cmap[j].minus >= 0) v -= xs[static_cast<std::size_t>(cmap[j].minus)];
        result.x[j] = v;
    }
    result.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) result.objective += problem.objective[j] * result.x[j];
    result.status = LpStatus::Optimal;

    double scale = 1.0;
    for (const auto& row : problem.rows) scale = std::max(scale, std::abs(row.rhs));
    const double violation = max_constraint_violation(problem, result.x);
    if (violation > options.feasibility_tolerance * scale) {
        throw Error(ErrorCode::NumericalBreakdown,
                    "solution violates a constraint by " + std::to_string(violation));
    }
    return result;
}

}  // namespace rsineq
