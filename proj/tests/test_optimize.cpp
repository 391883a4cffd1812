#include "rsineq/error.hpp"
#include "rsineq/optimize.hpp"
#include "rsineq/report.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace rsineq;

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;

struct Problem {
    CorrelationInequality ineq;
    TermAssignment assignment;
    SettingsParametrization param;
};

Problem make(std::string_view rsx, std::string_view scn, StateFamily family) {
    Problem p{derive_inequality(parse_rs(rsx)), {}, {}};
    p.assignment = assign_terms(p.ineq, parse_scenario(scn));
    p.param.variables = p.ineq.variables();
    p.param.family = family;
    if (family == StateFamily::Fixed) p.param.fixed_state = DensityMatrix::singlet();
    if (family == StateFamily::AlignedWith) p.param.aligned_variable = VariableId('Y', 2);
    return p;
}

double reevaluate(const Problem& p, const OptimizationResult& r) {
    return evaluate_inequality_quantum(p.ineq, p.param.state(r.parameters), r.settings, p.assignment);
}

}  // namespace

TEST_CASE("CHSH on the singlet reaches 2 sqrt2 from 8 seeded restarts") {
    const auto p = make(fixtures::chsh_rsx, fixtures::chsh_scn, StateFamily::Fixed);
    OptimizeOptions opts;
    opts.grid = 12;
    std::vector<double> values;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        opts.seed = seed;
        const auto r = maximize_violation(p.ineq, p.assignment, p.param, opts);
        CHECK(r.converged());
        CHECK(std::abs(r.value - 2 * kSqrt2) <= 1e-6);
        CHECK(std::abs(reevaluate(p, r) - r.value) <= 1e-10);
        values.push_back(r.value);
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    CHECK(*hi - *lo <= 1e-6);
}

TEST_CASE("hybrid F on the singlet reaches 2 sqrt2 and the operator norm") {
    const auto p = make(fixtures::hybrid_rsx, fixtures::hybrid_scn, StateFamily::Fixed);
    const auto r = maximize_violation(p.ineq, p.assignment, p.param);
    CHECK(r.converged());
    CHECK(r.grid_points_per_angle == 24);
    CHECK(std::abs(r.value - 2 * kSqrt2) <= 1e-6);
    const double norm = operator_norm(correlation_operator(p.ineq, r.settings, p.assignment));
    CHECK(r.value <= norm + 1e-9);
    CHECK(std::abs(norm - r.value) <= 1e-9);
    CHECK(std::abs(reevaluate(p, r) - r.value) <= 1e-10);

    // Neighbouring directions are a quarter turn apart.
    const auto& s = r.settings;
    const VariableId x1('X', 1), x2('X', 2), y1('Y', 1), y2('Y', 2);
    CHECK(std::abs(dot(s.at(x1), s.at(x2)) - std::cos(kPi / 4)) <= 1e-6);
    CHECK(std::abs(dot(s.at(y1), s.at(y2)) - std::cos(kPi / 4)) <= 1e-6);
}

TEST_CASE("hybrid F over product states is at least 3/sqrt2") {
    for (auto family : {StateFamily::AlignedWith, StateFamily::ProductShared, StateFamily::ProductIndependent}) {
        const auto p = make(fixtures::hybrid_rsx, fixtures::hybrid_scn, family);
        OptimizeOptions opts;
        opts.grid = 10;
        const auto r = maximize_violation(p.ineq, p.assignment, p.param, opts);
        CHECK(r.value >= 3 / kSqrt2 - 1e-6);
        CHECK(std::abs(reevaluate(p, r) - r.value) <= 1e-10);
        CHECK(r.value <= operator_norm(correlation_operator(p.ineq, r.settings, p.assignment)) + 1e-9);
    }
}

TEST_CASE("LG with sequential terms only reaches 2 sqrt2 on any state") {
    auto p = make(fixtures::lg_rsx, fixtures::lg_scn, StateFamily::Fixed);
    p.param.fixed_state = DensityMatrix::maximally_mixed(4);
    OptimizeOptions opts;
    opts.grid = 12;
    const auto r = maximize_violation(p.ineq, p.assignment, p.param, opts);
    CHECK(std::abs(r.value - 2 * kSqrt2) <= 1e-6);
}

TEST_CASE("full-sphere mode matches the coplanar optimum") {
    auto p = make(fixtures::chsh_rsx, fixtures::chsh_scn, StateFamily::Fixed);
    p.param.mode = SettingsMode::FullSphere;
    CHECK(p.param.parameter_count() == 8);
    OptimizeOptions opts;
    opts.budget = 400'000;
    const auto r = maximize_violation(p.ineq, p.assignment, p.param, opts);
    CHECK(r.grid_points_per_angle == 4);
    CHECK(std::abs(r.value - 2 * kSqrt2) <= 1e-6);
    CHECK(r.evaluations <= opts.budget);
}

TEST_CASE("a tiny budget reports exhaustion with the best value so far") {
    const auto p = make(fixtures::hybrid_rsx, fixtures::hybrid_scn, StateFamily::Fixed);
    OptimizeOptions opts;
    opts.budget = 200;
    const auto r = maximize_violation(p.ineq, p.assignment, p.param, opts);
    CHECK(r.status == OptimizeStatus::BudgetExhausted);
    CHECK_FALSE(r.converged());
    CHECK(r.evaluations == 200);
    CHECK(std::abs(reevaluate(p, r) - r.value) <= 1e-10);
}

TEST_CASE("refinement never falls below the best grid point") {
    const auto p = make(fixtures::hybrid_rsx, fixtures::hybrid_scn, StateFamily::Fixed);
    OptimizeOptions opts;
    opts.grid = 8;
    const auto r = maximize_violation(p.ineq, p.assignment, p.param, opts);
    double grid_best = -1e300;
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b)
            for (int c = 0; c < 8; ++c)
                for (int d = 0; d < 8; ++d) {
                    const std::vector<double> x{-kPi + kPi / 4 * a, -kPi + kPi / 4 * b, -kPi + kPi / 4 * c,
                                                -kPi + kPi / 4 * d};
                    grid_best = std::max(grid_best, evaluate_inequality_quantum(p.ineq, *p.param.fixed_state,
                                                                                p.param.settings(x), p.assignment));
                }
    CHECK(r.value >= grid_best - 1e-12);
    CHECK(r.value >= 2 * kSqrt2 - 1e-6);
}

TEST_CASE("optimizer input validation") {
    const auto p = make(fixtures::hybrid_rsx, fixtures::hybrid_scn, StateFamily::Fixed);
    OptimizeOptions opts;
    opts.grid = 1;
    CHECK_THROWS_AS(maximize_violation(p.ineq, p.assignment, p.param, opts), Error);
    auto missing = p.param;
    missing.fixed_state.reset();
    CHECK_THROWS_AS(maximize_violation(p.ineq, p.assignment, missing), Error);
}

TEST_CASE("envelope scan at resolution 1000") {
    const auto scan = scan_envelope(1000);
    CHECK(scan.values.size() == 1'000'000);
    CHECK(std::abs(scan.max - 2 * kSqrt2) <= 1e-5);
    for (double v : scan.values) REQUIRE(v <= 2 * kSqrt2 + 1e-12);
    bool found = false;
    for (const auto& pt : scan.argmax) {
        found |= std::abs(pt.theta1 - kPi / 4) < 1e-2 && std::abs(pt.theta2 + kPi / 4) < 1e-2;
        CHECK(std::abs(tsirelson_envelope(pt.theta1, pt.theta2) - pt.value) <= 1e-15);
    }
    CHECK(found);
}

TEST_CASE("envelope scan at resolution 2 and CSV export") {
    const auto scan = scan_envelope(2);
    CHECK(scan.values.size() == 4);
    CHECK(scan.theta(0) == doctest::Approx(-kPi));
    CHECK(scan.theta(1) == doctest::Approx(0.0));
    CHECK(scan.max <= 2 * kSqrt2);
    std::ostringstream out;
    scan.write_csv(out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "theta1,theta2,value");
    int rows = 0;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string a, b, c;
        std::getline(row, a, ',');
        std::getline(row, b, ',');
        std::getline(row, c, ',');
        CHECK(std::stod(c) == scan.values[static_cast<std::size_t>(rows)]);
        ++rows;
    }
    CHECK(rows == 4);
    CHECK_THROWS_AS(scan_envelope(1), Error);
}

TEST_CASE("operator norm is the envelope maximized over the sign orbit") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int i = 0; i < 500; ++i) {
        const double t1 = u(rng), t2 = u(rng);
        const double norm = operator_norm(build_f_operator(coplanar_settings_for_angles(t1, t2)).f);
        CHECK(tsirelson_envelope(t1, t2) <= norm + 1e-9);
        const double orbit = std::max({tsirelson_envelope(t1, t2), tsirelson_envelope(t1, -t2),
                                       tsirelson_envelope(kPi - t1, kPi - t2), tsirelson_envelope(kPi - t1, t2 - kPi)});
        CHECK(std::abs(norm - orbit) <= 1e-9);
    }
}
