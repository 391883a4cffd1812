#include "oracles.hpp"
#include "rsineq/error.hpp"
#include "rsineq/quantum.hpp"
#include "rsineq/report.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace rsineq;

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::AssertionFailure;
}

BlochVector random_direction(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    for (;;) {
        const double x = g(rng), y = g(rng), z = g(rng);
        const double n = std::sqrt(x * x + y * y + z * z);
        if (n > 1e-6) return BlochVector::make(x / n, y / n, z / n);
    }
}

HybridSettings random_settings(std::mt19937_64& rng) {
    return {random_direction(rng), random_direction(rng), random_direction(rng), random_direction(rng)};
}

// Random mixed two-qubit (or one-qubit) state: G G^dagger / Tr.
DensityMatrix random_state(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix a(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
    ComplexMatrix rho = a * a.adjoint();
    const Complex tr = rho.trace();
    rho = Complex(1.0 / tr.real(), 0.0) * rho;
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = i; j < dim; ++j) {
            const Complex avg = 0.5 * (rho(i, j) + std::conj(rho(j, i)));
            rho(i, j) = avg;
            rho(j, i) = std::conj(avg);
        }
    }
    return DensityMatrix(rho);
}

CorrelationInequality hybrid() { return derive_inequality(parse_rs(fixtures::hybrid_rsx)); }

}  // namespace

TEST_CASE("pauli observables") {
    const auto z = pauli_observable(BlochVector::make(0, 0, 1));
    CHECK(z.max_abs_diff(ComplexMatrix(2, {1, 0, 0, -1})) == 0.0);
    const auto x = pauli_observable(BlochVector::make(1, 0, 0));
    CHECK(x.max_abs_diff(ComplexMatrix(2, {0, 1, 1, 0})) == 0.0);
    CHECK(code_of([] { (void)BlochVector::make(1, 1, 0); }) == ErrorCode::NonUnitVector);

    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) {
        const auto p = pauli_observable(random_direction(rng));
        CHECK(p.is_hermitian(1e-15));
        CHECK(std::abs(p.trace()) <= 1e-15);
        CHECK((p * p).max_abs_diff(ComplexMatrix::identity(2)) <= 1e-12);
        const auto ev = oracle::charpoly_eigenvalues(p);
        CHECK(std::abs(ev[0] + 1.0) <= 1e-12);
        CHECK(std::abs(ev[1] - 1.0) <= 1e-12);
    }
}

TEST_CASE("bloch vector constructors") {
    const auto c = BlochVector::coplanar(kPi / 2);
    CHECK(c.x() == doctest::Approx(1));
    CHECK(std::abs(c.z()) <= 1e-15);
    const auto s = BlochVector::spherical(kPi / 2, kPi / 2);
    CHECK(s.y() == doctest::Approx(1));
    CHECK(dot(c, -c) == doctest::Approx(-1));
    const auto k = cross(BlochVector::make(1, 0, 0), BlochVector::make(0, 1, 0));
    CHECK(k[2] == doctest::Approx(1));
}

TEST_CASE("state validation") {
    CHECK(code_of([] { DensityMatrix(ComplexMatrix(2, {1, 0, 0, 1})); }) == ErrorCode::InvalidState);
    CHECK(code_of([] { DensityMatrix(ComplexMatrix(2, {1.5, 0, 0, -0.5})); }) == ErrorCode::InvalidState);
    CHECK(code_of([] { DensityMatrix(ComplexMatrix(2, {0.5, 1, 0, 0.5})); }) == ErrorCode::InvalidState);
    CHECK(code_of([] { DensityMatrix(ComplexMatrix::identity(3)); }) == ErrorCode::InvalidState);
    CHECK(DensityMatrix::singlet().dim() == 4);
    CHECK(DensityMatrix::maximally_mixed(2).matrix()(0, 0) == Complex(0.5, 0));
}

TEST_CASE("spatial correlator examples") {
    const auto z = BlochVector::make(0, 0, 1);
    CHECK(spatial_correlator(DensityMatrix::singlet(), z, z) == doctest::Approx(-1).epsilon(1e-14));
    CHECK(code_of([&] { (void)spatial_correlator(DensityMatrix::qubit(z), z, z); }) == ErrorCode::DimensionMismatch);

    std::mt19937_64 rng(2);
    for (int i = 0; i < 50; ++i) {
        const auto a = random_direction(rng), b = random_direction(rng);
        const auto na = random_direction(rng), nb = random_direction(rng);
        CHECK(std::abs(spatial_correlator(DensityMatrix::product(na, nb), a, b) - dot(a, na) * dot(b, nb)) <= 1e-12);
        CHECK(std::abs(spatial_correlator(DensityMatrix::maximally_mixed(4), a, b)) <= 1e-15);
        CHECK(std::abs(spatial_correlator(DensityMatrix::singlet(), a, b) + dot(a, b)) <= 1e-12);
    }
}

TEST_CASE("sequential correlator is the state-independent dot product") {
    const auto z = BlochVector::make(0, 0, 1), x = BlochVector::make(1, 0, 0);
    std::mt19937_64 rng(3);
    double deviation = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto rho2 = random_state(rng, 2);
        const auto rho4 = random_state(rng, 4);
        const auto a = random_direction(rng), b = random_direction(rng);
        CHECK(std::abs(sequential_correlator(rho2, Subsystem::A, a, a) - 1.0) <= 1e-12);
        CHECK(std::abs(sequential_correlator(rho4, Subsystem::B, z, x)) <= 1e-12);
        const auto quarter = BlochVector::coplanar(kPi / 4);
        deviation = std::max(deviation, std::abs(sequential_correlator(rho4, Subsystem::A, z, quarter) - std::cos(kPi / 4)));
        deviation = std::max(deviation, std::abs(sequential_correlator(rho4, Subsystem::B, a, b) - dot(a, b)));
        deviation = std::max(deviation, std::abs(sequential_correlator(rho2, Subsystem::A, a, b) - dot(a, b)));
    }
    CHECK(deviation < 1e-10);
}

TEST_CASE("sequential and singlet spatial correlators coincide in magnitude") {
    std::mt19937_64 rng(4);
    const auto singlet = DensityMatrix::singlet();
    for (int i = 0; i < 100; ++i) {
        const auto a = random_direction(rng), b = random_direction(rng);
        CHECK(std::abs(std::abs(sequential_correlator(singlet, Subsystem::A, a, b)) -
                       std::abs(spatial_correlator(singlet, a, b))) <= 1e-12);
    }
}

TEST_CASE("hybrid F on the singlet and on the product state") {
    const auto ineq = hybrid();
    const auto assignment = assign_terms(ineq, parse_scenario(fixtures::hybrid_scn));
    REQUIRE(assignment.rules.size() == 4);
    CHECK(assignment.rules[0].kind == TermRuleKind::Sequential);
    CHECK(assignment.rules[1].kind == TermRuleKind::Tensor);

    const auto antipodal = quarter_turn_ladder(LadderOrientation::Antipodal);
    const double singlet = evaluate_inequality_quantum(ineq, DensityMatrix::singlet(), antipodal.as_map(), assignment);
    CHECK(std::abs(singlet - 2 * kSqrt2) <= 1e-12);

    // Literal sign pattern on the aligned ladder.
    const auto aligned = quarter_turn_ladder(LadderOrientation::Aligned);
    CHECK(std::abs(evaluate_inequality_quantum(ineq, DensityMatrix::singlet(), aligned.as_map(), assignment)) <= 1e-12);

    const auto product = DensityMatrix::product(aligned.y2, aligned.y2);
    const double p = evaluate_inequality_quantum(ineq, product, aligned.as_map(), assignment);
    CHECK(std::abs(p - 3 / kSqrt2) <= 1e-12);
    CHECK(std::abs(hybrid_f_product(aligned.y2, aligned.y2, aligned) - 3 / kSqrt2) <= 1e-12);

    const auto chsh = derive_inequality(parse_rs(fixtures::chsh_rsx));
    const auto chsh_assign = assign_terms(chsh, parse_scenario(fixtures::chsh_scn));
    Settings s{{VariableId('X', 1), BlochVector::coplanar(0.1)}, {VariableId('X', 2), BlochVector::coplanar(1.2)},
               {VariableId('Y', 1), BlochVector::coplanar(2.3)}, {VariableId('Y', 2), BlochVector::coplanar(-0.7)}};
    CHECK(std::abs(evaluate_inequality_quantum(chsh, DensityMatrix::maximally_mixed(4), s, chsh_assign)) <= 1e-15);
}

TEST_CASE("hybrid_f_product agrees with the matrix path") {
    const auto ineq = hybrid();
    const auto assignment = assign_terms(ineq, parse_scenario(fixtures::hybrid_scn));
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto s = random_settings(rng);
        const auto na = random_direction(rng), nb = random_direction(rng);
        const double matrix = evaluate_inequality_quantum(ineq, DensityMatrix::product(na, nb), s.as_map(), assignment);
        CHECK(std::abs(hybrid_f_product(na, nb, s) - matrix) <= 1e-12);
    }
    // A state direction orthogonal to the settings plane kills the cross terms.
    const auto aligned = quarter_turn_ladder(LadderOrientation::Aligned);
    const auto ny = BlochVector::make(0, 1, 0);
    CHECK(std::abs(hybrid_f_product(ny, ny, aligned) - (dot(aligned.x1, aligned.x2) + dot(aligned.y1, aligned.y2))) <= 1e-12);
}

TEST_CASE("F operator decomposition") {
    const auto ineq = hybrid();
    const auto assignment = assign_terms(ineq, parse_scenario(fixtures::hybrid_scn));
    std::mt19937_64 rng(6);
    for (int i = 0; i < 100; ++i) {
        const auto s = random_settings(rng);
        const auto op = build_f_operator(s);
        CHECK(op.f.is_hermitian(1e-12));
        CHECK((op.s1 + op.s2).max_abs_diff(op.f) <= 1e-15);
        CHECK((op.s2 * op.s2).max_abs_diff(s2_squared_closed_form(s)) <= 1e-12);
        CHECK(correlation_operator(ineq, s.as_map(), assignment).max_abs_diff(op.f) <= 1e-12);
        const double tr = (DensityMatrix::singlet().matrix() * op.f).trace().real();
        CHECK(std::abs(tr - evaluate_inequality_quantum(ineq, DensityMatrix::singlet(), s.as_map(), assignment)) <= 1e-12);

        const auto rho = random_state(rng, 4);
        CHECK(evaluate_inequality_quantum(ineq, rho, s.as_map(), assignment) <= operator_norm(op.f) + 1e-10);
    }
    const auto same = HybridSettings{BlochVector::coplanar(0.3), BlochVector::coplanar(0.3), BlochVector::coplanar(1.1),
                                     BlochVector::coplanar(1.1)};
    const auto op = build_f_operator(same);
    CHECK(op.s1.max_abs_diff(Complex(2, 0) * ComplexMatrix::identity(4)) <= 1e-12);
    CHECK((op.s2 * op.s2).max_abs_diff(ComplexMatrix(4)) <= 1e-12);
}

TEST_CASE("operator norm") {
    CHECK(operator_norm(ComplexMatrix::identity(4)) == doctest::Approx(1).epsilon(1e-14));
    const auto op = build_f_operator(quarter_turn_ladder(LadderOrientation::Antipodal));
    CHECK(std::abs(operator_norm(op.f) - 2 * kSqrt2) <= 1e-12);
    CHECK(code_of([] { (void)operator_norm(ComplexMatrix(2, {0, 1, 0, 0})); }) == ErrorCode::NotHermitian);

    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        ComplexMatrix m(4);
        for (std::size_t r = 0; r < 4; ++r) {
            m(r, r) = g(rng);
            for (std::size_t c = r + 1; c < 4; ++c) {
                m(r, c) = Complex(g(rng), g(rng));
                m(c, r) = std::conj(m(r, c));
            }
        }
        const auto ev = oracle::charpoly_eigenvalues(m);
        CHECK(std::abs(operator_norm(m) - std::max(std::abs(ev.front()), std::abs(ev.back()))) <= 1e-10);
    }
}

TEST_CASE("tsirelson envelope") {
    CHECK(std::abs(tsirelson_envelope(kPi / 4, -kPi / 4) - 2 * kSqrt2) <= 1e-12);
    CHECK(std::abs(tsirelson_envelope(0, 0) - 2) <= 1e-15);
    for (int i = 0; i < 400; ++i) {
        for (int j = 0; j < 400; ++j) {
            const double t1 = -kPi + 2 * kPi * i / 400, t2 = -kPi + 2 * kPi * j / 400;
            REQUIRE(tsirelson_envelope(t1, t2) <= 2 * kSqrt2 + 1e-12);
        }
    }
}

TEST_CASE("term assignment validation") {
    const auto ineq = hybrid();
    const auto scenario = parse_scenario(fixtures::hybrid_scn);
    const auto good = assign_terms(ineq, scenario);
    auto settings = quarter_turn_ladder(LadderOrientation::Antipodal).as_map();
    const auto rho = DensityMatrix::singlet();

    auto missing = settings;
    missing.erase(VariableId('Y', 2));
    CHECK(code_of([&] { (void)evaluate_inequality_quantum(ineq, rho, missing, good); }) == ErrorCode::MissingSetting);

    auto fewer = good;
    fewer.rules.pop_back();
    CHECK(code_of([&] { (void)evaluate_inequality_quantum(ineq, rho, settings, fewer); }) == ErrorCode::MissingAssignment);

    auto swapped = good;
    std::swap(swapped.rules[0].first, swapped.rules[0].second);
    CHECK(code_of([&] { (void)evaluate_inequality_quantum(ineq, rho, settings, swapped); }) == ErrorCode::InvalidAssignment);

    auto extra = good;
    extra.rules.push_back(good.rules[1]);
    CHECK(code_of([&] { (void)evaluate_inequality_quantum(ineq, rho, settings, extra); }) == ErrorCode::InvalidAssignment);

    const auto three = parse_scenario("variables: X1, Y1, Z1\ncontext: X1, Y1\ncontext: Y1, Z1\n");
    const auto tri = derive_inequality(parse_rs("(X1 + Y1 + Z1)^2 >= 1"));
    CHECK(code_of([&] { (void)assign_terms(tri, three); }) == ErrorCode::InvalidAssignment);
}
