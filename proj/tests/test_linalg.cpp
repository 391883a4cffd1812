#include "oracles.hpp"
#include "rsineq/error.hpp"
#include "rsineq/linalg.hpp"

#include <doctest.h>

#include <random>

using namespace rsineq;

namespace {

ComplexMatrix random_hermitian(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = g(rng);
        for (std::size_t j = i + 1; j < n; ++j) {
            m(i, j) = Complex(g(rng), g(rng));
            m(j, i) = std::conj(m(i, j));
        }
    }
    return m;
}

}  // namespace

TEST_CASE("matrix basics") {
    const ComplexMatrix a(2, {1, Complex(0, 2), 3, 4});
    CHECK(a.trace() == Complex(5, 0));
    CHECK(a.adjoint()(0, 1) == Complex(3, 0));
    CHECK(a.adjoint()(1, 0) == Complex(0, -2));
    CHECK_FALSE(a.is_hermitian(1e-12));
    CHECK((a * ComplexMatrix::identity(2)).max_abs_diff(a) == 0.0);
    CHECK((a + a).max_abs_diff(Complex(2, 0) * a) == 0.0);
    CHECK((a - a).max_abs_diff(ComplexMatrix(2)) == 0.0);
    CHECK(a.is_finite());
    CHECK_THROWS_AS(ComplexMatrix(2, {1, 2, 3}), Error);

    const auto k = kron(ComplexMatrix::identity(2), a);
    CHECK(k.dim() == 4);
    CHECK(k(2, 3) == Complex(0, 2));
    CHECK(k(0, 2) == Complex(0, 0));
}

TEST_CASE("symmetric_eigen returns orthonormal eigenvectors") {
    const std::vector<double> a{2, 1, 0, 1, 2, 1, 0, 1, 2};
    std::vector<double> vecs;
    const auto ev = symmetric_eigen(a, 3, &vecs);
    CHECK(ev[0] == doctest::Approx(2 - std::sqrt(2.0)));
    CHECK(ev[1] == doctest::Approx(2));
    CHECK(ev[2] == doctest::Approx(2 + std::sqrt(2.0)));
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t i = 0; i < 3; ++i) {
            double av = 0.0;
            for (std::size_t j = 0; j < 3; ++j) av += a[i * 3 + j] * vecs[j * 3 + k];
            CHECK(av == doctest::Approx(ev[k] * vecs[i * 3 + k]));
        }
    }
}

TEST_CASE("Hermitian eigenvalues match the characteristic-polynomial oracle") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 5);
        const auto m = random_hermitian(rng, n);
        const auto got = hermitian_eigenvalues(m);
        const auto expected = oracle::charpoly_eigenvalues(m);
        REQUIRE(got.size() == n);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(got[i] - expected[i]) <= 1e-10);
    }
}

TEST_CASE("Pauli-type spectra") {
    const ComplexMatrix sy(2, {0, Complex(0, -1), Complex(0, 1), 0});
    const auto ev = hermitian_eigenvalues(sy);
    CHECK(ev[0] == doctest::Approx(-1).epsilon(1e-14));
    CHECK(ev[1] == doctest::Approx(1).epsilon(1e-14));
    const auto ev4 = hermitian_eigenvalues(kron(sy, sy));
    CHECK(ev4[0] == doctest::Approx(-1));
    CHECK(ev4[1] == doctest::Approx(-1));
    CHECK(ev4[2] == doctest::Approx(1));
    CHECK(ev4[3] == doctest::Approx(1));
}

TEST_CASE("non-Hermitian input is rejected") {
    const ComplexMatrix a(2, {1, 1, 0, 1});
    try {
        (void)hermitian_eigenvalues(a);
        FAIL("expected NotHermitian");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotHermitian);
    }
}
