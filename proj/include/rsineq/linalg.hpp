#pragma once

// Small dense complex matrices (qubit and two-qubit operators) and a Hermitian
// eigensolver adequate for dimensions up to a few dozen.

#include <complex>
#include <cstddef>
#include <vector>

namespace rsineq {

using Complex = std::complex<double>;

class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t dim);
    /// Row-major entries; throws DimensionMismatch unless entries.size() == dim*dim.
    ComplexMatrix(std::size_t dim, std::vector<Complex> entries);

    static ComplexMatrix identity(std::size_t dim);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * dim_ + c]; }
    [[nodiscard]] const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * dim_ + c]; }
    [[nodiscard]] const std::vector<Complex>& entries() const noexcept { return entries_; }

    [[nodiscard]] ComplexMatrix adjoint() const;
    [[nodiscard]] Complex trace() const;
    [[nodiscard]] bool is_hermitian(double tolerance) const;
    [[nodiscard]] bool is_finite() const;
    /// Largest entry-wise modulus of (this - other).
    [[nodiscard]] double max_abs_diff(const ComplexMatrix& other) const;

    friend ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
    friend ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
    friend ComplexMatrix operator*(Complex k, const ComplexMatrix& m);

private:
    std::size_t dim_ = 0;
    std::vector<Complex> entries_;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Ascending eigenvalues of a Hermitian matrix. Throws NotHermitian beyond `tolerance`.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m, double tolerance = 1e-10);

/// Eigen-decomposition of a real symmetric matrix (row-major) by cyclic Jacobi.
/// Returns eigenvalues ascending; `vectors` receives the matching columns when non-null.
std::vector<double> symmetric_eigen(std::vector<double> a, std::size_t n, std::vector<double>* vectors = nullptr);

}  // namespace rsineq
