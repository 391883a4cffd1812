#include "rsineq/linalg.hpp"

#include "rsineq/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rsineq {

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<Complex> entries) : dim_(dim), entries_(std::move(entries)) {
    if (entries_.size() != dim_ * dim_) {
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(dim_ * dim_) + " entries");
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
        for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
    }
    return out;
}

Complex ComplexMatrix::trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

bool ComplexMatrix::is_hermitian(double tolerance) const { return max_abs_diff(adjoint()) <= tolerance; }

bool ComplexMatrix::is_finite() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& other) const {
    if (other.dim_ != dim_) throw Error(ErrorCode::DimensionMismatch, "matrix dimensions differ");
    double d = 0.0;
    for (std::size_t i = 0; i < entries_.size(); ++i) d = std::max(d, std::abs(entries_[i] - other.entries_[i]));
    return d;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim_ != b.dim_) throw Error(ErrorCode::DimensionMismatch, "matrix dimensions differ");
    ComplexMatrix out(a.dim_);
    for (std::size_t i = 0; i < a.entries_.size(); ++i) out.entries_[i] = a.entries_[i] + b.entries_[i];
    return out;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) { return a + Complex(-1.0) * b; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim_ != b.dim_) throw Error(ErrorCode::DimensionMismatch, "matrix dimensions differ");
    const std::size_t n = a.dim_;
    ComplexMatrix out(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < n; ++k) {
            const Complex x = a(r, k);
            if (x == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) out(r, c) += x * b(k, c);
        }
    }
    return out;
}

ComplexMatrix operator*(Complex k, const ComplexMatrix& m) {
    ComplexMatrix out(m.dim_);
    for (std::size_t i = 0; i < m.entries_.size(); ++i) out.entries_[i] = k * m.entries_[i];
    return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t n = a.dim(), m = b.dim();
    ComplexMatrix out(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < m; ++k) {
                for (std::size_t l = 0; l < m; ++l) out(i * m + k, j * m + l) = a(i, j) * b(k, l);
            }
        }
    }
    return out;
}

std::vector<double> symmetric_eigen(std::vector<double> a, std::size_t n, std::vector<double>* vectors) {
    if (a.size() != n * n) throw Error(ErrorCode::DimensionMismatch, "symmetric_eigen: size mismatch");
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
    auto at = [n](std::vector<double>& m, std::size_t r, std::size_t c) -> double& { return m[r * n + c]; };

    double scale = 0.0;
    for (double x : a) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) scale = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(at(a, p, q)));
        }
        if (off <= 1e-300 || off <= 1e-17 * scale) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(a, p, q);
                if (apq == 0.0) continue;
                const double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(a, k, p), akq = at(a, k, q);
                    at(a, k, p) = c * akp - s * akq;
                    at(a, k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(a, p, k), aqk = at(a, q, k);
                    at(a, p, k) = c * apk - s * aqk;
                    at(a, q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = at(v, k, p), vkq = at(v, k, q);
                    at(v, k, p) = c * vkp - s * vkq;
                    at(v, k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return at(a, i, i) < at(a, j, j); });
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = at(a, order[i], order[i]);
    if (vectors) {
        vectors->assign(n * n, 0.0);
        for (std::size_t col = 0; col < n; ++col) {
            for (std::size_t r = 0; r < n; ++r) (*vectors)[r * n + col] = at(v, r, order[col]);
        }
    }
    return values;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m, double tolerance) {
    if (!m.is_hermitian(tolerance)) throw Error(ErrorCode::NotHermitian, "matrix is not Hermitian");
    // Real embedding [[Re, -Im], [Im, Re]] has each eigenvalue of m twice.
    const std::size_t n = m.dim(), n2 = 2 * n;
    std::vector<double> a(n2 * n2);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const Complex z = 0.5 * (m(r, c) + std::conj(m(c, r)));
            a[r * n2 + c] = z.real();
            a[r * n2 + c + n] = -z.imag();
            a[(r + n) * n2 + c] = z.imag();
            a[(r + n) * n2 + c + n] = z.real();
        }
    }
    const std::vector<double> doubled = symmetric_eigen(std::move(a), n2);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (doubled[2 * i] + doubled[2 * i + 1]);
    return out;
}

}  // namespace rsineq
