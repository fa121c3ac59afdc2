#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace svote {

// Dense square matrix, row-major. Sized for the small systems used here
// (correlation matrices with d <= ~10, 3x3 normal equations).
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    bool operator==(const Matrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

struct not_positive_definite : std::invalid_argument {
    std::size_t column;
    explicit not_positive_definite(std::size_t col)
        : std::invalid_argument("cholesky: pivot <= 0 at column " + std::to_string(col) +
                                ", matrix is not positive definite"),
          column(col) {}
};

// Lower-triangular L with L * L^T = m. Rejects asymmetric or non-PD input.
inline Matrix cholesky_lower(const Matrix& m) {
    const std::size_t n = m.size();
    if (n == 0) throw std::invalid_argument("cholesky: empty matrix");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(m(i, j) - m(j, i)) > 1e-12 * (1.0 + std::abs(m(i, j))))
                throw std::invalid_argument("cholesky: matrix is not symmetric");

    Matrix L(n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = m(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= L(j, k) * L(j, k);
        if (!(diag > 0.0)) throw not_positive_definite(j);
        L(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / L(j, j);
        }
    }
    return L;
}

// Solve L * L^T * x = b given the Cholesky factor L.
inline std::vector<double> cholesky_solve(const Matrix& L, std::span<const double> b) {
    const std::size_t n = L.size();
    if (b.size() != n) throw std::invalid_argument("cholesky_solve: size mismatch");
    std::vector<double> x(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) x[i] -= L(i, k) * x[k];
        x[i] /= L(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t k = ii + 1; k < n; ++k) x[ii] -= L(k, ii) * x[k];
        x[ii] /= L(ii, ii);
    }
    return x;
}

inline std::vector<double> solve_spd(const Matrix& a, std::span<const double> b) {
    return cholesky_solve(cholesky_lower(a), b);
}

inline Matrix spd_inverse(const Matrix& a) {
    const std::size_t n = a.size();
    const Matrix L = cholesky_lower(a);
    Matrix inv(n);
    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const std::vector<double> col = cholesky_solve(L, e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
        e[j] = 0.0;
    }
    return inv;
}

}  // namespace svote
