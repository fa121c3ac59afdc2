#include "svote/linalg.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

using namespace svote;

TEST(Cholesky, IdentityIsItsOwnFactor) {
    const Matrix I = Matrix::identity(4);
    EXPECT_EQ(cholesky_lower(I), I);
}

TEST(Cholesky, TwoByTwoKnownFactor) {
    Matrix m(2);
    m(0, 0) = m(1, 1) = 1.0;
    m(0, 1) = m(1, 0) = 0.5;
    const Matrix L = cholesky_lower(m);
    EXPECT_EQ(L(0, 0), 1.0);
    EXPECT_EQ(L(0, 1), 0.0);
    EXPECT_EQ(L(1, 0), 0.5);
    EXPECT_DOUBLE_EQ(L(1, 1), std::sqrt(0.75));

    const Matrix back = oracle::multiply_llt(L);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(back(i, j), m(i, j), 1e-10);
}

TEST(Cholesky, SingularRejected) {
    Matrix m(2, 1.0);  // [[1,1],[1,1]] has a zero pivot
    EXPECT_THROW(cholesky_lower(m), not_positive_definite);
    try {
        cholesky_lower(m);
    } catch (const not_positive_definite& e) {
        EXPECT_EQ(e.column, 1u);
    }
}

TEST(Cholesky, AsymmetricRejected) {
    Matrix m = Matrix::identity(2);
    m(0, 1) = 0.25;
    EXPECT_THROW(cholesky_lower(m), std::invalid_argument);
}

TEST(Cholesky, ReconstructionAcrossEquicorrelationFamily) {
    for (std::size_t d = 1; d <= 10; ++d) {
        const double lo = d >= 2 ? -1.0 / static_cast<double>(d - 1) : -0.9;
        for (double rho = lo + 0.05; rho < 0.95; rho += 0.1) {
            Matrix m(d);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) m(i, j) = i == j ? 1.0 : rho;
            const Matrix back = oracle::multiply_llt(cholesky_lower(m));
            double err = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    err = std::max(err, std::abs(back(i, j) - m(i, j)));
            EXPECT_LE(err, 1e-10) << "d=" << d << " rho=" << rho;
        }
    }
}

TEST(SpdSolve, RoundTripsKnownSolution) {
    Matrix a(3);
    a(0, 0) = 4.0; a(0, 1) = 1.0; a(0, 2) = 0.5;
    a(1, 0) = 1.0; a(1, 1) = 3.0; a(1, 2) = -0.25;
    a(2, 0) = 0.5; a(2, 1) = -0.25; a(2, 2) = 2.0;
    const std::vector<double> x_true = {1.0, -2.0, 0.75};
    std::vector<double> b(3, 0.0);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) b[i] += a(i, j) * x_true[j];
    const auto x = solve_spd(a, b);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(x[i], x_true[i], 1e-12);

    const Matrix inv = spd_inverse(a);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < 3; ++k) s += a(i, k) * inv(k, j);
            EXPECT_NEAR(s, i == j ? 1.0 : 0.0, 1e-12);
        }
}
