#pragma once

// Independent oracles used by the test suites. These deliberately avoid the
// library's own code paths: the CDF is a long-double power series, shares come
// from the closed-form Gaussian half-space probability or a naive recount.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "svote/electorate.hpp"

namespace oracle {

// Marsaglia's series: Phi(x) = 1/2 + phi(x) * sum x^(2n+1) / (1*3*...*(2n+1)).
// All terms are positive, so there is no cancellation; long double keeps the
// absolute error far below 1e-12 for |x| <= 9.
inline long double phi_series(long double x) {
    if (x < 0.0L) return 1.0L - phi_series(-x);
    if (x > 40.0L) return 1.0L;
    long double term = x;
    long double sum = x;
    const long double x2 = x * x;
    for (int n = 1; n < 400; ++n) {
        term *= x2 / static_cast<long double>(2 * n + 1);
        sum += term;
        if (term < sum * 1e-25L) break;
    }
    const long double pdf = std::exp(-0.5L * x2) / std::sqrt(2.0L * 3.14159265358979323846264338327950288L);
    return 0.5L + pdf * sum;
}

inline long double inv_logit_ld(long double z) {
    const long double e = std::exp(z);
    return e / (1.0L + e);
}

// Closed-form D share for a centered equicorrelated normal electorate under
// squared Euclidean distance: P(w.V < c) with w = 2(R - D) and
// c = |R|^2 - |D|^2 + shift.
inline double analytic_share(std::size_t dim, double rho, std::span<const double> d_pos,
                             std::span<const double> r_pos, double shift = 0.0) {
    std::vector<double> w(dim);
    double c = shift;
    for (std::size_t j = 0; j < dim; ++j) {
        w[j] = 2.0 * (r_pos[j] - d_pos[j]);
        c += r_pos[j] * r_pos[j] - d_pos[j] * d_pos[j];
    }
    double var = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) var += w[i] * w[j] * (i == j ? 1.0 : rho);
    if (var <= 0.0) return c > 0.0 ? 1.0 : (c < 0.0 ? 0.0 : 0.5);
    return static_cast<double>(phi_series(c / std::sqrt(var)));
}

// Straightforward double-loop recount, sharing no code with the library.
inline double brute_force_share(const svote::Electorate& e, std::span<const double> d_pos,
                                std::span<const double> r_pos, bool absolute_value = false,
                                std::span<const double> weights = {}, double shift = 0.0) {
    const std::size_t dim = e.dim();
    double count = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        const auto v = e.voter(i);
        double dist_d = 0.0, dist_r = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            const double wj = weights.empty() ? 1.0 : weights[j];
            if (absolute_value) {
                dist_d += wj * std::fabs(v[j] - d_pos[j]);
                dist_r += wj * std::fabs(v[j] - r_pos[j]);
            } else {
                dist_d += wj * (v[j] - d_pos[j]) * (v[j] - d_pos[j]);
                dist_r += wj * (v[j] - r_pos[j]) * (v[j] - r_pos[j]);
            }
        }
        const double u = dist_r - dist_d + shift;
        if (u > 0.0) count += 1.0;
        else if (u == 0.0) count += 0.5;
    }
    return count / static_cast<double>(e.size());
}

// Naive matrix product for Cholesky reconstruction checks.
inline svote::Matrix multiply_llt(const svote::Matrix& L) {
    const std::size_t n = L.size();
    svote::Matrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += L(i, k) * L(j, k);
            m(i, j) = s;
        }
    return m;
}

}  // namespace oracle
