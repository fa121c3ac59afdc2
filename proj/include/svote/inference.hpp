#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "svote/linalg.hpp"
#include "svote/models.hpp"
#include "svote/survey.hpp"

namespace svote {

// One observation for either stage: two covariates and an outcome.
// Stage 1: (econ_self, soc_self, perceived placement).
// Stage 2: (dist_e, dist_s, vote in {0, 1}).
using FitRow = std::array<double, 3>;

namespace detail {

inline constexpr std::array<const char*, 3> kOlsColumns = {"intercept", "econ_self", "soc_self"};

}  // namespace detail

// Least squares through the normal equations, solved on centered covariates
// with one step of iterative refinement. residual_sd uses the n - 3
// denominator; standard errors come from sigma^2 (X'X)^-1.
inline LinearFit fit_ols(std::span<const FitRow> rows) {
    const std::size_t n = rows.size();
    if (n <= 3) throw std::invalid_argument("fit_ols: need n > 3");

    long double sum_e = 0.0L, sum_s = 0.0L;
    for (const auto& r : rows) {
        sum_e += r[0];
        sum_s += r[1];
    }
    const double me = static_cast<double>(sum_e / static_cast<long double>(n));
    const double ms = static_cast<double>(sum_s / static_cast<long double>(n));

    long double a11 = 0.0L, a12 = 0.0L, a22 = 0.0L;
    long double b0 = 0.0L, b1 = 0.0L, b2 = 0.0L;
    for (const auto& r : rows) {
        const double e = r[0] - me;
        const double s = r[1] - ms;
        const double y = r[2];
        a11 += static_cast<long double>(e) * e;
        a12 += static_cast<long double>(e) * s;
        a22 += static_cast<long double>(s) * s;
        b0 += y;
        b1 += static_cast<long double>(e) * y;
        b2 += static_cast<long double>(s) * y;
    }
    Matrix A(3);
    A(0, 0) = static_cast<double>(n);
    A(1, 1) = static_cast<double>(a11);
    A(1, 2) = A(2, 1) = static_cast<double>(a12);
    A(2, 2) = static_cast<double>(a22);
    const std::array<double, 3> b = {static_cast<double>(b0), static_cast<double>(b1),
                                     static_cast<double>(b2)};

    Matrix L;
    try {
        L = cholesky_lower(A);
    } catch (const not_positive_definite& e) {
        throw std::invalid_argument(std::string("fit_ols: design column '") +
                                    detail::kOlsColumns[e.column] + "' is degenerate");
    }
    std::vector<double> beta = cholesky_solve(L, b);

    // one refinement pass against the exact normal equations
    {
        long double r0 = b0, r1 = b1, r2 = b2;
        r0 -= static_cast<long double>(A(0, 0)) * beta[0];
        r1 -= static_cast<long double>(A(1, 1)) * beta[1] +
              static_cast<long double>(A(1, 2)) * beta[2];
        r2 -= static_cast<long double>(A(2, 1)) * beta[1] +
              static_cast<long double>(A(2, 2)) * beta[2];
        const std::array<double, 3> resid = {static_cast<double>(r0), static_cast<double>(r1),
                                             static_cast<double>(r2)};
        const std::vector<double> delta = cholesky_solve(L, resid);
        for (std::size_t k = 0; k < 3; ++k) beta[k] += delta[k];
    }

    long double ssr = 0.0L;
    for (const auto& r : rows) {
        const double fitted = beta[0] + beta[1] * (r[0] - me) + beta[2] * (r[1] - ms);
        const double res = r[2] - fitted;
        ssr += static_cast<long double>(res) * res;
    }
    const double sigma2 = static_cast<double>(ssr) / static_cast<double>(n - 3);

    const Matrix cov = spd_inverse(A);
    LinearFit fit;
    fit.n = n;
    fit.coef_econ_self = beta[1];
    fit.coef_soc_self = beta[2];
    fit.intercept = beta[0] - beta[1] * me - beta[2] * ms;
    fit.residual_sd = std::sqrt(std::max(0.0, sigma2));
    const double v00 = cov(0, 0), v11 = cov(1, 1), v22 = cov(2, 2);
    const double v01 = cov(0, 1), v02 = cov(0, 2), v12 = cov(1, 2);
    const double var_intercept = v00 + me * me * v11 + ms * ms * v22 - 2.0 * me * v01 -
                                 2.0 * ms * v02 + 2.0 * me * ms * v12;
    fit.se_intercept = std::sqrt(std::max(0.0, sigma2 * var_intercept));
    fit.se_econ_self = std::sqrt(std::max(0.0, sigma2 * v11));
    fit.se_soc_self = std::sqrt(std::max(0.0, sigma2 * v22));
    return fit;
}

namespace detail {

inline double logit_loglik(std::span<const FitRow> rows, const std::array<double, 3>& beta) {
    long double ll = 0.0L;
    for (const auto& r : rows) {
        const double eta = beta[0] + beta[1] * r[0] + beta[2] * r[1];
        const double log1pe = eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
        ll += static_cast<long double>(r[2]) * eta - log1pe;
    }
    return static_cast<double>(ll);
}

struct ScoreInfo {
    std::array<double, 3> score;
    Matrix info{3};
    double max_interior = 0.0;  // largest min(mu, 1 - mu) over the sample
};

inline ScoreInfo logit_score_info(std::span<const FitRow> rows, const std::array<double, 3>& beta) {
    long double g0 = 0.0L, g1 = 0.0L, g2 = 0.0L;
    long double h00 = 0.0L, h01 = 0.0L, h02 = 0.0L, h11 = 0.0L, h12 = 0.0L, h22 = 0.0L;
    double max_interior = 0.0;
    for (const auto& r : rows) {
        const double eta = beta[0] + beta[1] * r[0] + beta[2] * r[1];
        const double mu = inverse_logit(eta);
        const double res = r[2] - mu;
        const double w = mu * (1.0 - mu);
        max_interior = std::max(max_interior, std::min(mu, 1.0 - mu));
        g0 += res;
        g1 += static_cast<long double>(r[0]) * res;
        g2 += static_cast<long double>(r[1]) * res;
        h00 += w;
        h01 += static_cast<long double>(w) * r[0];
        h02 += static_cast<long double>(w) * r[1];
        h11 += static_cast<long double>(w) * r[0] * r[0];
        h12 += static_cast<long double>(w) * r[0] * r[1];
        h22 += static_cast<long double>(w) * r[1] * r[1];
    }
    ScoreInfo out;
    out.max_interior = max_interior;
    out.score = {static_cast<double>(g0), static_cast<double>(g1), static_cast<double>(g2)};
    out.info(0, 0) = static_cast<double>(h00);
    out.info(0, 1) = out.info(1, 0) = static_cast<double>(h01);
    out.info(0, 2) = out.info(2, 0) = static_cast<double>(h02);
    out.info(1, 1) = static_cast<double>(h11);
    out.info(1, 2) = out.info(2, 1) = static_cast<double>(h12);
    out.info(2, 2) = static_cast<double>(h22);
    return out;
}

}  // namespace detail

// Maximum-likelihood logit via iteratively reweighted least squares with
// step-halving. Converged means the score max-norm fell below tol; complete
// separation or an exhausted iteration budget is reported as converged =
// false with the last iterate, never silently as a valid fit.
inline LogitFit fit_logit_irls(std::span<const FitRow> rows, double tol = 1e-8,
                               int max_iter = 50) {
    const std::size_t n = rows.size();
    if (n <= 3) throw std::invalid_argument("fit_logit_irls: need n > 3");
    std::size_t n_ones = 0;
    for (const auto& r : rows) {
        if (r[2] != 0.0 && r[2] != 1.0)
            throw std::invalid_argument("fit_logit_irls: outcomes must be 0 or 1");
        if (r[2] == 1.0) ++n_ones;
    }
    if (n_ones == 0 || n_ones == n)
        throw std::invalid_argument("fit_logit_irls: outcome is degenerate (single class)");

    std::array<double, 3> beta = {
        logit((static_cast<double>(n_ones) + 0.5) / (static_cast<double>(n) + 1.0)), 0.0, 0.0};
    bool converged = false;

    for (int iter = 0; iter < max_iter; ++iter) {
        const auto si = detail::logit_score_info(rows, beta);
        const double gmax = std::max({std::abs(si.score[0]), std::abs(si.score[1]),
                                      std::abs(si.score[2])});
        if (gmax <= tol) {
            // a zero score with every fitted probability saturated at 0 or 1
            // is perfect classification: the MLE is at infinity (separation)
            converged = si.max_interior > 1e-6;
            break;
        }
        std::vector<double> step;
        try {
            step = solve_spd(si.info, si.score);
        } catch (const not_positive_definite&) {
            break;  // information matrix collapsed, treat as non-convergence
        }
        const double ll_old = detail::logit_loglik(rows, beta);
        std::array<double, 3> next = beta;
        bool accepted = false;
        for (int half = 0; half < 30; ++half) {
            for (std::size_t k = 0; k < 3; ++k) next[k] = beta[k] + step[k];
            if (detail::logit_loglik(rows, next) >= ll_old - 1e-12) {
                accepted = true;
                break;
            }
            for (double& s : step) s *= 0.5;
        }
        if (!accepted) break;
        beta = next;
        if (std::max({std::abs(beta[0]), std::abs(beta[1]), std::abs(beta[2])}) > 1e4)
            break;  // separation: coefficients are running away
    }

    LogitFit fit;
    fit.n = n;
    fit.converged = converged;
    fit.intercept = beta[0];
    fit.coef_dist_e = beta[1];
    fit.coef_dist_s = beta[2];
    try {
        const Matrix cov = spd_inverse(detail::logit_score_info(rows, beta).info);
        fit.se_intercept = std::sqrt(std::max(0.0, cov(0, 0)));
        fit.se_dist_e = std::sqrt(std::max(0.0, cov(1, 1)));
        fit.se_dist_s = std::sqrt(std::max(0.0, cov(2, 2)));
    } catch (const not_positive_definite&) {
        fit.se_intercept = fit.se_dist_e = fit.se_dist_s = 0.0;
    }
    return fit;
}

// Rows feeding one stage-1 cell: the party group with self-placements and the
// (candidate, dimension) outcome present.
inline std::vector<FitRow> stage1_rows(const SurveyDataset& ds, Candidate c, Dimension d,
                                       Party p) {
    std::vector<FitRow> rows;
    for (const Respondent& r : ds.respondents) {
        if (r.party_id != p || !r.econ_self || !r.soc_self) continue;
        const std::optional<double>& outcome =
            c == Candidate::Bush ? (d == Dimension::Econ ? r.econ_bush : r.soc_bush)
                                 : (d == Dimension::Econ ? r.econ_kerry : r.soc_kerry);
        if (!outcome) continue;
        rows.push_back({*r.econ_self, *r.soc_self, *outcome});
    }
    return rows;
}

// Rows feeding one stage-2 fit: stage-2-eligible members of the party group,
// undecideds excluded.
inline std::vector<FitRow> stage2_rows(const SurveyDataset& ds, Party p) {
    std::vector<FitRow> rows;
    for (const Respondent& r : ds.respondents) {
        if (r.party_id != p || !stage2_eligible(r)) continue;
        const auto [de, dsoc] = distances(r);
        rows.push_back({de, dsoc, r.vote == Vote::Bush ? 1.0 : 0.0});
    }
    return rows;
}

// The full three-step fit: 12 per-group perception regressions and 3
// per-group vote logits. Fails atomically, reporting every broken cell.
inline std::pair<PerceptionModel, ChoiceModel> fit_all(const SurveyDataset& ds) {
    PerceptionModel pm;
    ChoiceModel cm;
    std::vector<std::string> errors;

    for (const Candidate c : kCandidates)
        for (const Dimension d : kDimensions)
            for (const Party p : kParties) {
                const std::string cell = std::string("perception ") +
                                         std::string(candidate_name(c)) + '/' +
                                         std::string(dimension_name(d)) + '/' +
                                         std::string(party_name(p));
                try {
                    const auto rows = stage1_rows(ds, c, d, p);
                    if (rows.empty()) throw std::invalid_argument("no usable rows in group");
                    pm.at(c, d, p) = fit_ols(rows);
                } catch (const std::exception& e) {
                    errors.push_back(cell + ": " + e.what());
                }
            }

    for (const Party p : kParties) {
        const std::string cell = std::string("choice ") + std::string(party_name(p));
        try {
            const auto rows = stage2_rows(ds, p);
            if (rows.empty()) throw std::invalid_argument("no usable rows in group");
            cm.at(p) = fit_logit_irls(rows);
        } catch (const std::exception& e) {
            errors.push_back(cell + ": " + e.what());
        }
    }

    if (!errors.empty()) {
        std::string msg = "fit_all failed:";
        for (const std::string& e : errors) msg += "\n  " + e;
        throw std::runtime_error(msg);
    }
    return {pm, cm};
}

}  // namespace svote
