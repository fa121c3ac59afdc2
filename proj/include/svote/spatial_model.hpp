#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "svote/electorate.hpp"
#include "svote/geometry.hpp"
#include "svote/parallel.hpp"
#include "svote/rng.hpp"
#include "svote/util.hpp"

namespace svote {

// D's vote share with its Monte Carlo standard error.
struct ShareEstimate {
    double share = 0.0;
    double mc_se = 0.0;
    std::size_t n_voters = 0;
    std::size_t draws = 1;
};

// One-axis sweep grid; both endpoints covered within half a step.
struct PositionGrid {
    std::size_t axis = 0;
    double lo = -2.0;
    double hi = 2.0;
    double step = 0.1;

    std::vector<double> values() const { return grid_values(lo, hi, step); }
};

// Perception-noise settings for share evaluations. sigma may be empty (no
// noise), a single value broadcast to all dimensions, or one value per
// dimension.
struct NoiseConfig {
    std::vector<double> sigma;
    std::size_t draws = 1;
    std::uint64_t seed = 0;

    bool active() const {
        for (const double s : sigma)
            if (s != 0.0) return true;
        return false;
    }
};

namespace detail {

inline std::vector<double> expand_sigma(const std::vector<double>& sigma, std::size_t d) {
    std::vector<double> out(d, 0.0);
    if (sigma.empty()) return out;
    if (sigma.size() != 1 && sigma.size() != d)
        throw std::invalid_argument("sigma: give one value or one per dimension");
    for (const double s : sigma)
        if (!(s >= 0.0) || !std::isfinite(s))
            throw std::invalid_argument("sigma: values must be finite and >= 0");
    for (std::size_t j = 0; j < d; ++j) out[j] = sigma.size() == 1 ? sigma[0] : sigma[j];
    return out;
}

inline double tie_credit(Preference p, TieRule) {
    switch (p) {
        case Preference::Democrat: return 1.0;
        case Preference::Republican: return 0.0;
        default: return 0.5;
    }
}

}  // namespace detail

// Share of the electorate preferring D over R; exact ties contribute half a
// vote each under the default rule.
inline ShareEstimate vote_share(const Electorate& e, const IdealPoint& d_pos,
                                const IdealPoint& r_pos, const Metric& m, const Valence& v,
                                TieRule tie = TieRule::Split, unsigned n_workers = 1) {
    const std::size_t d = e.dim();
    if (d_pos.dim() != d || r_pos.dim() != d || m.dim() != d)
        throw std::invalid_argument("vote_share: dimension mismatch");
    const std::size_t n = e.size();

    std::vector<double> partial(plan_workers(n, n_workers), 0.0);
    parallel_for(n, n_workers, [&](unsigned w, std::size_t lo, std::size_t hi) {
        double count = 0.0;  // multiples of 0.5, exact in double
        for (std::size_t i = lo; i < hi; ++i)
            count += detail::tie_credit(preferred_party(e.voter(i), d_pos.span(), r_pos.span(), m, v, tie), tie);
        partial[w] = count;
    });
    double count = 0.0;
    for (const double c : partial) count += c;

    ShareEstimate out;
    out.n_voters = n;
    out.draws = 1;
    out.share = count / static_cast<double>(n);
    out.mc_se = std::sqrt(out.share * (1.0 - out.share) / static_cast<double>(n));
    return out;
}

// Each voter x draw perceives both candidates at their true positions plus
// independent N(0, sigma_j^2) noise per dimension per candidate. sigma = 0
// reproduces vote_share exactly.
inline ShareEstimate vote_share_noisy(const Electorate& e, const IdealPoint& d_pos,
                                      const IdealPoint& r_pos, const Metric& m, const Valence& v,
                                      const std::vector<double>& sigma, std::size_t draws,
                                      std::uint64_t seed, TieRule tie = TieRule::Split,
                                      unsigned n_workers = 1) {
    const std::size_t d = e.dim();
    if (d_pos.dim() != d || r_pos.dim() != d || m.dim() != d)
        throw std::invalid_argument("vote_share_noisy: dimension mismatch");
    if (draws < 1) throw std::invalid_argument("vote_share_noisy: need draws >= 1");
    const std::vector<double> sig = detail::expand_sigma(sigma, d);
    const std::size_t n = e.size();

    std::vector<std::vector<double>> part(plan_workers(n, n_workers),
                                          std::vector<double>(draws, 0.0));
    parallel_for(n, n_workers, [&](unsigned w, std::size_t lo, std::size_t hi) {
        std::vector<double>& counts = part[w];
        std::vector<double> dp(d), rp(d);
        for (std::size_t i = lo; i < hi; ++i) {
            const auto voter = e.voter(i);
            for (std::size_t t = 0; t < draws; ++t) {
                CounterRng g(substream(seed, {stream::kPerceptionNoise, i, t}));
                for (std::size_t j = 0; j < d; ++j) dp[j] = d_pos[j] + sig[j] * g.next_normal();
                for (std::size_t j = 0; j < d; ++j) rp[j] = r_pos[j] + sig[j] * g.next_normal();
                counts[t] += detail::tie_credit(preferred_party(voter, dp, rp, m, v, tie), tie);
            }
        }
    });
    std::vector<double> per_draw(draws, 0.0);
    for (const auto& counts : part)
        for (std::size_t t = 0; t < draws; ++t) per_draw[t] += counts[t];

    double total = 0.0;
    for (const double c : per_draw) total += c;

    ShareEstimate out;
    out.n_voters = n;
    out.draws = draws;
    out.share = total / static_cast<double>(n * draws);
    if (draws == 1) {
        out.mc_se = std::sqrt(out.share * (1.0 - out.share) / static_cast<double>(n));
    } else {
        double ss = 0.0;
        for (const double c : per_draw) {
            const double s = c / static_cast<double>(n) - out.share;
            ss += s * s;
        }
        out.mc_se = std::sqrt(ss / static_cast<double>(draws - 1) / static_cast<double>(draws));
    }
    return out;
}

inline ShareEstimate evaluate_share(const Electorate& e, const IdealPoint& d_pos,
                                    const IdealPoint& r_pos, const Metric& m, const Valence& v,
                                    const NoiseConfig& noise, TieRule tie = TieRule::Split,
                                    unsigned n_workers = 1) {
    if (!noise.active() && noise.draws == 1)
        return vote_share(e, d_pos, r_pos, m, v, tie, n_workers);
    return vote_share_noisy(e, d_pos, r_pos, m, v, noise.sigma, noise.draws, noise.seed, tie,
                            n_workers);
}

// Share as a function of D's position along one axis, all other coordinates
// fixed at the template. Common random numbers: every grid point sees the
// same electorate and the same noise substreams.
inline std::vector<std::pair<double, ShareEstimate>> share_curve(
    const Electorate& e, const IdealPoint& r_pos, const IdealPoint& d_template,
    const PositionGrid& grid, const Metric& m, const Valence& v, const NoiseConfig& noise = {},
    TieRule tie = TieRule::Split, unsigned n_workers = 1) {
    if (grid.axis >= e.dim()) throw std::invalid_argument("share_curve: grid axis out of range");
    std::vector<std::pair<double, ShareEstimate>> out;
    for (const double x : grid.values()) {
        IdealPoint d_pos = d_template;
        d_pos[grid.axis] = x;
        out.emplace_back(x, evaluate_share(e, d_pos, r_pos, m, v, noise, tie, n_workers));
    }
    return out;
}

// Curve CSV: axis_value,d_share,mc_se,n_voters,draws.
inline void write_curve_csv(std::ostream& os,
                            const std::vector<std::pair<double, ShareEstimate>>& curve) {
    os << "axis_value,d_share,mc_se,n_voters,draws\n";
    for (const auto& [x, s] : curve)
        os << format_double(x) << ',' << format_double(s.share) << ',' << format_double(s.mc_se)
           << ',' << s.n_voters << ',' << s.draws << '\n';
}

// Half-open interval [lo, hi) an axis may range over during optimization.
struct AxisBounds {
    double lo = -3.0;
    double hi = 3.0;
};

struct OptimizeResult {
    IdealPoint position;
    ShareEstimate share;
};

namespace detail {

inline std::vector<double> axis_candidates(double span_lo, double span_hi, double step,
                                           double hard_hi) {
    std::vector<double> out;
    const double eps = step * 1e-9;
    for (std::size_t k = 0;; ++k) {
        const double c = span_lo + static_cast<double>(k) * step;
        if (c > span_hi + eps || c >= hard_hi - eps) break;
        out.push_back(c);
    }
    if (out.empty()) out.push_back(span_lo);
    return out;
}

}  // namespace detail

// Deterministic coarse-to-fine grid search over one or two free axes of D's
// position; each refinement shrinks the step tenfold around the incumbent
// best. Ties break toward the lexicographically smallest coordinates.
inline OptimizeResult optimize_position(const Electorate& e, const IdealPoint& r_pos,
                                        const IdealPoint& d_template,
                                        const std::vector<std::size_t>& free_axes,
                                        const std::vector<AxisBounds>& bounds, const Metric& m,
                                        const Valence& v, double coarse_step = 0.1,
                                        int refine_rounds = 2, const NoiseConfig& noise = {},
                                        TieRule tie = TieRule::Split, unsigned n_workers = 1) {
    if (free_axes.empty() || free_axes.size() > 2)
        throw std::invalid_argument("optimize_position: need 1 or 2 free axes");
    if (bounds.size() != free_axes.size())
        throw std::invalid_argument("optimize_position: one bounds pair per free axis");
    for (const std::size_t a : free_axes)
        if (a >= e.dim()) throw std::invalid_argument("optimize_position: axis out of range");
    for (const auto& b : bounds)
        if (!(b.lo < b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi))
            throw std::invalid_argument("optimize_position: bounds must be finite with lo < hi");
    if (!(coarse_step > 0.0)) throw std::invalid_argument("optimize_position: step must be > 0");

    const std::size_t n_axes = free_axes.size();
    std::vector<double> best_coord(n_axes);
    ShareEstimate best_share;
    double step = coarse_step;

    for (int round = 0; round <= refine_rounds; ++round) {
        std::vector<std::vector<double>> cands(n_axes);
        for (std::size_t a = 0; a < n_axes; ++a) {
            if (round == 0) {
                cands[a] = detail::axis_candidates(bounds[a].lo, bounds[a].hi, step, bounds[a].hi);
            } else {
                const double lo = std::max(bounds[a].lo, best_coord[a] - step * 10.0);
                const double hi = best_coord[a] + step * 10.0;
                cands[a] = detail::axis_candidates(lo, hi, step, bounds[a].hi);
            }
        }
        bool have = false;
        std::vector<double> coord(n_axes);
        const std::size_t n1 = cands[0].size();
        const std::size_t n2 = n_axes == 2 ? cands[1].size() : 1;
        for (std::size_t i = 0; i < n1; ++i) {
            coord[0] = cands[0][i];
            for (std::size_t j = 0; j < n2; ++j) {
                if (n_axes == 2) coord[1] = cands[1][j];
                IdealPoint d_pos = d_template;
                for (std::size_t a = 0; a < n_axes; ++a) d_pos[free_axes[a]] = coord[a];
                const ShareEstimate s = evaluate_share(e, d_pos, r_pos, m, v, noise, tie, n_workers);
                if (!have || s.share > best_share.share) {
                    have = true;
                    best_share = s;
                    best_coord = coord;
                }
            }
        }
        step /= 10.0;
    }

    IdealPoint best_pos = d_template;
    for (std::size_t a = 0; a < n_axes; ++a) best_pos[free_axes[a]] = best_coord[a];
    return OptimizeResult{std::move(best_pos), best_share};
}

}  // namespace svote
