#include "svote/spatial_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"

using namespace svote;

namespace {

const Metric kL2_1 = Metric::squared_euclidean(1);
const Metric kL2_2 = Metric::squared_euclidean(2);
const Metric kL2_3 = Metric::squared_euclidean(3);

std::size_t argmax_index(const std::vector<std::pair<double, ShareEstimate>>& curve) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (curve[i].second.share > curve[best].second.share) best = i;
    return best;
}

}  // namespace

TEST(VoteShare, OneDimNearRepublican) {
    // D just left of R at +2: share approaches Phi((D + R)/2)
    const auto e = sample_electorate(CorrelationSpec(1, 0.0), 100000, 3);
    const auto s = vote_share(e, IdealPoint{1.9999}, IdealPoint{2.0}, kL2_1, Valence{});
    const double expected = static_cast<double>(oracle::phi_series(1.99995L));
    EXPECT_NEAR(s.share, expected, 4.0 * 0.5 / std::sqrt(100000.0));
    EXPECT_GT(s.share, 0.90);
}

TEST(VoteShare, SymmetricConfigurationIsEven) {
    const auto e = sample_electorate(CorrelationSpec(1, 0.0), 100000, 9);
    const auto s = vote_share(e, IdealPoint{-1.0}, IdealPoint{1.0}, kL2_1, Valence{});
    EXPECT_NEAR(s.share, 0.5, 4.0 * 0.5 / std::sqrt(100000.0));
}

TEST(VoteShare, FigureTwoAConfiguration) {
    // more of this sample sits closer to R; the exact value must agree with a
    // naive recount
    const auto e = sample_electorate(CorrelationSpec(2, 0.5), 10000, 5);
    const auto s = vote_share(e, IdealPoint{1, -2}, IdealPoint{2, 1}, kL2_2, Valence{});
    EXPECT_LT(s.share, 0.5);
    EXPECT_EQ(s.share,
              oracle::brute_force_share(e, IdealPoint{1, -2}.span(), IdealPoint{2, 1}.span()));
    EXPECT_NEAR(s.share,
                oracle::analytic_share(2, 0.5, IdealPoint{1, -2}.span(), IdealPoint{2, 1}.span()),
                4.0 * s.mc_se);
}

TEST(VoteShare, BruteForceEquivalenceSmallElectorates) {
    CounterRng g(substream(404, {1}));
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t d = 1 + (g.next_u64() % 3);
        const std::size_t n = 100 + (g.next_u64() % 901);
        const auto e = sample_electorate(CorrelationSpec(d, d >= 2 ? 0.3 : 0.0), n,
                                         1000 + static_cast<std::uint64_t>(rep));
        std::vector<double> dp(d), rp(d), w(d);
        for (std::size_t j = 0; j < d; ++j) {
            dp[j] = 4.0 * (g.next_uniform() - 0.5);
            rp[j] = 4.0 * (g.next_uniform() - 0.5);
            w[j] = 0.5 + g.next_uniform();
        }
        const bool abs_metric = (g.next_u64() & 1) != 0;
        const double shift = (g.next_u64() % 3 == 0) ? 0.25 : 0.0;
        const auto m = Metric::weighted(
            abs_metric ? MetricKind::AbsoluteValue : MetricKind::SquaredEuclidean, w);
        const unsigned workers = 1 + static_cast<unsigned>(g.next_u64() % 4);
        const auto s = vote_share(e, IdealPoint(dp), IdealPoint(rp), m, Valence{shift},
                                  TieRule::Split, workers);
        EXPECT_EQ(s.share, oracle::brute_force_share(e, dp, rp, abs_metric, w, shift));
    }
}

TEST(VoteShare, PartySwapDualityIsExact) {
    CounterRng g(substream(505, {2}));
    for (const std::size_t n : {std::size_t{1024}, std::size_t{999}, std::size_t{4096},
                                std::size_t{637}}) {
        const auto e = sample_electorate(CorrelationSpec(2, 0.5), n, 77 + n);
        for (int rep = 0; rep < 10; ++rep) {
            const IdealPoint D{4 * (g.next_uniform() - .5), 4 * (g.next_uniform() - .5)};
            const IdealPoint R{4 * (g.next_uniform() - .5), 4 * (g.next_uniform() - .5)};
            const double s1 = vote_share(e, D, R, kL2_2, Valence{}).share;
            const double s2 = vote_share(e, R, D, kL2_2, Valence{}).share;
            EXPECT_EQ(s1 + s2, 1.0);
        }
    }
}

TEST(VoteShare, ValenceMonotonicity) {
    const auto e = sample_electorate(CorrelationSpec(2, 0.5), 5000, 21);
    double prev = -1.0;
    for (const double shift : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        const auto s = vote_share(e, IdealPoint{1, -2}, IdealPoint{2, 1}, kL2_2, Valence{shift});
        EXPECT_GE(s.share, prev);
        prev = s.share;
    }
}

TEST(VoteShare, McSeSanityBound) {
    CounterRng g(substream(606, {3}));
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 200 + (g.next_u64() % 2000);
        const auto e =
            sample_electorate(CorrelationSpec(1, 0.0), n, 3000 + static_cast<std::uint64_t>(rep));
        const auto s = vote_share(e, IdealPoint{0.5}, IdealPoint{1.0}, kL2_1, Valence{});
        EXPECT_LE(s.mc_se, 2.0 * 0.5 / std::sqrt(static_cast<double>(n)));
        const std::size_t draws = 2 + (g.next_u64() % 8);
        const auto sn = vote_share_noisy(e, IdealPoint{0.5}, IdealPoint{1.0}, kL2_1, Valence{},
                                         {0.4}, draws, 17);
        EXPECT_LE(sn.mc_se, 2.0 * 0.5 / std::sqrt(static_cast<double>(n * draws)));
    }
}

TEST(VoteShareNoisy, ZeroSigmaReproducesNoiseFreePathExactly) {
    const auto e = sample_electorate(CorrelationSpec(2, 0.5), 3000, 8);
    const auto plain = vote_share(e, IdealPoint{1, -2}, IdealPoint{2, 1}, kL2_2, Valence{0.3});
    const auto noisy = vote_share_noisy(e, IdealPoint{1, -2}, IdealPoint{2, 1}, kL2_2,
                                        Valence{0.3}, {0.0, 0.0}, 1, 999);
    EXPECT_EQ(plain.share, noisy.share);
    EXPECT_EQ(plain.mc_se, noisy.mc_se);
    EXPECT_EQ(plain.n_voters, noisy.n_voters);
    EXPECT_EQ(plain.draws, noisy.draws);
}

TEST(VoteShareNoisy, SymmetricStaysEven) {
    const auto e = sample_electorate(CorrelationSpec(1, 0.0), 20000, 4);
    const auto s =
        vote_share_noisy(e, IdealPoint{-1.0}, IdealPoint{1.0}, kL2_1, Valence{}, {0.5}, 10, 55);
    EXPECT_NEAR(s.share, 0.5, 4.0 * 0.5 / std::sqrt(20000.0));
}

TEST(VoteShareNoisy, UncertaintyPunishesHuggingTheRival) {
    // with sigma = 0.5 the position 1.9999 is no longer near-optimal: its
    // share collapses toward a coin flip and the curve peaks well left of 1.9
    const auto e = sample_electorate(CorrelationSpec(1, 0.0), 10000, 5);
    const auto noise_free = vote_share(e, IdealPoint{1.9999}, IdealPoint{2.0}, kL2_1, Valence{});
    const auto noisy = vote_share_noisy(e, IdealPoint{1.9999}, IdealPoint{2.0}, kL2_1, Valence{},
                                        {0.5}, 20, 123);
    EXPECT_LT(noisy.share, noise_free.share);

    const PositionGrid grid{0, -3.0, 2.0, 0.05};
    const NoiseConfig noise{{0.5}, 20, 123};
    const auto curve =
        share_curve(e, IdealPoint{2.0}, IdealPoint{1.0}, grid, kL2_1, Valence{}, noise);
    const std::size_t best = argmax_index(curve);
    EXPECT_LT(curve[best].first, 1.9);
    EXPECT_GT(curve[best].second.share, 0.8);
}

TEST(VoteShareNoisy, RejectsBadArguments) {
    const auto e = sample_electorate(CorrelationSpec(1, 0.0), 100, 1);
    EXPECT_THROW(
        vote_share_noisy(e, IdealPoint{0.0}, IdealPoint{1.0}, kL2_1, Valence{}, {0.5}, 0, 1),
        std::invalid_argument);
    EXPECT_THROW(
        vote_share_noisy(e, IdealPoint{0.0}, IdealPoint{1.0}, kL2_1, Valence{}, {-0.5}, 1, 1),
        std::invalid_argument);
    EXPECT_THROW(vote_share(e, IdealPoint{0.0, 0.0}, IdealPoint{1.0}, kL2_1, Valence{}),
                 std::invalid_argument);
}

TEST(ShareCurve, FigureThreeAConfiguration) {
    const auto e = sample_electorate(CorrelationSpec(2, 0.5), 10000, 1);
    const PositionGrid grid{0, -2.0, 2.0, 0.1};
    const auto curve = share_curve(e, IdealPoint{2, 1}, IdealPoint{1, -2}, grid, kL2_2, Valence{});
    ASSERT_EQ(curve.size(), 41u);
    EXPECT_NEAR(curve.front().first, -2.0, 1e-12);
    EXPECT_NEAR(curve.back().first, 2.0, 1e-12);

    const double x_star = curve[argmax_index(curve)].first;
    EXPECT_GT(x_star, 0.0);
    EXPECT_LT(x_star, 1.0);

    double d_min = 1.0, d_max = 0.0;
    for (const auto& [x, s] : curve) {
        d_min = std::min(d_min, s.share);
        d_max = std::max(d_max, s.share);
    }
    // R's share over the curve stays within [0.40, 0.70]
    EXPECT_GE(1.0 - d_max, 0.40);
    EXPECT_LE(1.0 - d_min, 0.70);

    // every point agrees with the closed-form Gaussian half-space oracle
    for (const auto& [x, s] : curve) {
        const IdealPoint d_pos{x, -2.0};
        EXPECT_NEAR(s.share,
                    oracle::analytic_share(2, 0.5, d_pos.span(), IdealPoint{2, 1}.span()),
                    4.5 * 0.5 / std::sqrt(10000.0))
            << "x=" << x;
    }
}

TEST(ShareCurve, FigureThreeBConfiguration) {
    const auto e = sample_electorate(CorrelationSpec(3, 0.5), 10000, 1);
    const PositionGrid grid{0, -2.0, 2.0, 0.1};
    const auto curve =
        share_curve(e, IdealPoint{2, 1, 1}, IdealPoint{1, -1, -2}, grid, kL2_3, Valence{});
    const std::size_t best = argmax_index(curve);
    std::size_t at_one = 0;
    for (std::size_t i = 0; i < curve.size(); ++i)
        if (std::abs(curve[i].first - 1.0) < 1e-9) at_one = i;
    // moving left from the x = +1 status quo helps D
    EXPECT_LT(curve[best].first, 1.0);
    EXPECT_GT(curve[best].second.share, curve[at_one].second.share);
}

TEST(ShareCurve, CommonRandomNumbersAreReproducibleAndSmooth) {
    const auto e = sample_electorate(CorrelationSpec(2, 0.5), 4000, 14);
    const PositionGrid grid{0, -1.0, 1.0, 0.1};
    const NoiseConfig noise{{0.3, 0.3}, 5, 321};
    const auto a = share_curve(e, IdealPoint{2, 1}, IdealPoint{1, -2}, grid, kL2_2, Valence{},
                               noise);
    const auto b = share_curve(e, IdealPoint{2, 1}, IdealPoint{1, -2}, grid, kL2_2, Valence{},
                               noise);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].first, b[i].first);
        EXPECT_EQ(a[i].second.share, b[i].second.share);
        EXPECT_EQ(a[i].second.mc_se, b[i].second.mc_se);
    }

    // noise-free adjacent points can differ by at most the preference-flip rate
    const auto nf = share_curve(e, IdealPoint{2, 1}, IdealPoint{1, -2}, grid, kL2_2, Valence{});
    for (std::size_t i = 0; i + 1 < nf.size(); ++i) {
        double flips = 0.0;
        const IdealPoint d0{nf[i].first, -2.0};
        const IdealPoint d1{nf[i + 1].first, -2.0};
        for (std::size_t v = 0; v < e.size(); ++v) {
            if (preferred_party(e.voter(v), d0.span(), IdealPoint{2, 1}.span(), kL2_2,
                                Valence{}) !=
                preferred_party(e.voter(v), d1.span(), IdealPoint{2, 1}.span(), kL2_2, Valence{}))
                flips += 1.0;
        }
        EXPECT_LE(std::abs(nf[i + 1].second.share - nf[i].second.share),
                  flips / static_cast<double>(e.size()) + 1e-12);
    }
}

TEST(ShareCurve, WorkerCountNeverChangesTheCurve) {
    const auto e = sample_electorate(CorrelationSpec(2, 0.5), 3000, 6);
    const PositionGrid grid{0, -1.0, 1.0, 0.25};
    const NoiseConfig noise{{0.4}, 3, 777};
    const auto base = share_curve(e, IdealPoint{2, 1}, IdealPoint{1, -2}, grid, kL2_2, Valence{},
                                  noise, TieRule::Split, 1);
    for (unsigned workers : {2u, 5u}) {
        const auto alt = share_curve(e, IdealPoint{2, 1}, IdealPoint{1, -2}, grid, kL2_2,
                                     Valence{}, noise, TieRule::Split, workers);
        for (std::size_t i = 0; i < base.size(); ++i) {
            EXPECT_EQ(base[i].second.share, alt[i].second.share);
            EXPECT_EQ(base[i].second.mc_se, alt[i].second.mc_se);
        }
    }
}

TEST(PositionGrid, EndpointsAndValidation) {
    const PositionGrid g{0, -2.0, 2.0, 0.1};
    const auto v = g.values();
    ASSERT_EQ(v.size(), 41u);
    EXPECT_EQ(v.front(), -2.0);
    EXPECT_NEAR(v.back(), 2.0, 0.05);
    EXPECT_THROW((PositionGrid{0, 2.0, -2.0, 0.1}.values()), std::invalid_argument);
    EXPECT_THROW((PositionGrid{0, -2.0, 2.0, 0.0}.values()), std::invalid_argument);
    EXPECT_THROW(share_curve(sample_electorate(CorrelationSpec(1, 0.0), 10, 1), IdealPoint{2.0},
                             IdealPoint{1.0}, PositionGrid{3, -1.0, 1.0, 0.5}, kL2_1, Valence{}),
                 std::invalid_argument);
}

TEST(OptimizePosition, ApproachesRivalFromTheLeft) {
    const auto e = sample_electorate(CorrelationSpec(1, 0.0), 100000, 17);
    const auto r = optimize_position(e, IdealPoint{2.0}, IdealPoint{1.0}, {0}, {{-3.0, 2.0}},
                                     kL2_1, Valence{});
    EXPECT_GE(r.position[0], 1.99);
    EXPECT_LT(r.position[0], 2.0);
    EXPECT_NEAR(r.share.share, std_normal_cdf(2.0), 5.0 * 0.5 / std::sqrt(100000.0));
}

TEST(OptimizePosition, EconomicAxisOptimumRightOfCenter) {
    const auto e = sample_electorate(CorrelationSpec(2, 0.5), 10000, 1);
    const auto r = optimize_position(e, IdealPoint{2, 1}, IdealPoint{1, -2}, {0}, {{-2.0, 2.0}},
                                     kL2_2, Valence{});
    EXPECT_GT(r.position[0], 0.0);
    EXPECT_LT(r.position[0], 1.0);
    EXPECT_EQ(r.position[1], -2.0);
}

TEST(OptimizePosition, SymmetricProblemFindsTheCenter) {
    const auto e = sample_electorate(CorrelationSpec(1, 0.0), 100000, 17);
    const auto r = optimize_position(e, IdealPoint{0.0}, IdealPoint{1.0}, {0}, {{-2.0, 2.0}},
                                     kL2_1, Valence{});
    EXPECT_NEAR(r.position[0], 0.0, 0.15);
    EXPECT_NEAR(r.share.share, 0.5, 0.01);
}

TEST(OptimizePosition, RejectsBadArguments) {
    const auto e = sample_electorate(CorrelationSpec(2, 0.5), 100, 1);
    EXPECT_THROW(
        optimize_position(e, IdealPoint{2, 1}, IdealPoint{1, -2}, {}, {}, kL2_2, Valence{}),
        std::invalid_argument);
    EXPECT_THROW(optimize_position(e, IdealPoint{2, 1}, IdealPoint{1, -2}, {0, 1, 1},
                                   {{-1, 1}, {-1, 1}, {-1, 1}}, kL2_2, Valence{}),
                 std::invalid_argument);
    EXPECT_THROW(optimize_position(e, IdealPoint{2, 1}, IdealPoint{1, -2}, {0}, {{1.0, -1.0}},
                                   kL2_2, Valence{}),
                 std::invalid_argument);
    EXPECT_THROW(optimize_position(e, IdealPoint{2, 1}, IdealPoint{1, -2}, {5}, {{-1.0, 1.0}},
                                   kL2_2, Valence{}),
                 std::invalid_argument);
}

TEST(CurveCsv, ColumnsAndRowCount) {
    const auto e = sample_electorate(CorrelationSpec(1, 0.0), 500, 2);
    const auto curve = share_curve(e, IdealPoint{2.0}, IdealPoint{1.0},
                                   PositionGrid{0, -1.0, 1.0, 0.5}, kL2_1, Valence{});
    std::ostringstream os;
    write_curve_csv(os, curve);
    std::istringstream in(os.str());
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "axis_value,d_share,mc_se,n_voters,draws");
    std::string row;
    std::size_t rows = 0;
    while (std::getline(in, row)) ++rows;
    EXPECT_EQ(rows, curve.size());
}
