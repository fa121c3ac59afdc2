#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "svote/models.hpp"
#include "svote/parallel.hpp"
#include "svote/rng.hpp"
#include "svote/survey.hpp"
#include "svote/util.hpp"

namespace svote {

// A hypothetical move of one candidate's perceived position, in scale units.
struct ShiftSpec {
    Candidate candidate = Candidate::Kerry;
    double delta_econ = 0.0;
    double delta_soc = 0.0;

    void validate() const {
        if (!std::isfinite(delta_econ) || !std::isfinite(delta_soc))
            throw std::invalid_argument("ShiftSpec: deltas must be finite");
    }
};

// Adds the deltas to the candidate's three per-party intercepts on each
// dimension; everything else is untouched and the input is not modified.
inline PerceptionModel apply_shift(const PerceptionModel& pm, const ShiftSpec& s) {
    s.validate();
    PerceptionModel out = pm;
    out.add_shift(s.candidate, Dimension::Econ, s.delta_econ);
    out.add_shift(s.candidate, Dimension::Soc, s.delta_soc);
    return out;
}

struct ElectionResult {
    double bush_share = 0.0;  // among decided voters
    double mc_se = 0.0;
    std::size_t draws = 0;

    bool operator==(const ElectionResult&) const = default;
};

// One replicated election: per draw, every stage-2-eligible respondent gets
// fresh perceived candidate positions from the stage-1 fits (own
// self-placements as covariates, normal residual noise), distances are
// recomputed, and a Bernoulli vote is drawn from the stage-2 logit. The
// result averages over respondents and draws.
inline ElectionResult simulate_election(const PerceptionModel& pm, const ChoiceModel& cm,
                                        const SurveyDataset& ds, std::size_t draws = 100,
                                        std::uint64_t seed = 0, unsigned n_workers = 1) {
    if (draws < 1) throw std::invalid_argument("simulate_election: need draws >= 1");
    for (const Party p : kParties)
        if (!cm.at(p).converged)
            throw std::invalid_argument("simulate_election: choice model for " +
                                        std::string(party_name(p)) + " did not converge");

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < ds.respondents.size(); ++i)
        if (stage2_eligible(ds.respondents[i])) eligible.push_back(i);
    if (eligible.empty())
        throw std::invalid_argument("simulate_election: no stage-2-eligible respondents");
    const std::size_t n = eligible.size();

    std::vector<std::vector<std::uint64_t>> part(plan_workers(n, n_workers),
                                                 std::vector<std::uint64_t>(draws, 0));
    parallel_for(n, n_workers, [&](unsigned w, std::size_t lo, std::size_t hi) {
        std::vector<std::uint64_t>& counts = part[w];
        for (std::size_t k = lo; k < hi; ++k) {
            const std::size_t idx = eligible[k];
            const Respondent& r = ds.respondents[idx];
            const Party p = r.party_id;
            const double e_self = *r.econ_self;
            const double s_self = *r.soc_self;
            const LogitFit& choice = cm.at(p);
            for (std::size_t t = 0; t < draws; ++t) {
                CounterRng perc(substream(seed, {stream::kSimPerceived, idx, t}));
                const auto perceived = [&](Candidate c, Dimension d) {
                    const LinearFit& f = pm.at(c, d, p);
                    return pm.intercept_at(c, d, p) + f.coef_econ_self * e_self +
                           f.coef_soc_self * s_self + f.residual_sd * perc.next_normal();
                };
                const double be = perceived(Candidate::Bush, Dimension::Econ);
                const double ke = perceived(Candidate::Kerry, Dimension::Econ);
                const double bs = perceived(Candidate::Bush, Dimension::Soc);
                const double ks = perceived(Candidate::Kerry, Dimension::Soc);
                const double dist_e = (be - e_self) * (be - e_self) - (ke - e_self) * (ke - e_self);
                const double dist_s = (bs - s_self) * (bs - s_self) - (ks - s_self) * (ks - s_self);
                const double prob = predict_logit(choice, dist_e, dist_s);
                CounterRng vote(substream(seed, {stream::kSimVote, idx, t}));
                if (vote.next_uniform() < prob) ++counts[t];
            }
        }
    });

    std::vector<std::uint64_t> per_draw(draws, 0);
    for (const auto& counts : part)
        for (std::size_t t = 0; t < draws; ++t) per_draw[t] += counts[t];

    std::uint64_t total = 0;
    for (const std::uint64_t c : per_draw) total += c;

    ElectionResult out;
    out.draws = draws;
    out.bush_share = static_cast<double>(total) / (static_cast<double>(n) * static_cast<double>(draws));
    if (draws == 1) {
        out.mc_se = std::sqrt(out.bush_share * (1.0 - out.bush_share) / static_cast<double>(n));
    } else {
        double ss = 0.0;
        for (const std::uint64_t c : per_draw) {
            const double s = static_cast<double>(c) / static_cast<double>(n) - out.bush_share;
            ss += s * s;
        }
        out.mc_se = std::sqrt(ss / static_cast<double>(draws - 1) / static_cast<double>(draws));
    }
    return out;
}

struct SweepPoint {
    double delta_econ = 0.0;
    double delta_soc = 0.0;
    ElectionResult result;
};

struct SweepResult {
    Candidate candidate = Candidate::Kerry;
    std::vector<SweepPoint> points;
    ElectionResult baseline;  // zero shift, same seed
    std::size_t draws = 0;
};

// Sweep over shifts of one candidate along one dimension. Common random
// numbers: every grid point reuses the same substreams, so adjacent points
// differ only through the intercept change.
inline SweepResult sweep_1d(const PerceptionModel& pm, const ChoiceModel& cm,
                            const SurveyDataset& ds, Candidate cand, Dimension dim,
                            double lo = -3.0, double hi = 3.0, double step = 0.25,
                            std::size_t draws = 100, std::uint64_t seed = 0,
                            unsigned n_workers = 1) {
    SweepResult out;
    out.candidate = cand;
    out.draws = draws;
    out.baseline = simulate_election(pm, cm, ds, draws, seed, n_workers);
    for (const double delta : grid_values(lo, hi, step)) {
        ShiftSpec s;
        s.candidate = cand;
        (dim == Dimension::Econ ? s.delta_econ : s.delta_soc) = delta;
        const PerceptionModel shifted = apply_shift(pm, s);
        out.points.push_back(
            {s.delta_econ, s.delta_soc, simulate_election(shifted, cm, ds, draws, seed, n_workers)});
    }
    return out;
}

// Product grid over economic and social shifts of one candidate.
inline SweepResult sweep_2d(const PerceptionModel& pm, const ChoiceModel& cm,
                            const SurveyDataset& ds, Candidate cand, double econ_lo,
                            double econ_hi, double econ_step, double soc_lo, double soc_hi,
                            double soc_step, std::size_t draws = 100, std::uint64_t seed = 0,
                            unsigned n_workers = 1) {
    SweepResult out;
    out.candidate = cand;
    out.draws = draws;
    out.baseline = simulate_election(pm, cm, ds, draws, seed, n_workers);
    for (const double de : grid_values(econ_lo, econ_hi, econ_step))
        for (const double dsoc : grid_values(soc_lo, soc_hi, soc_step)) {
            const ShiftSpec s{cand, de, dsoc};
            const PerceptionModel shifted = apply_shift(pm, s);
            out.points.push_back(
                {de, dsoc, simulate_election(shifted, cm, ds, draws, seed, n_workers)});
        }
    return out;
}

// CSV: delta_econ,delta_soc,bush_share,mc_se,draws,baseline with the
// zero-shift baseline as a final flagged row.
inline void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
    os << "delta_econ,delta_soc,bush_share,mc_se,draws,baseline\n";
    for (const SweepPoint& p : sweep.points)
        os << format_double(p.delta_econ) << ',' << format_double(p.delta_soc) << ','
           << format_double(p.result.bush_share) << ',' << format_double(p.result.mc_se) << ','
           << p.result.draws << ",0\n";
    os << "0,0," << format_double(sweep.baseline.bush_share) << ','
       << format_double(sweep.baseline.mc_se) << ',' << sweep.baseline.draws << ",1\n";
}

// Flat JSON summary: baseline plus the argmax/argmin shift cells and their
// changes against the baseline.
inline std::string sweep_summary_json(const SweepResult& sweep) {
    if (sweep.points.empty()) throw std::invalid_argument("sweep summary: empty sweep");
    std::size_t imax = 0, imin = 0;
    for (std::size_t i = 1; i < sweep.points.size(); ++i) {
        if (sweep.points[i].result.bush_share > sweep.points[imax].result.bush_share) imax = i;
        if (sweep.points[i].result.bush_share < sweep.points[imin].result.bush_share) imin = i;
    }
    const auto cell = [&](const SweepPoint& p) {
        std::ostringstream os;
        os << "{\"delta_econ\": " << format_double(p.delta_econ)
           << ", \"delta_soc\": " << format_double(p.delta_soc)
           << ", \"bush_share\": " << format_double(p.result.bush_share)
           << ", \"mc_se\": " << format_double(p.result.mc_se)
           << ", \"change_vs_baseline\": "
           << format_double(p.result.bush_share - sweep.baseline.bush_share) << "}";
        return os.str();
    };
    std::ostringstream os;
    os << "{\n";
    os << "  \"candidate\": \"" << candidate_name(sweep.candidate) << "\",\n";
    os << "  \"draws\": " << sweep.draws << ",\n";
    os << "  \"n_points\": " << sweep.points.size() << ",\n";
    os << "  \"baseline\": {\"bush_share\": " << format_double(sweep.baseline.bush_share)
       << ", \"mc_se\": " << format_double(sweep.baseline.mc_se) << "},\n";
    os << "  \"argmax\": " << cell(sweep.points[imax]) << ",\n";
    os << "  \"argmin\": " << cell(sweep.points[imin]) << "\n";
    os << "}\n";
    return os.str();
}

}  // namespace svote
