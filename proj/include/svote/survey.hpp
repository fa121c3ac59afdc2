#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "svote/models.hpp"
#include "svote/rng.hpp"
#include "svote/util.hpp"

namespace svote {

// Symmetric issue scale obtained by summing n_items question items.
struct IssueScale {
    std::string name;
    int n_items = 3;
    int lo = -9;
    int hi = 9;

    void validate() const {
        if (n_items < 1) throw std::invalid_argument("IssueScale: need n_items >= 1");
        if (hi <= 0 || lo != -hi)
            throw std::invalid_argument("IssueScale: bounds must be symmetric about 0");
    }
    bool contains(double x) const { return x >= lo && x <= hi; }
    bool operator==(const IssueScale&) const = default;
};

inline IssueScale economic_scale() { return IssueScale{"econ", 3, -9, 9}; }
inline IssueScale social_scale() { return IssueScale{"soc", 3, -8, 8}; }

// One survey respondent: six placements plus party id and vote intention.
// Missing placements are allowed; respondents drop out of whichever fits
// need the missing value (listwise deletion per stage).
struct Respondent {
    Party party_id = Party::Independent;
    std::optional<double> econ_self, soc_self;
    std::optional<double> econ_bush, econ_kerry;
    std::optional<double> soc_bush, soc_kerry;
    Vote vote = Vote::None;

    bool operator==(const Respondent&) const = default;
};

struct SurveyDataset {
    std::vector<Respondent> respondents;
    IssueScale econ_scale = economic_scale();
    IssueScale soc_scale = social_scale();
    std::string provenance;
};

inline bool has_all_placements(const Respondent& r) {
    return r.econ_self && r.soc_self && r.econ_bush && r.econ_kerry && r.soc_bush && r.soc_kerry;
}

// Eligible for the stage-2 vote-choice fit and for simulated elections.
inline bool stage2_eligible(const Respondent& r) {
    return has_all_placements(r) && r.vote != Vote::None;
}

// Signed squared-distance covariates; positive means farther from Bush than
// from Kerry on that dimension.
inline std::pair<double, double> distances(const Respondent& r) {
    if (!has_all_placements(r))
        throw std::invalid_argument("distances: respondent has missing placements");
    const double de = (*r.econ_bush - *r.econ_self) * (*r.econ_bush - *r.econ_self) -
                      (*r.econ_kerry - *r.econ_self) * (*r.econ_kerry - *r.econ_self);
    const double ds = (*r.soc_bush - *r.soc_self) * (*r.soc_bush - *r.soc_self) -
                      (*r.soc_kerry - *r.soc_self) * (*r.soc_kerry - *r.soc_self);
    return {de, ds};
}

struct IngestReport {
    struct Rejection {
        std::size_t line;
        std::string reason;
    };
    std::vector<Rejection> rejected;
    std::vector<std::string> notes;
    std::size_t n_loaded = 0;

    bool clean() const { return rejected.empty() && notes.empty(); }
};

// --- item-level scale construction -------------------------------------------

// Raw item scores for one respondent: three items per dimension per target.
struct ItemResponses {
    Party party_id = Party::Independent;
    Vote vote = Vote::None;
    std::array<std::optional<double>, 3> econ_self{}, soc_self{};
    std::array<std::optional<double>, 3> econ_bush{}, soc_bush{};
    std::array<std::optional<double>, 3> econ_kerry{}, soc_kerry{};
};

namespace detail {

inline std::optional<double> sum_items(const std::array<std::optional<double>, 3>& items,
                                       const char* what, IngestReport* report, std::size_t row) {
    double s = 0.0;
    for (std::size_t k = 0; k < items.size(); ++k) {
        if (!items[k]) {
            if (report)
                report->notes.push_back("row " + std::to_string(row) + ": missing item " +
                                        std::to_string(k) + " for " + what +
                                        ", placement dropped");
            return std::nullopt;
        }
        s += *items[k];
    }
    return s;
}

}  // namespace detail

// Placements are the plain sums of their three items; a missing item drops
// that placement and leaves a note in the report.
inline Respondent build_scales(const ItemResponses& items, IngestReport* report = nullptr,
                               std::size_t row = 0) {
    Respondent r;
    r.party_id = items.party_id;
    r.vote = items.vote;
    r.econ_self = detail::sum_items(items.econ_self, "econ_self", report, row);
    r.soc_self = detail::sum_items(items.soc_self, "soc_self", report, row);
    r.econ_bush = detail::sum_items(items.econ_bush, "econ_bush", report, row);
    r.soc_bush = detail::sum_items(items.soc_bush, "soc_bush", report, row);
    r.econ_kerry = detail::sum_items(items.econ_kerry, "econ_kerry", report, row);
    r.soc_kerry = detail::sum_items(items.soc_kerry, "soc_kerry", report, row);
    return r;
}

// --- CSV ingestion ------------------------------------------------------------

inline constexpr std::string_view kSurveyHeader =
    "party_id,econ_self,soc_self,econ_bush,econ_kerry,soc_bush,soc_kerry,vote";

namespace detail {

// Empty or NA fields are missing; anything else must parse as a number.
inline std::optional<double> parse_placement(std::string_view field, bool& bad) {
    const std::string_view t = trim(field);
    if (t.empty() || t == "NA") return std::nullopt;
    const auto v = parse_double(t);
    if (!v || !std::isfinite(*v)) {
        bad = true;
        return std::nullopt;
    }
    return v;
}

}  // namespace detail

// Loads the exact schema party_id,econ_self,...,vote. Rows with unparseable
// fields or out-of-bounds self-placements are rejected with their line
// numbers; perceived candidate placements may exceed the scale bounds.
inline std::pair<SurveyDataset, IngestReport> load_survey(std::istream& is,
                                                          IssueScale econ = economic_scale(),
                                                          IssueScale soc = social_scale()) {
    econ.validate();
    soc.validate();
    SurveyDataset ds;
    ds.econ_scale = econ;
    ds.soc_scale = soc;
    ds.provenance = "csv";
    IngestReport report;

    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (is_comment_line(line)) continue;
        if (!header_seen) {
            const auto have = split(trim(line));
            const auto want = split(kSurveyHeader);
            std::string missing;
            for (const auto w : want) {
                bool found = false;
                for (const auto h : have)
                    if (trim(h) == w) found = true;
                if (!found) missing += missing.empty() ? std::string(w) : "," + std::string(w);
            }
            if (!missing.empty())
                throw std::invalid_argument("survey csv: missing column(s): " + missing);
            if (have.size() != want.size() || trim(line) != kSurveyHeader)
                throw std::invalid_argument("survey csv: header must be exactly '" +
                                            std::string(kSurveyHeader) + "'");
            header_seen = true;
            continue;
        }

        const auto f = split(line);
        if (f.size() != 8) {
            report.rejected.push_back({line_no, "expected 8 fields, got " +
                                                    std::to_string(f.size())});
            continue;
        }
        Respondent r;
        const std::string_view party = trim(f[0]);
        if (party == "D") r.party_id = Party::Democrat;
        else if (party == "I") r.party_id = Party::Independent;
        else if (party == "R") r.party_id = Party::Republican;
        else {
            report.rejected.push_back({line_no, "bad party_id '" + std::string(party) + "'"});
            continue;
        }

        bool bad = false;
        r.econ_self = detail::parse_placement(f[1], bad);
        r.soc_self = detail::parse_placement(f[2], bad);
        r.econ_bush = detail::parse_placement(f[3], bad);
        r.econ_kerry = detail::parse_placement(f[4], bad);
        r.soc_bush = detail::parse_placement(f[5], bad);
        r.soc_kerry = detail::parse_placement(f[6], bad);
        if (bad) {
            report.rejected.push_back({line_no, "unparseable placement"});
            continue;
        }
        if ((r.econ_self && !econ.contains(*r.econ_self)) ||
            (r.soc_self && !soc.contains(*r.soc_self))) {
            report.rejected.push_back({line_no, "self-placement out of scale bounds"});
            continue;
        }

        const std::string_view vote = trim(f[7]);
        if (vote == "bush") r.vote = Vote::Bush;
        else if (vote == "kerry") r.vote = Vote::Kerry;
        else if (vote == "none") r.vote = Vote::None;
        else {
            report.rejected.push_back({line_no, "bad vote '" + std::string(vote) + "'"});
            continue;
        }

        ds.respondents.push_back(std::move(r));
    }
    if (!header_seen) throw std::invalid_argument("survey csv: missing header");
    report.n_loaded = ds.respondents.size();
    return {std::move(ds), std::move(report)};
}

inline void save_survey(std::ostream& os, const SurveyDataset& ds) {
    os << kSurveyHeader << '\n';
    const auto field = [&](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string{};
    };
    for (const Respondent& r : ds.respondents) {
        os << party_code(r.party_id) << ',' << field(r.econ_self) << ',' << field(r.soc_self)
           << ',' << field(r.econ_bush) << ',' << field(r.econ_kerry) << ',' << field(r.soc_bush)
           << ',' << field(r.soc_kerry) << ',' << vote_name(r.vote) << '\n';
    }
}

// --- synthetic generator --------------------------------------------------------

// Self-placement law: a correlated bivariate normal, optionally discretized to
// the integer scale points (perceived placements are never discretized or
// clamped; the stage-1 linear model is unbounded).
struct SelfPlacementConfig {
    double mean_econ = 0.0;
    double mean_soc = 0.0;
    double sd_econ = 3.0;
    double sd_soc = 8.0 / 3.0;
    double rho = 0.5;
    bool discretize = true;
};

// Ground-truth generator config. stage1 supplies intercepts, self-placement
// coefficients, and residual sds; stage2 supplies the vote logits.
struct SynthConfig {
    std::size_t n_dem = 500;
    std::size_t n_ind = 300;
    std::size_t n_rep = 500;
    double undecided_rate = 0.0;
    SelfPlacementConfig self;
    PerceptionModel stage1;
    ChoiceModel stage2;
    IssueScale econ_scale = economic_scale();
    IssueScale soc_scale = social_scale();

    std::size_t group_size(Party p) const {
        switch (p) {
            case Party::Democrat: return n_dem;
            case Party::Independent: return n_ind;
            default: return n_rep;
        }
    }

    void validate() const {
        econ_scale.validate();
        soc_scale.validate();
        for (const Party p : kParties)
            if (group_size(p) < 30)
                throw std::invalid_argument("SynthConfig: group sizes must be >= 30");
        if (!(undecided_rate >= 0.0 && undecided_rate < 1.0))
            throw std::invalid_argument("SynthConfig: undecided_rate must lie in [0, 1)");
        if (!(self.sd_econ > 0.0) || !(self.sd_soc > 0.0))
            throw std::invalid_argument("SynthConfig: self sds must be > 0");
        if (!(self.rho > -1.0 && self.rho < 1.0))
            throw std::invalid_argument("SynthConfig: self rho must lie in (-1, 1)");
        for (const Candidate c : kCandidates)
            for (const Dimension d : kDimensions)
                for (const Party p : kParties) {
                    const LinearFit& f = stage1.at(c, d, p);
                    if (!(f.residual_sd >= 0.0) || !std::isfinite(f.residual_sd))
                        throw std::invalid_argument(
                            "SynthConfig: stage-1 residual sds must be finite and >= 0");
                }
        for (const Party p : kParties)
            if (!stage2.at(p).converged)
                throw std::invalid_argument("SynthConfig: stage-2 fits must be converged");
    }
};

inline std::string synth_config_digest(const SynthConfig& cfg);

// Default generator truth: Bush perceived right, Kerry left, own-party
// projection in the stage-1 slopes, the published 2004 stage-2 coefficients.
inline SynthConfig default_synth_config() {
    SynthConfig cfg;
    cfg.stage2 = eq31_choice_model();
    const auto set = [&](Candidate c, Dimension d, double base, double own_adjust) {
        for (const Party p : kParties) {
            LinearFit f;
            f.intercept = base;
            if (p == Party::Democrat) f.intercept += (c == Candidate::Bush ? own_adjust : 0.0);
            if (p == Party::Republican) f.intercept -= (c == Candidate::Kerry ? own_adjust : 0.0);
            f.coef_econ_self = (d == Dimension::Econ) ? (c == Candidate::Bush ? -0.2 : 0.3) : -0.1;
            f.coef_soc_self = (d == Dimension::Soc) ? (c == Candidate::Bush ? -0.2 : 0.3) : 0.1;
            f.residual_sd = 2.5;
            cfg.stage1.at(c, d, p) = f;
        }
    };
    set(Candidate::Bush, Dimension::Econ, 4.0, 0.8);
    set(Candidate::Kerry, Dimension::Econ, -2.5, 0.8);
    set(Candidate::Bush, Dimension::Soc, 2.5, 0.6);
    set(Candidate::Kerry, Dimension::Soc, -2.0, 0.6);
    return cfg;
}

// Deterministic given (config, seed); every respondent gets its own substreams.
inline SurveyDataset synth_survey(const SynthConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    SurveyDataset ds;
    ds.econ_scale = cfg.econ_scale;
    ds.soc_scale = cfg.soc_scale;

    const double rho = cfg.self.rho;
    const double rho_c = std::sqrt(1.0 - rho * rho);

    std::size_t idx = 0;
    for (const Party p : kParties) {
        for (std::size_t k = 0; k < cfg.group_size(p); ++k, ++idx) {
            Respondent r;
            r.party_id = p;

            CounterRng self_rng(substream(seed, {stream::kSynthSelf, idx}));
            const double z1 = self_rng.next_normal();
            const double z2 = self_rng.next_normal();
            double e_self = cfg.self.mean_econ + cfg.self.sd_econ * z1;
            double s_self = cfg.self.mean_soc + cfg.self.sd_soc * (rho * z1 + rho_c * z2);
            if (cfg.self.discretize) {
                e_self = std::clamp(std::nearbyint(e_self), static_cast<double>(cfg.econ_scale.lo),
                                    static_cast<double>(cfg.econ_scale.hi));
                s_self = std::clamp(std::nearbyint(s_self), static_cast<double>(cfg.soc_scale.lo),
                                    static_cast<double>(cfg.soc_scale.hi));
            }
            r.econ_self = e_self;
            r.soc_self = s_self;

            CounterRng perc_rng(substream(seed, {stream::kSynthPerceived, idx}));
            const auto perceived = [&](Candidate c, Dimension d) {
                const LinearFit& f = cfg.stage1.at(c, d, p);
                return f.intercept + f.coef_econ_self * e_self + f.coef_soc_self * s_self +
                       f.residual_sd * perc_rng.next_normal();
            };
            r.econ_bush = perceived(Candidate::Bush, Dimension::Econ);
            r.econ_kerry = perceived(Candidate::Kerry, Dimension::Econ);
            r.soc_bush = perceived(Candidate::Bush, Dimension::Soc);
            r.soc_kerry = perceived(Candidate::Kerry, Dimension::Soc);

            CounterRng vote_rng(substream(seed, {stream::kSynthVote, idx}));
            const double u_undecided = vote_rng.next_uniform();
            const double u_vote = vote_rng.next_uniform();
            if (u_undecided < cfg.undecided_rate) {
                r.vote = Vote::None;
            } else {
                const auto [de, dsoc] = distances(r);
                r.vote = u_vote < predict_logit(cfg.stage2.at(p), de, dsoc) ? Vote::Bush
                                                                            : Vote::Kerry;
            }
            ds.respondents.push_back(std::move(r));
        }
    }
    ds.provenance = "synth:" + synth_config_digest(cfg) + ":seed=" + std::to_string(seed);
    return ds;
}

// --- flat key-value config text -------------------------------------------------

inline void write_synth_config(std::ostream& os, const SynthConfig& cfg) {
    os << "groups.dem = " << cfg.n_dem << '\n';
    os << "groups.ind = " << cfg.n_ind << '\n';
    os << "groups.rep = " << cfg.n_rep << '\n';
    os << "undecided_rate = " << format_double(cfg.undecided_rate) << '\n';
    os << "self.mean_econ = " << format_double(cfg.self.mean_econ) << '\n';
    os << "self.mean_soc = " << format_double(cfg.self.mean_soc) << '\n';
    os << "self.sd_econ = " << format_double(cfg.self.sd_econ) << '\n';
    os << "self.sd_soc = " << format_double(cfg.self.sd_soc) << '\n';
    os << "self.rho = " << format_double(cfg.self.rho) << '\n';
    os << "self.discretize = " << (cfg.self.discretize ? 1 : 0) << '\n';
    os << "scale.econ = " << cfg.econ_scale.hi << '\n';
    os << "scale.soc = " << cfg.soc_scale.hi << '\n';
    for (const Candidate c : kCandidates)
        for (const Dimension d : kDimensions)
            for (const Party p : kParties) {
                const LinearFit& f = cfg.stage1.at(c, d, p);
                os << "stage1." << candidate_name(c) << '.' << dimension_name(d) << '.'
                   << party_name(p) << " = " << format_double(f.intercept) << ' '
                   << format_double(f.coef_econ_self) << ' ' << format_double(f.coef_soc_self)
                   << ' ' << format_double(f.residual_sd) << '\n';
            }
    for (const Party p : kParties) {
        const LogitFit& f = cfg.stage2.at(p);
        os << "stage2." << party_name(p) << " = " << format_double(f.intercept) << ' '
           << format_double(f.coef_dist_e) << ' ' << format_double(f.coef_dist_s) << '\n';
    }
}

inline SynthConfig parse_synth_config(std::istream& is, SynthConfig cfg = default_synth_config()) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (is_comment_line(line)) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("synth config: expected 'key = value' at line " +
                                        std::to_string(line_no));
        const std::string key{trim(std::string_view(line).substr(0, eq))};
        const std::string val{trim(std::string_view(line).substr(eq + 1))};
        std::istringstream vs{val};
        const auto num = [&]() { return detail::tok_double(vs, key.c_str()); };

        if (key == "groups.dem") cfg.n_dem = static_cast<std::size_t>(num());
        else if (key == "groups.ind") cfg.n_ind = static_cast<std::size_t>(num());
        else if (key == "groups.rep") cfg.n_rep = static_cast<std::size_t>(num());
        else if (key == "undecided_rate") cfg.undecided_rate = num();
        else if (key == "self.mean_econ") cfg.self.mean_econ = num();
        else if (key == "self.mean_soc") cfg.self.mean_soc = num();
        else if (key == "self.sd_econ") cfg.self.sd_econ = num();
        else if (key == "self.sd_soc") cfg.self.sd_soc = num();
        else if (key == "self.rho") cfg.self.rho = num();
        else if (key == "self.discretize") cfg.self.discretize = num() != 0.0;
        else if (key == "scale.econ") {
            const int hi = static_cast<int>(num());
            cfg.econ_scale.lo = -hi;
            cfg.econ_scale.hi = hi;
        } else if (key == "scale.soc") {
            const int hi = static_cast<int>(num());
            cfg.soc_scale.lo = -hi;
            cfg.soc_scale.hi = hi;
        } else if (key.starts_with("stage1.")) {
            const auto parts = split(std::string_view(key).substr(7), '.');
            if (parts.size() != 3)
                throw std::invalid_argument("synth config: bad stage1 key '" + key + "'");
            LinearFit& f = cfg.stage1.at(parse_candidate(parts[0]),
                                         parse_dimension(parts[1]),
                                         parse_party(parts[2]));
            f.intercept = num();
            f.coef_econ_self = num();
            f.coef_soc_self = num();
            f.residual_sd = num();
        } else if (key.starts_with("stage2.")) {
            LogitFit& f = cfg.stage2.at(parse_party(std::string_view(key).substr(7)));
            f.intercept = num();
            f.coef_dist_e = num();
            f.coef_dist_s = num();
            f.converged = true;
        } else {
            throw std::invalid_argument("synth config: unknown key '" + key + "' at line " +
                                        std::to_string(line_no));
        }
    }
    return cfg;
}

inline std::string synth_config_digest(const SynthConfig& cfg) {
    std::ostringstream os;
    write_synth_config(os, cfg);
    return hex64(fnv1a64(os.str()));
}

}  // namespace svote
