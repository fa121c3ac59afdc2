#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "svote/normal.hpp"
#include "svote/util.hpp"

namespace svote {

enum class Party { Democrat, Independent, Republican };
enum class Candidate { Bush, Kerry };
enum class Dimension { Econ, Soc };
enum class Vote { Bush, Kerry, None };

inline constexpr std::array<Party, 3> kParties = {Party::Democrat, Party::Independent,
                                                  Party::Republican};
inline constexpr std::array<Candidate, 2> kCandidates = {Candidate::Bush, Candidate::Kerry};
inline constexpr std::array<Dimension, 2> kDimensions = {Dimension::Econ, Dimension::Soc};

inline std::string_view party_name(Party p) {
    switch (p) {
        case Party::Democrat: return "democrat";
        case Party::Independent: return "independent";
        default: return "republican";
    }
}

inline std::string_view party_code(Party p) {
    switch (p) {
        case Party::Democrat: return "D";
        case Party::Independent: return "I";
        default: return "R";
    }
}

inline std::string_view candidate_name(Candidate c) {
    return c == Candidate::Bush ? "bush" : "kerry";
}

inline std::string_view dimension_name(Dimension d) { return d == Dimension::Econ ? "econ" : "soc"; }

inline std::string_view vote_name(Vote v) {
    switch (v) {
        case Vote::Bush: return "bush";
        case Vote::Kerry: return "kerry";
        default: return "none";
    }
}

// One stage-1 linear model of a perceived candidate placement:
// outcome = intercept + coef_econ_self * econ_self + coef_soc_self * soc_self.
struct LinearFit {
    double intercept = 0.0;
    double coef_econ_self = 0.0;
    double coef_soc_self = 0.0;
    double se_intercept = 0.0;
    double se_econ_self = 0.0;
    double se_soc_self = 0.0;
    double residual_sd = 0.0;
    std::size_t n = 0;

    bool operator==(const LinearFit&) const = default;
};

// One stage-2 logit of the Bush vote on signed squared-distance differences.
struct LogitFit {
    double intercept = 0.0;
    double coef_dist_e = 0.0;
    double coef_dist_s = 0.0;
    double se_intercept = 0.0;
    double se_dist_e = 0.0;
    double se_dist_s = 0.0;
    std::size_t n = 0;
    bool converged = false;

    bool operator==(const LogitFit&) const = default;
};

// The 12 stage-1 fits, indexed (candidate x dimension x party), plus the
// counterfactual intercept shifts layered on top. Shifts accumulate in their
// own slot per (candidate, dimension) so composing shifts is exact; the
// effective intercept is intercept_at().
class PerceptionModel {
public:
    LinearFit& at(Candidate c, Dimension d, Party p) { return fits_[index(c, d, p)]; }
    const LinearFit& at(Candidate c, Dimension d, Party p) const { return fits_[index(c, d, p)]; }

    double shift(Candidate c, Dimension d) const { return shifts_[shift_index(c, d)]; }
    void add_shift(Candidate c, Dimension d, double delta) {
        shifts_[shift_index(c, d)] += delta;
    }

    double intercept_at(Candidate c, Dimension d, Party p) const {
        return at(c, d, p).intercept + shift(c, d);
    }

    bool operator==(const PerceptionModel&) const = default;

private:
    static std::size_t index(Candidate c, Dimension d, Party p) {
        return (static_cast<std::size_t>(c) * 2 + static_cast<std::size_t>(d)) * 3 +
               static_cast<std::size_t>(p);
    }
    static std::size_t shift_index(Candidate c, Dimension d) {
        return static_cast<std::size_t>(c) * 2 + static_cast<std::size_t>(d);
    }

    std::array<LinearFit, 12> fits_{};
    std::array<double, 4> shifts_{};
};

class ChoiceModel {
public:
    LogitFit& at(Party p) { return fits_[static_cast<std::size_t>(p)]; }
    const LogitFit& at(Party p) const { return fits_[static_cast<std::size_t>(p)]; }

    bool operator==(const ChoiceModel&) const = default;

private:
    std::array<LogitFit, 3> fits_{};
};

inline double predict_logit(const LogitFit& f, double dist_e, double dist_s) {
    if (!f.converged) throw std::invalid_argument("predict_logit: fit did not converge");
    return inverse_logit(f.intercept + f.coef_dist_e * dist_e + f.coef_dist_s * dist_s);
}

// Published 2004 stage-2 coefficients, available as the built-in preset
// "aoas2008-eq31". Standard errors were not published and are stored as 0.
inline ChoiceModel eq31_choice_model() {
    ChoiceModel cm;
    cm.at(Party::Democrat) = LogitFit{-1.32, -0.05, -0.04, 0, 0, 0, 0, true};
    cm.at(Party::Independent) = LogitFit{0.38, -0.05, 0.02, 0, 0, 0, 0, true};
    cm.at(Party::Republican) = LogitFit{2.30, -0.03, -0.02, 0, 0, 0, 0, true};
    return cm;
}

inline constexpr std::string_view kEq31PresetName = "aoas2008-eq31";

inline ChoiceModel choice_model_preset(std::string_view name) {
    if (name == kEq31PresetName) return eq31_choice_model();
    throw std::invalid_argument("unknown choice-model preset: " + std::string(name));
}

// --- flat text serialization -------------------------------------------------

inline void save_models(std::ostream& os, const PerceptionModel& pm, const ChoiceModel& cm) {
    os << "svote-models 1\n";
    for (const Candidate c : kCandidates)
        os << "shift " << candidate_name(c) << ' ' << format_double(pm.shift(c, Dimension::Econ))
           << ' ' << format_double(pm.shift(c, Dimension::Soc)) << '\n';
    for (const Candidate c : kCandidates)
        for (const Dimension d : kDimensions)
            for (const Party p : kParties) {
                const LinearFit& f = pm.at(c, d, p);
                os << "perception " << candidate_name(c) << ' ' << dimension_name(d) << ' '
                   << party_name(p) << ' ' << format_double(f.intercept) << ' '
                   << format_double(f.coef_econ_self) << ' ' << format_double(f.coef_soc_self)
                   << ' ' << format_double(f.se_intercept) << ' ' << format_double(f.se_econ_self)
                   << ' ' << format_double(f.se_soc_self) << ' ' << format_double(f.residual_sd)
                   << ' ' << f.n << '\n';
            }
    for (const Party p : kParties) {
        const LogitFit& f = cm.at(p);
        os << "choice " << party_name(p) << ' ' << format_double(f.intercept) << ' '
           << format_double(f.coef_dist_e) << ' ' << format_double(f.coef_dist_s) << ' '
           << format_double(f.se_intercept) << ' ' << format_double(f.se_dist_e) << ' '
           << format_double(f.se_dist_s) << ' ' << f.n << ' ' << (f.converged ? 1 : 0) << '\n';
    }
}

inline Party parse_party(std::string_view s) {
    for (const Party p : kParties)
        if (s == party_name(p) || s == party_code(p)) return p;
    throw std::invalid_argument("unknown party: " + std::string(s));
}

inline Candidate parse_candidate(std::string_view s) {
    for (const Candidate c : kCandidates)
        if (s == candidate_name(c)) return c;
    throw std::invalid_argument("unknown candidate: " + std::string(s));
}

inline Dimension parse_dimension(std::string_view s) {
    for (const Dimension d : kDimensions)
        if (s == dimension_name(d)) return d;
    throw std::invalid_argument("unknown dimension: " + std::string(s));
}

namespace detail {

inline double tok_double(std::istringstream& is, const char* what) {
    std::string tok;
    if (!(is >> tok)) throw std::invalid_argument(std::string("models: missing field ") + what);
    const auto v = parse_double(tok);
    if (!v) throw std::invalid_argument(std::string("models: bad number in field ") + what);
    return *v;
}

}  // namespace detail

inline std::pair<PerceptionModel, ChoiceModel> load_models(std::istream& is) {
    PerceptionModel pm;
    ChoiceModel cm;
    std::string line;
    bool magic = false;
    int n_perception = 0, n_choice = 0;
    while (std::getline(is, line)) {
        if (is_comment_line(line)) continue;
        std::istringstream ls{line};
        std::string kind;
        ls >> kind;
        if (!magic) {
            int version = 0;
            if (kind != "svote-models" || !(ls >> version) || version != 1)
                throw std::invalid_argument("models: expected header 'svote-models 1'");
            magic = true;
            continue;
        }
        if (kind == "shift") {
            std::string cand;
            ls >> cand;
            const Candidate c = parse_candidate(cand);
            pm.add_shift(c, Dimension::Econ, detail::tok_double(ls, "shift econ"));
            pm.add_shift(c, Dimension::Soc, detail::tok_double(ls, "shift soc"));
        } else if (kind == "perception") {
            std::string cand, dim, party;
            ls >> cand >> dim >> party;
            LinearFit f;
            f.intercept = detail::tok_double(ls, "intercept");
            f.coef_econ_self = detail::tok_double(ls, "coef_econ_self");
            f.coef_soc_self = detail::tok_double(ls, "coef_soc_self");
            f.se_intercept = detail::tok_double(ls, "se_intercept");
            f.se_econ_self = detail::tok_double(ls, "se_econ_self");
            f.se_soc_self = detail::tok_double(ls, "se_soc_self");
            f.residual_sd = detail::tok_double(ls, "residual_sd");
            f.n = static_cast<std::size_t>(detail::tok_double(ls, "n"));
            pm.at(parse_candidate(cand), parse_dimension(dim),
                  parse_party(party)) = f;
            ++n_perception;
        } else if (kind == "choice") {
            std::string party;
            ls >> party;
            LogitFit f;
            f.intercept = detail::tok_double(ls, "intercept");
            f.coef_dist_e = detail::tok_double(ls, "coef_dist_e");
            f.coef_dist_s = detail::tok_double(ls, "coef_dist_s");
            f.se_intercept = detail::tok_double(ls, "se_intercept");
            f.se_dist_e = detail::tok_double(ls, "se_dist_e");
            f.se_dist_s = detail::tok_double(ls, "se_dist_s");
            f.n = static_cast<std::size_t>(detail::tok_double(ls, "n"));
            f.converged = detail::tok_double(ls, "converged") != 0.0;
            cm.at(parse_party(party)) = f;
            ++n_choice;
        } else {
            throw std::invalid_argument("models: unknown record '" + kind + "'");
        }
    }
    if (!magic || n_perception != 12 || n_choice != 3)
        throw std::invalid_argument("models: incomplete file (need 12 perception + 3 choice fits)");
    return {pm, cm};
}

}  // namespace svote
