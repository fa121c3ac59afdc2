// svote: spatial-voting models, survey synthesis/fitting, and intercept-shift
// counterfactual sweeps. CSV in, CSV/JSON out; every output embeds its
// resolved configuration and seed.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "svote/svote.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

using ConfigMap = std::map<std::string, std::string>;

std::string config_digest(const std::string& subcommand, const ConfigMap& cfg) {
    std::string canon = subcommand + '\n';
    for (const auto& [k, v] : cfg) canon += k + '=' + v + '\n';
    return svote::hex64(svote::fnv1a64(canon));
}

std::string comment_header(const std::string& subcommand, const ConfigMap& cfg,
                           std::uint64_t seed) {
    std::string out = "# svote " + subcommand + "\n";
    out += "# digest: " + config_digest(subcommand, cfg) + "\n";
    out += "# seed: " + std::to_string(seed) + "\n";
    for (const auto& [k, v] : cfg) out += "# " + k + "=" + v + "\n";
    return out;
}

void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << content;
    if (!f) throw std::runtime_error("failed writing output file: " + path);
}

std::vector<double> parse_coords(const std::string& s) {
    std::vector<double> out;
    for (const auto tok : svote::split(s)) {
        const auto v = svote::parse_double(tok);
        if (!v) throw std::runtime_error("bad coordinate list: '" + s + "'");
        out.push_back(*v);
    }
    return out;
}

struct GridArg {
    double lo = 0.0, hi = 0.0, step = 0.0;
};

GridArg parse_grid(const std::string& s) {
    const auto parts = svote::split(s, ':');
    if (parts.size() != 3) throw std::runtime_error("grid must be lo:hi:step, got '" + s + "'");
    GridArg g;
    const auto lo = svote::parse_double(parts[0]);
    const auto hi = svote::parse_double(parts[1]);
    const auto step = svote::parse_double(parts[2]);
    if (!lo || !hi || !step) throw std::runtime_error("grid must be lo:hi:step, got '" + s + "'");
    g.lo = *lo;
    g.hi = *hi;
    g.step = *step;
    return g;
}

std::string coords_to_string(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + svote::format_double(v[i]);
    return s;
}

svote::Metric make_metric(const std::string& kind, const std::string& weights, std::size_t d) {
    const svote::MetricKind mk = kind == "l1" ? svote::MetricKind::AbsoluteValue
                                              : svote::MetricKind::SquaredEuclidean;
    if (weights.empty())
        return svote::Metric::weighted(mk, std::vector<double>(d, 1.0));
    return svote::Metric::weighted(mk, parse_coords(weights));
}

std::ifstream open_input(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open input file: " + path);
    return f;
}

// ---------------------------------------------------------------------------
// theory-curve / export-electorate / optimize
// ---------------------------------------------------------------------------

struct SpatialArgs {
    std::string preset;
    std::size_t dims = 0;
    double rho = 0.5;
    std::string r_pos, d_template;
    std::size_t axis = 0;
    std::string grid = "-2:2:0.1";
    std::size_t n = 10000;
    std::uint64_t seed = kDefaultSeed;
    std::string metric = "l2";
    std::string weights;
    double valence = 0.0;
    std::string sigma;
    std::size_t draws = 1;
    unsigned workers = 1;
    std::string electorate_file;
    std::string out = "-";

    bool dims_set = false, rho_set = false, grid_set = false, n_set = false;

    void apply_preset() {
        if (preset.empty()) return;
        const auto set = [&](std::size_t d, double r, const char* rp, const char* dt,
                             const char* g) {
            if (!dims_set) dims = d;
            if (!rho_set) rho = r;
            if (r_pos.empty()) r_pos = rp;
            if (d_template.empty()) d_template = dt;
            if (!grid_set) grid = g;
            if (!n_set) n = 10000;
        };
        if (preset == "fig1") set(1, 0.0, "2", "1", "-3:2:0.05");
        else if (preset == "fig2") set(2, 0.5, "2,1", "1,-2", "0:1:1");
        else if (preset == "fig3a") set(2, 0.5, "2,1", "1,-2", "-2:2:0.1");
        else if (preset == "fig3b") set(3, 0.5, "2,1,1", "1,-1,-2", "-2:2:0.1");
        else throw std::runtime_error("unknown preset: " + preset);
    }

    svote::Electorate build_electorate(ConfigMap& cfg) const {
        if (!electorate_file.empty()) {
            auto f = open_input(electorate_file);
            cfg["electorate"] = electorate_file;
            return svote::read_electorate_csv(f);
        }
        cfg["dims"] = std::to_string(dims);
        cfg["rho"] = svote::format_double(rho);
        cfg["n"] = std::to_string(n);
        return svote::sample_electorate(svote::CorrelationSpec(dims, rho), n, seed, workers);
    }
};

void add_spatial_options(CLI::App* cmd, SpatialArgs& a, bool with_grid) {
    cmd->add_option("--preset", a.preset, "paper configuration: fig1, fig2, fig3a, fig3b");
    cmd->add_option("--dims", a.dims, "number of issue dimensions")
        ->each([&](const std::string&) { a.dims_set = true; });
    cmd->add_option("--rho", a.rho, "pairwise voter correlation (default 0.5)")
        ->each([&](const std::string&) { a.rho_set = true; });
    cmd->add_option("--r-pos", a.r_pos, "R position, comma-separated");
    cmd->add_option("--d-template", a.d_template,
                    "D position template; swept axes get overwritten");
    if (with_grid) {
        cmd->add_option("--axis", a.axis, "swept axis (default 0, the economic axis)");
        cmd->add_option("--grid", a.grid, "sweep grid lo:hi:step (default -2:2:0.1)")
            ->each([&](const std::string&) { a.grid_set = true; });
    }
    cmd->add_option("--n", a.n, "electorate size (default 10000)")
        ->each([&](const std::string&) { a.n_set = true; });
    cmd->add_option("--seed", a.seed, "RNG seed (default 1; outputs embed it)");
    cmd->add_option("--metric", a.metric, "distance metric: l2 (squared) or l1 (absolute)")
        ->check(CLI::IsMember({"l2", "l1"}));
    cmd->add_option("--weights", a.weights, "per-dimension metric weights");
    cmd->add_option("--valence", a.valence, "additive valence shift favoring D");
    cmd->add_option("--sigma", a.sigma, "perception noise sd (scalar or per-dimension list)");
    cmd->add_option("--draws", a.draws, "noise draws per voter (default 1)");
    cmd->add_option("--workers", a.workers, "worker threads (never changes results)");
    cmd->add_option("--electorate", a.electorate_file, "reuse a frozen electorate CSV");
    cmd->add_option("--out", a.out, "output file, - for stdout");
}

void fill_common_config(const SpatialArgs& a, ConfigMap& cfg) {
    if (!a.preset.empty()) cfg["preset"] = a.preset;
    cfg["r-pos"] = a.r_pos;
    cfg["d-template"] = a.d_template;
    cfg["metric"] = a.metric;
    if (!a.weights.empty()) cfg["weights"] = a.weights;
    cfg["valence"] = svote::format_double(a.valence);
    if (!a.sigma.empty()) {
        cfg["sigma"] = a.sigma;
        cfg["draws"] = std::to_string(a.draws);
    }
}

int run_theory_curve(SpatialArgs& a) {
    a.apply_preset();
    if (a.dims == 0 || a.r_pos.empty())
        throw std::runtime_error("theory-curve needs --preset or both --dims and --r-pos");
    if (a.d_template.empty()) a.d_template = coords_to_string(std::vector<double>(a.dims, 0.0));

    ConfigMap cfg;
    const svote::Electorate e = a.build_electorate(cfg);
    if (a.dims == 0) a.dims = e.dim();
    fill_common_config(a, cfg);
    cfg["axis"] = std::to_string(a.axis);
    cfg["grid"] = a.grid;

    const GridArg g = parse_grid(a.grid);
    const svote::PositionGrid grid{a.axis, g.lo, g.hi, g.step};
    const svote::Metric metric = make_metric(a.metric, a.weights, e.dim());
    svote::NoiseConfig noise;
    if (!a.sigma.empty()) {
        noise.sigma = parse_coords(a.sigma);
        noise.draws = a.draws;
        noise.seed = a.seed;
    }

    const auto curve = svote::share_curve(e, svote::IdealPoint(parse_coords(a.r_pos)),
                                          svote::IdealPoint(parse_coords(a.d_template)), grid,
                                          metric, svote::Valence{a.valence}, noise,
                                          svote::TieRule::Split, a.workers);

    std::ostringstream body;
    svote::write_curve_csv(body, curve);
    write_output(a.out, comment_header("theory-curve", cfg, a.seed) + body.str());

    std::size_t best = 0;
    double lo_share = 1.0, hi_share = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve[i].second.share > curve[best].second.share) best = i;
        lo_share = std::min(lo_share, curve[i].second.share);
        hi_share = std::max(hi_share, curve[i].second.share);
    }
    std::ostream& log = a.out == "-" ? std::cerr : std::cout;
    log << "argmax: axis_value=" << svote::format_double(curve[best].first)
        << " d_share=" << svote::format_double(curve[best].second.share) << '\n'
        << "d_share range: [" << svote::format_double(lo_share) << ", "
        << svote::format_double(hi_share) << "]\n"
        << "r_share range: [" << svote::format_double(1.0 - hi_share) << ", "
        << svote::format_double(1.0 - lo_share) << "]\n";
    return 0;
}

int run_export_electorate(SpatialArgs& a) {
    if (a.dims == 0) throw std::runtime_error("export-electorate needs --dims");
    ConfigMap cfg;
    cfg["dims"] = std::to_string(a.dims);
    cfg["rho"] = svote::format_double(a.rho);
    cfg["n"] = std::to_string(a.n);
    const auto e = svote::sample_electorate(svote::CorrelationSpec(a.dims, a.rho), a.n, a.seed,
                                            a.workers);
    std::ostringstream body;
    svote::write_electorate_csv(body, e);
    write_output(a.out, comment_header("export-electorate", cfg, a.seed) + body.str());
    return 0;
}

struct OptimizeArgs {
    SpatialArgs spatial;
    std::string free_axes = "0";
    std::string bounds = "-3:2";
    double coarse_step = 0.1;
    int refine_rounds = 2;
};

int run_optimize(OptimizeArgs& oa) {
    SpatialArgs& a = oa.spatial;
    a.apply_preset();
    if (a.dims == 0 || a.r_pos.empty())
        throw std::runtime_error("optimize needs --preset or both --dims and --r-pos");
    if (a.d_template.empty()) a.d_template = coords_to_string(std::vector<double>(a.dims, 0.0));

    ConfigMap cfg;
    const svote::Electorate e = a.build_electorate(cfg);
    fill_common_config(a, cfg);
    cfg["free-axes"] = oa.free_axes;
    cfg["bounds"] = oa.bounds;
    cfg["coarse-step"] = svote::format_double(oa.coarse_step);
    cfg["refine-rounds"] = std::to_string(oa.refine_rounds);

    std::vector<std::size_t> axes;
    for (const auto tok : svote::split(oa.free_axes)) {
        const auto v = svote::parse_double(tok);
        if (!v) throw std::runtime_error("bad --free-axes");
        axes.push_back(static_cast<std::size_t>(*v));
    }
    std::vector<svote::AxisBounds> bounds;
    for (const auto tok : svote::split(oa.bounds)) {
        const auto parts = svote::split(tok, ':');
        if (parts.size() != 2) throw std::runtime_error("bounds must be lo:hi[,lo:hi]");
        const auto lo = svote::parse_double(parts[0]);
        const auto hi = svote::parse_double(parts[1]);
        if (!lo || !hi) throw std::runtime_error("bounds must be lo:hi[,lo:hi]");
        bounds.push_back({*lo, *hi});
    }
    svote::NoiseConfig noise;
    if (!a.sigma.empty()) {
        noise.sigma = parse_coords(a.sigma);
        noise.draws = a.draws;
        noise.seed = a.seed;
    }

    const auto result = svote::optimize_position(
        e, svote::IdealPoint(parse_coords(a.r_pos)),
        svote::IdealPoint(parse_coords(a.d_template)), axes, bounds,
        make_metric(a.metric, a.weights, e.dim()), svote::Valence{a.valence}, oa.coarse_step,
        oa.refine_rounds, noise, svote::TieRule::Split, a.workers);

    std::ostringstream os;
    os << "{\n  \"digest\": \"" << config_digest("optimize", cfg) << "\",\n";
    os << "  \"seed\": " << a.seed << ",\n  \"config\": {";
    bool first = true;
    for (const auto& [k, v] : cfg) {
        os << (first ? "" : ", ") << '"' << k << "\": \"" << v << '"';
        first = false;
    }
    os << "},\n  \"position\": [";
    for (std::size_t j = 0; j < result.position.dim(); ++j)
        os << (j ? ", " : "") << svote::format_double(result.position[j]);
    os << "],\n  \"d_share\": " << svote::format_double(result.share.share);
    os << ",\n  \"mc_se\": " << svote::format_double(result.share.mc_se);
    os << ",\n  \"n_voters\": " << result.share.n_voters;
    os << ",\n  \"draws\": " << result.share.draws << "\n}\n";
    write_output(a.out, os.str());
    return 0;
}

// ---------------------------------------------------------------------------
// synth / fit / counterfactual
// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string config_file;
    std::uint64_t seed = kDefaultSeed;
    std::string out = "-";
    std::optional<std::size_t> n_dem, n_ind, n_rep;
    std::optional<double> undecided_rate;
};

int run_synth(SynthArgs& a) {
    svote::SynthConfig cfg = svote::default_synth_config();
    if (!a.config_file.empty()) {
        auto f = open_input(a.config_file);
        cfg = svote::parse_synth_config(f, cfg);
    }
    if (a.n_dem) cfg.n_dem = *a.n_dem;
    if (a.n_ind) cfg.n_ind = *a.n_ind;
    if (a.n_rep) cfg.n_rep = *a.n_rep;
    if (a.undecided_rate) cfg.undecided_rate = *a.undecided_rate;

    const svote::SurveyDataset ds = svote::synth_survey(cfg, a.seed);

    ConfigMap header;
    header["generator-digest"] = svote::synth_config_digest(cfg);
    header["groups"] = std::to_string(cfg.n_dem) + "," + std::to_string(cfg.n_ind) + "," +
                       std::to_string(cfg.n_rep);
    if (!a.config_file.empty()) header["config-file"] = a.config_file;

    std::ostringstream body;
    svote::save_survey(body, ds);
    write_output(a.out, comment_header("synth", header, a.seed) + body.str());
    return 0;
}

struct FitArgs {
    std::string survey_file;
    std::string out = "-";
    bool quiet = false;
};

void print_fit_table(std::ostream& os, const svote::PerceptionModel& pm,
                     const svote::ChoiceModel& cm) {
    os << "perception fits (outcome ~ intercept + b_e*econ_self + b_s*soc_self):\n";
    char buf[160];
    for (const svote::Candidate c : svote::kCandidates)
        for (const svote::Dimension d : svote::kDimensions)
            for (const svote::Party p : svote::kParties) {
                const svote::LinearFit& f = pm.at(c, d, p);
                std::snprintf(buf, sizeof buf,
                              "  %-5s %-4s %-11s  intercept %7.3f (%.3f)  b_e %7.3f (%.3f)  "
                              "b_s %7.3f (%.3f)  resid_sd %6.3f  n %zu\n",
                              std::string(candidate_name(c)).c_str(),
                              std::string(dimension_name(d)).c_str(),
                              std::string(party_name(p)).c_str(), f.intercept, f.se_intercept,
                              f.coef_econ_self, f.se_econ_self, f.coef_soc_self, f.se_soc_self,
                              f.residual_sd, f.n);
                os << buf;
            }
    os << "choice fits (Pr[bush] = logit^-1(intercept + b_e*dist_e + b_s*dist_s)):\n";
    for (const svote::Party p : svote::kParties) {
        const svote::LogitFit& f = cm.at(p);
        std::snprintf(buf, sizeof buf,
                      "  %-11s  intercept %7.3f (%.3f)  b_e %8.4f (%.4f)  b_s %8.4f (%.4f)  "
                      "n %zu  %s\n",
                      std::string(party_name(p)).c_str(), f.intercept, f.se_intercept,
                      f.coef_dist_e, f.se_dist_e, f.coef_dist_s, f.se_dist_s, f.n,
                      f.converged ? "converged" : "NOT CONVERGED");
        os << buf;
    }
}

int run_fit(FitArgs& a) {
    auto f = open_input(a.survey_file);
    auto [ds, report] = svote::load_survey(f);
    ds.provenance = a.survey_file;
    for (const auto& rej : report.rejected)
        std::cerr << "survey line " << rej.line << " rejected: " << rej.reason << '\n';

    const auto [pm, cm] = svote::fit_all(ds);

    ConfigMap cfg;
    cfg["survey"] = a.survey_file;
    cfg["n-respondents"] = std::to_string(ds.respondents.size());
    std::ostringstream body;
    svote::save_models(body, pm, cm);
    write_output(a.out, comment_header("fit", cfg, 0) + body.str());
    if (!a.quiet) print_fit_table(a.out == "-" ? std::cerr : std::cout, pm, cm);
    return 0;
}

struct CounterfactualArgs {
    std::string models_file;
    std::string survey_file;
    std::string choice_preset;
    std::string candidate = "kerry";
    std::string dim = "econ";
    std::string grid;
    std::string econ_grid, soc_grid;
    std::optional<double> delta_econ, delta_soc;
    std::size_t draws = 100;
    std::uint64_t seed = kDefaultSeed;
    unsigned workers = 1;
    std::string out = "-";
    std::string summary;
};

int run_counterfactual(CounterfactualArgs& a) {
    auto mf = open_input(a.models_file);
    auto [pm, cm] = svote::load_models(mf);
    if (!a.choice_preset.empty()) cm = svote::choice_model_preset(a.choice_preset);

    auto sf = open_input(a.survey_file);
    auto [ds, report] = svote::load_survey(sf);
    ds.provenance = a.survey_file;
    for (const auto& rej : report.rejected)
        std::cerr << "survey line " << rej.line << " rejected: " << rej.reason << '\n';

    const svote::Candidate cand = svote::parse_candidate(a.candidate);
    ConfigMap cfg;
    cfg["models"] = a.models_file;
    cfg["survey"] = a.survey_file;
    cfg["candidate"] = a.candidate;
    cfg["draws"] = std::to_string(a.draws);
    if (!a.choice_preset.empty()) cfg["choice-model"] = a.choice_preset;

    svote::SweepResult sweep;
    const bool two_d = !a.econ_grid.empty() || !a.soc_grid.empty();
    if (two_d) {
        if (a.econ_grid.empty() || a.soc_grid.empty())
            throw std::runtime_error("2-D sweeps need both --econ-grid and --soc-grid");
        const GridArg ge = parse_grid(a.econ_grid);
        const GridArg gs = parse_grid(a.soc_grid);
        cfg["econ-grid"] = a.econ_grid;
        cfg["soc-grid"] = a.soc_grid;
        sweep = svote::sweep_2d(pm, cm, ds, cand, ge.lo, ge.hi, ge.step, gs.lo, gs.hi, gs.step,
                                a.draws, a.seed, a.workers);
    } else if (!a.grid.empty()) {
        const GridArg g = parse_grid(a.grid);
        const svote::Dimension dim = svote::parse_dimension(a.dim);
        cfg["dim"] = a.dim;
        cfg["grid"] = a.grid;
        sweep = svote::sweep_1d(pm, cm, ds, cand, dim, g.lo, g.hi, g.step, a.draws, a.seed,
                                a.workers);
    } else if (a.delta_econ || a.delta_soc) {
        const svote::ShiftSpec s{cand, a.delta_econ.value_or(0.0), a.delta_soc.value_or(0.0)};
        cfg["delta-econ"] = svote::format_double(s.delta_econ);
        cfg["delta-soc"] = svote::format_double(s.delta_soc);
        sweep.candidate = cand;
        sweep.draws = a.draws;
        sweep.baseline = svote::simulate_election(pm, cm, ds, a.draws, a.seed, a.workers);
        sweep.points.push_back({s.delta_econ, s.delta_soc,
                                svote::simulate_election(svote::apply_shift(pm, s), cm, ds,
                                                         a.draws, a.seed, a.workers)});
    } else {
        throw std::runtime_error(
            "give --grid (with --dim), --econ-grid/--soc-grid, or --delta-econ/--delta-soc");
    }

    std::ostringstream body;
    svote::write_sweep_csv(body, sweep);
    write_output(a.out, comment_header("counterfactual", cfg, a.seed) + body.str());

    std::ostringstream summary;
    summary << "{\n  \"digest\": \"" << config_digest("counterfactual", cfg) << "\",\n";
    summary << "  \"seed\": " << a.seed << ",\n";
    summary << "  \"summary\": " << svote::sweep_summary_json(sweep) << "}\n";
    if (!a.summary.empty()) write_output(a.summary, summary.str());
    else if (a.out != "-") std::cout << summary.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spatial-voting models, survey fits, and counterfactual sweeps"};
    app.require_subcommand(1);

    SpatialArgs curve_args;
    CLI::App* curve = app.add_subcommand(
        "theory-curve", "D vote share as a function of D's position on one axis");
    add_spatial_options(curve, curve_args, true);

    OptimizeArgs opt_args;
    CLI::App* opt = app.add_subcommand(
        "optimize", "coarse-to-fine search for D's vote-maximizing position");
    add_spatial_options(opt, opt_args.spatial, false);
    opt->add_option("--free-axes", opt_args.free_axes, "axes D may move on (1 or 2, e.g. 0,1)");
    opt->add_option("--bounds", opt_args.bounds, "half-open bounds lo:hi per free axis");
    opt->add_option("--coarse-step", opt_args.coarse_step, "initial grid step (default 0.1)");
    opt->add_option("--refine-rounds", opt_args.refine_rounds,
                    "tenfold refinement rounds (default 2)");

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic survey CSV");
    synth->add_option("--config", synth_args.config_file,
                      "generator config file (flat key = value lines)");
    synth->add_option("--seed", synth_args.seed, "RNG seed (default 1)");
    synth->add_option("--out", synth_args.out, "output CSV, - for stdout");
    synth->add_option("--n-dem", synth_args.n_dem, "Democrat group size");
    synth->add_option("--n-ind", synth_args.n_ind, "Independent group size");
    synth->add_option("--n-rep", synth_args.n_rep, "Republican group size");
    synth->add_option("--undecided-rate", synth_args.undecided_rate,
                      "probability a respondent reports no vote");
    synth->footer(
        "Config keys (defaults in parentheses):\n"
        "  groups.dem / groups.ind / groups.rep (500/300/500)   group sizes\n"
        "  undecided_rate (0)                                   share with vote = none\n"
        "  self.mean_econ, self.mean_soc (0, 0)                 self-placement means\n"
        "  self.sd_econ, self.sd_soc (3, 2.667)                 self-placement sds\n"
        "  self.rho (0.5)                                       self-placement correlation\n"
        "  self.discretize (1)                                  round selves to scale points\n"
        "  scale.econ, scale.soc (9, 8)                         symmetric scale bounds\n"
        "  stage1.<bush|kerry>.<econ|soc>.<party> = intercept coef_econ coef_soc residual_sd\n"
        "  stage2.<democrat|independent|republican> = intercept coef_dist_e coef_dist_s\n");

    FitArgs fit_args;
    CLI::App* fit = app.add_subcommand(
        "fit", "fit the 12 perception regressions and 3 vote logits to a survey");
    fit->add_option("--survey", fit_args.survey_file, "survey CSV")->required();
    fit->add_option("--out", fit_args.out, "models file, - for stdout");
    fit->add_flag("--quiet", fit_args.quiet, "suppress the coefficient table");

    CounterfactualArgs cf_args;
    CLI::App* cf = app.add_subcommand(
        "counterfactual", "intercept-shift election simulation over a grid of moves");
    cf->add_option("--models", cf_args.models_file, "fitted models file")->required();
    cf->add_option("--survey", cf_args.survey_file, "survey CSV")->required();
    cf->add_option("--choice-model", cf_args.choice_preset,
                   "substitute a stage-2 preset (aoas2008-eq31)");
    cf->add_option("--candidate", cf_args.candidate, "bush or kerry")
        ->check(CLI::IsMember({"bush", "kerry"}));
    cf->add_option("--dim", cf_args.dim, "econ or soc (1-D sweeps)")
        ->check(CLI::IsMember({"econ", "soc"}));
    cf->add_option("--grid", cf_args.grid, "1-D shift grid lo:hi:step");
    cf->add_option("--econ-grid", cf_args.econ_grid, "2-D economic grid lo:hi:step");
    cf->add_option("--soc-grid", cf_args.soc_grid, "2-D social grid lo:hi:step");
    cf->add_option("--delta-econ", cf_args.delta_econ, "single economic shift");
    cf->add_option("--delta-soc", cf_args.delta_soc, "single social shift");
    cf->add_option("--draws", cf_args.draws, "simulations per grid point (default 100)");
    cf->add_option("--seed", cf_args.seed, "RNG seed (default 1)");
    cf->add_option("--workers", cf_args.workers, "worker threads (never changes results)");
    cf->add_option("--out", cf_args.out, "sweep CSV, - for stdout");
    cf->add_option("--summary", cf_args.summary, "JSON summary file");

    SpatialArgs exp_args;
    CLI::App* exp = app.add_subcommand("export-electorate",
                                       "sample an electorate and write it as CSV");
    exp->add_option("--dims", exp_args.dims, "number of issue dimensions")->required();
    exp->add_option("--rho", exp_args.rho, "pairwise correlation (default 0.5)");
    exp->add_option("--n", exp_args.n, "electorate size (default 10000)");
    exp->add_option("--seed", exp_args.seed, "RNG seed (default 1)");
    exp->add_option("--workers", exp_args.workers, "worker threads");
    exp->add_option("--out", exp_args.out, "output CSV, - for stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (curve->parsed()) return run_theory_curve(curve_args);
        if (opt->parsed()) return run_optimize(opt_args);
        if (synth->parsed()) return run_synth(synth_args);
        if (fit->parsed()) return run_fit(fit_args);
        if (cf->parsed()) return run_counterfactual(cf_args);
        if (exp->parsed()) return run_export_electorate(exp_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
