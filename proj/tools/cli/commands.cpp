#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

#include "alphacross/analytic.hpp"
#include "alphacross/blotter.hpp"
#include "alphacross/correlations.hpp"
#include "alphacross/error.hpp"
#include "alphacross/simulate.hpp"
#include "manifest.hpp"

namespace alphacross::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Streams {
    std::ostream& out;
    std::ostream& err;
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + path.string() + "'");
    f << content;
    if (!f) throw InputError("failed writing '" + path.string() + "'");
}

void print_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

// Sibling of `path` with its extension replaced: curve.csv -> curve.fit.json.
fs::path sibling(const fs::path& path, const std::string& suffix) {
    fs::path p = path;
    p.replace_extension();
    return fs::path(p.string() + suffix);
}

json collect_parameters(const CLI::App& leaf) {
    json params = json::object();
    for (const CLI::Option* opt : leaf.get_options()) {
        if (opt->count() == 0) continue;
        const std::string name = opt->get_single_name();
        if (name == "help" || name == "version" || name == "manifest") continue;
        if (opt->get_expected_max() == 0) {
            params[name] = true;
        } else {
            params[name] = opt->results().back();
        }
    }
    return params;
}

// Command path from the root, e.g. {"analytic", "turnover"}.
std::vector<const CLI::App*> selected_path(const CLI::App& root) {
    std::vector<const CLI::App*> path;
    const CLI::App* app = &root;
    for (;;) {
        auto subs = app->get_subcommands();
        if (subs.empty()) break;
        app = subs.front();
        path.push_back(app);
    }
    return path;
}

void add_common(CLI::App& app, std::string& manifest_path) {
    app.set_version_flag("--version", std::string("alphacross ") + kVersion);
    app.add_option("--manifest", manifest_path, "Where to write the run manifest");
}

struct Options {
    std::string manifest;

    // cross
    std::string blotters;
    std::string investment_per_stream;

    // analytic
    double w1 = 0.5, t1 = 0.0, w2 = 0.5, t2 = 0.0;
    double tau = 0.0, rho = 0.0, rho_lower = 0.0, rho_upper = 0.0, psi = 1.0, rho0 = 0.0;
    int n = 1, k = 0;
    std::string bounds_json;

    // simulate
    sim::EnsembleConfig ensemble;
    std::string scaling = "exact";
    std::string out;
    std::string fit_out;
    bool fit = false;
    bool netting = false;
    int workers = 0;

    // corr
    std::string returns;
    std::string factors;
    std::string rf;
    double q_low = 0.05, q_high = 0.95;
    int min_overlap = 24;
    int bins = 101;
    std::string bounds_out;
    bool both = false;

    // savings
    double crossed = 0.0, spread_bps = 0.0, days = 0.0, streams = 0.0;

    // replay
    std::string replay_manifest;
};

int cmd_cross(const Options& o, Streams s) {
    auto investment = Cents::parse(o.investment_per_stream);
    auto blotters = load_blotters(o.blotters, investment);
    if (blotters.size() == 2) {
        print_json(s.out, to_json(cross_pair(blotters[0], blotters[1])));
    } else {
        print_json(s.out, to_json(cross_many(blotters)));
    }
    return kSuccess;
}

int cmd_analytic(const std::string& which, const Options& o, Streams s) {
    namespace an = analytic;
    if (which == "pair") {
        print_json(s.out, {{"turnover", an::pair_turnover(o.w1, o.t1, o.w2, o.t2, o.rho)}});
    } else if (which == "turnover") {
        print_json(s.out, {{"turnover", an::turnover_closed(o.tau, o.rho, o.n)}});
    } else if (which == "limit") {
        print_json(s.out, {{"limit", an::turnover_limit(o.tau, o.rho)}});
    } else if (which == "bounds") {
        double lo = o.rho_lower;
        double hi = o.rho_upper;
        if (!o.bounds_json.empty()) {
            std::ifstream in(o.bounds_json);
            if (!in) throw InputError("cannot open '" + o.bounds_json + "'");
            json j;
            try {
                in >> j;
                lo = j.at("rho_lower").get<double>();
                hi = j.at("rho_upper").get<double>();
            } catch (const json::exception& e) {
                throw InputError("'" + o.bounds_json + "': " + e.what());
            }
        }
        auto iv = an::limit_interval(o.tau, lo, hi);
        print_json(s.out, {{"lower", iv.lower}, {"upper", iv.upper}});
    } else if (which == "rho-k") {
        print_json(s.out, {{"rho", an::rho_after_doublings(o.rho0, o.k)}});
    } else if (which == "netting") {
        auto f = an::netting_factor({o.psi, o.n});
        auto enh = f.enhancement();
        print_json(s.out, {{"zeta", f.zeta},
                           {"fully_netted", f.fully_netted},
                           {"enhancement", enh ? json(*enh) : json(nullptr)}});
    } else if (which == "min-rho") {
        print_json(s.out, {{"min_rho", an::min_uniform_correlation(o.n)}});
    } else {
        throw InputError("unknown analytic subcommand '" + which + "'");
    }
    return kSuccess;
}

json curve_json(const sim::TurnoverCurve& c) {
    json arr = json::array();
    for (const auto& p : c.points) {
        arr.push_back({{"n", p.n}, {"turnover_mean", p.mean}, {"turnover_stderr", p.std_error}});
    }
    return arr;
}

int cmd_simulate(const Options& o, Streams s) {
    sim::EnsembleConfig cfg = o.ensemble;
    cfg.scaling = sim::parse_gross_scaling(o.scaling);
    if (!sim::is_power_of_two(cfg.n_streams)) {
        throw InputError("--n " + std::to_string(cfg.n_streams) + " is not a power of two");
    }
    auto ensemble = sim::generate_ensemble(cfg);
    sim::RunOptions run{o.workers};

    auto curve = sim::tournament_turnover(ensemble, run);
    json result = {{"curve", curve_json(curve)}};
    if (!o.out.empty()) write_file(o.out, sim::curve_to_csv(curve));

    if (o.fit) {
        auto fit = sim::fit_inverse_n(curve);
        result["fit"] = sim::to_json(fit);
        fs::path fit_path = !o.fit_out.empty() ? fs::path(o.fit_out)
                            : !o.out.empty()   ? sibling(o.out, ".fit.json")
                                               : fs::path();
        if (!fit_path.empty()) write_file(fit_path, sim::to_json(fit).dump(2) + "\n");
    }
    if (o.netting) {
        auto zeta = sim::measure_netting(ensemble, run);
        result["netting"] = curve_json(zeta);
        if (!o.out.empty()) write_file(sibling(o.out, ".netting.csv"), sim::curve_to_csv(zeta));
    }
    print_json(s.out, result);
    return kSuccess;
}

int cmd_corr(const Options& o, Streams s) {
    auto panel = corr::load_returns(o.returns);
    std::optional<corr::ReturnsPanel> adjusted;
    if (!o.factors.empty()) {
        auto factors = corr::load_panel(o.factors, 1);
        std::optional<std::string> rf;
        if (!o.rf.empty()) rf = o.rf;
        adjusted = corr::factor_residuals(panel, factors, rf);
    } else if (!o.rf.empty() || o.both) {
        throw InputError("--rf and --both require --factors");
    }

    auto bounds_for = [&](const corr::ReturnsPanel& p) {
        auto c = corr::estimate_correlations(p, o.min_overlap);
        for (const auto& w : c.warnings) s.err << "warning: " << w << '\n';
        return corr::offdiag_quantile_bounds(c, o.q_low, o.q_high, o.bins);
    };

    auto primary = bounds_for(adjusted ? *adjusted : panel);
    json result = corr::to_json(primary);
    if (!o.out.empty()) write_file(o.out, corr::histogram_to_csv(primary));

    if (o.both) {
        auto raw = bounds_for(panel);
        result["raw"] = corr::to_json(raw);
        if (!o.out.empty()) write_file(sibling(o.out, ".raw.csv"), corr::histogram_to_csv(raw));
    }
    if (!o.bounds_out.empty()) write_file(o.bounds_out, result.dump(2) + "\n");
    print_json(s.out, result);
    return kSuccess;
}

int cmd_savings(const Options& o, Streams s) {
    print_json(s.out, {{"savings", estimate_savings(o.crossed, o.spread_bps, o.days, o.streams)}});
    return kSuccess;
}

int dispatch(const std::vector<std::string>& args, Streams s, int depth);

int execute(CLI::App& app, Options& o, const std::vector<std::string>& args, Streams s, int depth) {
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, s.out, s.err);
        return code == 0 ? kSuccess : kInputError;
    }

    auto path = selected_path(app);
    if (path.empty()) {
        s.err << app.help();
        return kInputError;
    }
    const CLI::App& leaf = *path.back();
    const std::string top = path.front()->get_name();

    if (top == "replay") {
        if (depth > 0) throw InputError("replay manifests cannot themselves be replays");
        auto manifest = read_manifest(o.replay_manifest);
        if (manifest.artifact_version != kVersion) {
            s.err << "warning: manifest written by alphacross " << manifest.artifact_version << ", running "
                  << kVersion << '\n';
        }
        auto replay_args = manifest.to_args();
        if (!o.manifest.empty()) {
            replay_args.push_back("--manifest");
            replay_args.push_back(o.manifest);
        }
        return dispatch(replay_args, s, depth + 1);
    }

    int code = kSuccess;
    std::optional<std::uint64_t> seed;
    if (top == "cross") {
        code = cmd_cross(o, s);
    } else if (top == "analytic") {
        if (path.size() < 2) {
            s.err << path.front()->help();
            return kInputError;
        }
        code = cmd_analytic(leaf.get_name(), o, s);
    } else if (top == "simulate") {
        seed = o.ensemble.seed;
        code = cmd_simulate(o, s);
    } else if (top == "corr") {
        code = cmd_corr(o, s);
    } else if (top == "savings") {
        code = cmd_savings(o, s);
    }

    RunManifest manifest;
    for (const auto* a : path) manifest.command += (manifest.command.empty() ? "" : " ") + a->get_name();
    manifest.parameters = collect_parameters(leaf);
    manifest.seed = seed;
    manifest.timestamp = utc_timestamp();

    fs::path manifest_path;
    if (!o.manifest.empty()) {
        manifest_path = o.manifest;
    } else if (!o.out.empty()) {
        manifest_path = o.out + ".manifest.json";
    } else {
        std::string stem = manifest.command;
        std::replace(stem.begin(), stem.end(), ' ', '-');
        manifest_path = "alphacross-" + stem + ".manifest.json";
    }
    write_manifest(manifest, manifest_path);
    return code;
}

int dispatch(const std::vector<std::string>& args, Streams s, int depth) {
    Options o;
    CLI::App app{"Alpha-stream combination with internal crossing: blotter crossing, closed-form turnover, "
                 "Monte Carlo verification and correlation bounds.",
                 "alphacross"};
    app.set_version_flag("--version", std::string("alphacross ") + kVersion);
    app.require_subcommand(0, 1);

    auto* cross = app.add_subcommand("cross", "Cross blotters from a stream,symbol,dollars CSV");
    add_common(*cross, o.manifest);
    cross->add_option("--blotters", o.blotters, "Blotter CSV")->required();
    cross->add_option("--investment-per-stream", o.investment_per_stream, "Dollars invested per stream")->required();

    auto* analytic = app.add_subcommand("analytic", "Closed-form turnover, correlation and netting results");
    add_common(*analytic, o.manifest);
    analytic->require_subcommand(0, 1);

    auto* pair = analytic->add_subcommand("pair", "Turnover of two crossed streams");
    add_common(*pair, o.manifest);
    pair->add_option("--w1", o.w1)->required();
    pair->add_option("--t1", o.t1)->required();
    pair->add_option("--w2", o.w2)->required();
    pair->add_option("--t2", o.t2)->required();
    pair->add_option("--rho", o.rho)->required();

    auto* turnover = analytic->add_subcommand("turnover", "Turnover of N uniformly correlated streams");
    add_common(*turnover, o.manifest);
    turnover->add_option("--tau", o.tau)->required();
    turnover->add_option("--rho", o.rho)->required();
    turnover->add_option("--n", o.n)->required();

    auto* limit = analytic->add_subcommand("limit", "Large-N turnover floor tau * rho");
    add_common(*limit, o.manifest);
    limit->add_option("--tau", o.tau)->required();
    limit->add_option("--rho", o.rho)->required();

    auto* bounds = analytic->add_subcommand("bounds", "Turnover-limit interval from correlation quantile bounds");
    add_common(*bounds, o.manifest);
    bounds->add_option("--tau", o.tau)->required();
    auto* lo_opt = bounds->add_option("--rho-lower", o.rho_lower);
    auto* hi_opt = bounds->add_option("--rho-upper", o.rho_upper);
    auto* file_opt = bounds->add_option("--bounds-json", o.bounds_json, "Bounds JSON written by `corr`");
    lo_opt->needs(hi_opt)->excludes(file_opt);
    hi_opt->needs(lo_opt)->excludes(file_opt);
    bounds->callback([&] {
        if (lo_opt->count() == 0 && file_opt->count() == 0) {
            throw CLI::ValidationError("bounds", "give --rho-lower/--rho-upper or --bounds-json");
        }
    });

    auto* rho_k = analytic->add_subcommand("rho-k", "Correlation between halves after k doublings");
    add_common(*rho_k, o.manifest);
    rho_k->add_option("--rho0", o.rho0)->required();
    rho_k->add_option("--k", o.k)->required();

    auto* netting = analytic->add_subcommand("netting", "Netting factor zeta(N) in one aggregation unit");
    add_common(*netting, o.manifest);
    netting->add_option("--psi", o.psi)->required();
    netting->add_option("--n", o.n)->required();

    auto* min_rho = analytic->add_subcommand("min-rho", "Lowest feasible uniform correlation for N streams");
    add_common(*min_rho, o.manifest);
    min_rho->add_option("--n", o.n)->required();

    o.ensemble.n_stocks = 64;
    o.ensemble.paths = 1000;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo tournament turnover curve");
    add_common(*simulate, o.manifest);
    simulate->add_option("--n", o.ensemble.n_streams, "Number of streams (power of two)")->required();
    simulate->add_option("--stocks", o.ensemble.n_stocks, "Stock universe size")->capture_default_str();
    simulate->add_option("--c0", o.ensemble.base_correlation, "Pairwise trade correlation in [0, 1]")->required();
    simulate->add_option("--tau", o.ensemble.tau, "Per-stream turnover")->capture_default_str();
    simulate->add_option("--investment", o.ensemble.total_investment, "Total investment in dollars")
        ->capture_default_str();
    simulate->add_option("--paths", o.ensemble.paths, "Monte Carlo paths")->capture_default_str();
    simulate->add_option("--seed", o.ensemble.seed, "Random seed")->capture_default_str();
    simulate->add_option("--scaling", o.scaling, "Per-stream gross scaling: exact or expected")
        ->capture_default_str();
    simulate->add_option("--workers", o.workers, "Worker threads (0 = all cores)")->capture_default_str();
    simulate->add_option("--out", o.out, "Turnover curve CSV");
    simulate->add_option("--fit-out", o.fit_out, "Fit JSON (default: next to --out)");
    simulate->add_flag("--fit", o.fit, "Fit A0 + A1/N to the curve");
    simulate->add_flag("--netting", o.netting, "Also measure the netting curve");

    auto* corr_cmd = app.add_subcommand("corr", "Correlation density and truncated quantile bounds");
    add_common(*corr_cmd, o.manifest);
    corr_cmd->add_option("--returns", o.returns, "Returns CSV")->required();
    corr_cmd->add_option("--factors", o.factors, "Factor CSV");
    corr_cmd->add_option("--rf", o.rf, "Risk-free column in the factor CSV");
    corr_cmd->add_option("--qlow", o.q_low)->capture_default_str();
    corr_cmd->add_option("--qhigh", o.q_high)->capture_default_str();
    corr_cmd->add_option("--min-overlap", o.min_overlap)->capture_default_str();
    corr_cmd->add_option("--bins", o.bins)->capture_default_str();
    corr_cmd->add_option("--out", o.out, "Histogram CSV");
    corr_cmd->add_option("--bounds-out", o.bounds_out, "Bounds JSON file");
    corr_cmd->add_flag("--both", o.both, "Also emit raw (unadjusted) results");

    auto* savings = app.add_subcommand("savings", "Spread savings from internal crossing");
    add_common(*savings, o.manifest);
    savings->add_option("--crossed", o.crossed, "Crossed dollars per stream per day")->required();
    savings->add_option("--spread-bps", o.spread_bps)->required();
    savings->add_option("--days", o.days)->required();
    savings->add_option("--streams", o.streams)->required();

    auto* replay = app.add_subcommand("replay", "Re-run a command from its manifest");
    replay->set_version_flag("--version", std::string("alphacross ") + kVersion);
    replay->add_option("manifest_file", o.replay_manifest, "Manifest JSON")->required();
    replay->add_option("--manifest", o.manifest, "Where to write the new manifest");

    return execute(app, o, args, s, depth);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Streams s{out, err};
    try {
        return dispatch(args, s, 0);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const DegenerateError& e) {
        err << "error: " << e.what() << '\n';
        return kDegenerate;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kDegenerate;
    }
}

} // namespace alphacross::cli
