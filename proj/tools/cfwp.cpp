#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "cfwp/config.hpp"

namespace {

using cfwp::Json;

struct CommonArgs {
    std::string config_path;
    std::string out_path;     // empty: stdout
    std::string csv_dir;
    unsigned jobs = 0;
    double tol = 0.0;         // 0: keep config value
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_csv = false) {
    cmd->add_option("--config", args.config_path, "run configuration (JSON)")->required();
    cmd->add_option("--out", args.out_path, "output path (default: stdout)");
    if (with_csv) cmd->add_option("--csv-dir", args.csv_dir, "directory for trajectory CSV files");
    cmd->add_option("--jobs", args.jobs, "max concurrent mode classifications");
    cmd->add_option("--tol", args.tol, "override integration relative tolerance");
    cmd->add_option("--set", args.sets, "override config values, key.path=value")
        ->take_all();
}

cfwp::RunConfig load(const CommonArgs& args) {
    std::ifstream in(args.config_path);
    if (!in) throw cfwp::IOError("cannot open config file '" + args.config_path + "'");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw cfwp::ConfigError(std::string("malformed JSON: ") + e.what());
    }
    cfwp::apply_overrides(doc, args.sets);

    // The environment window, when set, wins over the config document.
    cfwp::Window env = cfwp::window_from_env(cfwp::Window{0.0, 0.0});
    if (env.tmin > 0.0) doc["window"] = Json::array({env.tmin, env.tmax});

    cfwp::RunConfig cfg = cfwp::parse_config(doc);
    if (args.tol > 0.0) {
        if (args.tol > 1e-2) throw cfwp::ConfigError("--tol out of range");
        cfg.classify.shoot.rel_tol = args.tol;
    }
    return cfg;
}

void emit(const std::string& out_path, const Json& j) {
    std::string text = j.dump(2);
    text.push_back('\n');
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    cfwp::write_file_atomic(out_path, text);
}

void write_trajectory_csv(const std::string& path, const cfwp::Trajectory& traj) {
    std::string body = "t,U,W\n";
    for (std::size_t i = 0; i < traj.nodes.size(); ++i) {
        body += cfwp::format_17(traj.nodes[i]);
        body += ',';
        body += cfwp::format_17(traj.states[i][0]);
        body += ',';
        body += cfwp::format_17(traj.states[i][1]);
        body += '\n';
    }
    cfwp::write_file_atomic(path, body);
}

int run_check(const CommonArgs& args) {
    cfwp::RunConfig cfg = load(args);
    cfwp::HypothesesOutcome outcome = cfwp::check_all(cfg.geometry);
    emit(args.out_path, cfwp::to_json(outcome));

    bool any_fails = false;
    for (const auto& rep : outcome.reports)
        if (rep.status == cfwp::CheckStatus::Fails) any_fails = true;
    if (outcome.all_hold) return 0;
    return any_fails ? 2 : 3;
}

int run_solve_mode(const CommonArgs& args) {
    cfwp::RunConfig cfg = load(args);
    if (!cfg.mode) throw cfwp::ConfigError("solve-mode requires a 'mode' block");

    cfwp::PreparedGeometry prepared = cfwp::prepare_geometry(cfg.geometry);
    cfwp::ModeVerdict verdict = cfwp::classify_mode(prepared, *cfg.mode, cfg.classify);
    Json out = cfwp::to_json(verdict);
    out["hypotheses"] = cfwp::to_json(prepared.hypotheses);
    emit(args.out_path, out);

    if (!args.csv_dir.empty()) {
        std::filesystem::create_directories(args.csv_dir);
        cfwp::RadialCoeffs co(prepared.effective, *cfg.mode);
        auto ind = cfwp::indicial(co);
        auto bounded = cfwp::solve_bounded(co.field(), ind, cfg.classify.shoot);
        for (std::size_t i = 0; i < bounded.size(); ++i) {
            write_trajectory_csv(args.csv_dir + "/trajectory_" + std::to_string(i) + ".csv",
                                 bounded[i]);
        }
    }

    switch (verdict.verdict) {
        case cfwp::VerdictKind::NoL2: return 0;
        case cfwp::VerdictKind::CandidateL2: return 2;
        case cfwp::VerdictKind::Inconclusive: return 3;
    }
    return 3;
}

int run_sweep(const CommonArgs& args) {
    cfwp::RunConfig cfg = load(args);
    if (!cfg.sweep_grid) throw cfwp::ConfigError("sweep requires a 'sweep' block");

    cfwp::SweepOptions opts;
    opts.classify = cfg.classify;
    opts.jobs = args.jobs;
    cfwp::SweepReport report = cfwp::sweep(cfg.geometry, *cfg.sweep_grid, opts);
    emit(args.out_path, cfwp::sweep_report_to_json(report, cfg.raw["geometry"]));

    if (report.candidate > 0) return 2;
    if (report.inconclusive > 0) return 3;
    return 0;
}

int run_lemmas(const CommonArgs& args) {
    cfwp::RunConfig cfg = load(args);
    if (!cfg.mode) throw cfwp::ConfigError("lemmas requires a 'mode' block");
    cfwp::IdentityReport rep = cfwp::verify_identities(cfg.geometry, *cfg.mode);
    emit(args.out_path, cfwp::to_json(rep));
    return rep.all_passed ? 0 : 2;
}

int run_reparam(const CommonArgs& args) {
    cfwp::RunConfig cfg = load(args);
    if (!cfg.geometry.gamma())
        throw cfwp::ConfigError("reparam requires a geometry with a gamma profile");

    cfwp::ReparamResult rep = cfwp::reparametrize(cfg.geometry);
    const cfwp::Window& w = rep.geometry.window();
    std::size_t n = static_cast<std::size_t>(64.0 * std::log10(w.tmax / w.tmin)) + 2;

    std::string body = "s,alpha,beta\n";
    for (double s : cfwp::log_grid(w.tmin, w.tmax, n)) {
        body += cfwp::format_17(s);
        body += ',';
        body += cfwp::format_17(rep.geometry.alpha()(s));
        body += ',';
        body += cfwp::format_17(rep.geometry.beta()(s));
        body += '\n';
    }
    if (args.out_path.empty()) std::cout << body;
    else cfwp::write_file_atomic(args.out_path, body);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial Dirac-mode analysis on circle-fibered warped products"};
    app.require_subcommand(1);

    CommonArgs check_args, solve_args, sweep_args, lemmas_args, reparam_args;
    CLI::App* cmd_check = app.add_subcommand("check", "evaluate the vanishing-theorem hypotheses");
    add_common(cmd_check, check_args);
    CLI::App* cmd_solve = app.add_subcommand("solve-mode", "classify a single spinor mode");
    add_common(cmd_solve, solve_args, true);
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "classify a grid of spinor modes");
    add_common(cmd_sweep, sweep_args);
    CLI::App* cmd_lemmas = app.add_subcommand("lemmas", "run the identity suite for one mode");
    add_common(cmd_lemmas, lemmas_args);
    CLI::App* cmd_reparam = app.add_subcommand("reparam", "tabulate the conformal reparametrization");
    add_common(cmd_reparam, reparam_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_check->parsed()) return run_check(check_args);
        if (cmd_solve->parsed()) return run_solve_mode(solve_args);
        if (cmd_sweep->parsed()) return run_sweep(sweep_args);
        if (cmd_lemmas->parsed()) return run_lemmas(lemmas_args);
        if (cmd_reparam->parsed()) return run_reparam(reparam_args);
    } catch (const cfwp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 64;
    } catch (const cfwp::IOError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 74;
    } catch (const cfwp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 70;
    }
    return 64;
}
