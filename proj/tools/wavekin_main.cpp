// Command-line driver: run (evolve, write ledger + snapshots), verify (run
// the check suite, write the JSON report), eval (one collision-operator
// evaluation dump). Exit codes: 0 success, 1 a check or invariant failed
// (runs only fail in --strict mode), 2 configuration or usage error.
//
// Every output file is stamped with the FNV-1a hash of the canonical config
// serialization plus the effective seed, so identical config + seed gives
// byte-identical outputs.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wavekin/config.hpp"
#include "wavekin/io.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "configuration JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "output directory, created if missing");
    cmd->add_option("--seed", args.seed, "override verify.seed from the config")
        ->each([&args](const std::string&) { args.seed_given = true; });
}

wavekin::OutputStamp make_stamp(const wavekin::ConfigFile& cfg, const CommonArgs& args) {
    wavekin::OutputStamp stamp;
    stamp.config_hash = wavekin::config_hash(cfg);
    stamp.seed = args.seed_given ? args.seed : cfg.verify.seed;
    return stamp;
}

int run_command(const wavekin::ConfigFile& cfg, const CommonArgs& args, bool strict) {
    const auto grid = cfg.make_grid();
    const auto f0 = wavekin::initial_spectrum(cfg, grid);
    const auto env = wavekin::config_envelope(cfg, f0);
    const auto stamp = make_stamp(cfg, args);
    const std::filesystem::path out(args.out_dir);

    std::size_t snapshots = 0;
    auto on_record = [&](const wavekin::LedgerRow& row, const wavekin::Spectrum& f) {
        const auto lower = wavekin::envelope_lower(f0, row.t, cfg.physical);
        wavekin::write_snapshot(
            out / ("spectrum_t" + wavekin::detail::format_double(row.t) + ".csv"), f,
            lower.values, stamp);
        ++snapshots;
    };
    const auto result = wavekin::evolve(f0, cfg.run, env, on_record);
    wavekin::write_ledger(out / "ledger.csv", result.ledger, stamp);

    std::size_t bad_rows = 0;
    bool truncation = false;
    for (const auto& row : result.ledger.rows) {
        if (!(row.s1 && row.s2 && row.s3)) ++bad_rows;
        truncation = truncation || row.trunc_warn;
    }
    std::printf("run: %zu ledger rows, %zu snapshots -> %s\n", result.ledger.rows.size(),
                snapshots, out.string().c_str());
    std::printf("run: final t=%g mass=%.6g", cfg.run.T, wavekin::mass(result.final));
    if (bad_rows > 0) std::printf("  [invariant flags failed on %zu rows]", bad_rows);
    if (truncation) std::printf("  [truncation warning: mass reached the grid edge]");
    std::printf("\n");
    return (strict && bad_rows > 0) ? 1 : 0;
}

int verify_command(const wavekin::ConfigFile& cfg, const CommonArgs& args,
                   const std::string& suite_flag) {
    std::string suite = suite_flag.empty() ? cfg.verify.suite : suite_flag;
    wavekin::validate_suite_name(suite);

    const auto grid = cfg.make_grid();
    const wavekin::PhysicalParams& p = cfg.physical;
    const double N = cfg.run.order;

    auto fam = cfg.sample_family(grid);
    if (args.seed_given) fam.seed = args.seed;
    auto pair_fam = fam;
    pair_fam.count = cfg.verify.pair_count;

    // "all" runs every check the configured physics admits: the continuity
    // constants and the vanishing-broadening slope need a dispersion gap,
    // the colinear energy check needs the gapless uniform grid from r = 0.
    const bool gapped = p.lambda1 > 0.0;
    const bool colinear_ready = !gapped && grid->spacing == wavekin::GridSpacing::uniform &&
                                grid->r_min() == 0.0;
    auto selected = [&](const char* name) {
        if (suite == name) return true;
        if (suite != "all") return false;
        const std::string s(name);
        if (s == "holder" || s == "gamma_limit" || s == "ledger" || s == "stability") {
            return gapped;
        }
        if (s == "exact_energy") return colinear_ready;
        return true;
    };

    std::vector<wavekin::VerifyReport> reports;
    double l_emp = 0.0;
    bool need_l_emp = selected("holder") || selected("stability");
    if (need_l_emp) {
        l_emp = wavekin::empirical_lipschitz(pair_fam, N, p);
    }
    if (selected("attenuation")) {
        reports.push_back(wavekin::check_attenuation(fam, p));
    }
    if (selected("gain_moment")) {
        reports.push_back(wavekin::check_gain_moment(fam, N, p));
    }
    if (selected("holder")) {
        auto holder = wavekin::check_holder(pair_fam, N, p);
        reports.insert(reports.end(), holder.begin(), holder.end());
    }
    if (selected("ledger") || selected("gamma_limit") || selected("stability")) {
        const auto f0 = wavekin::initial_spectrum(cfg, grid);
        if (selected("ledger")) {
            const auto env = wavekin::config_envelope(cfg, f0);
            const auto result = wavekin::evolve(f0, cfg.run, env);
            auto ledger = wavekin::check_ledger(result.ledger, env, p, *grid);
            reports.insert(reports.end(), ledger.begin(), ledger.end());
        }
        if (selected("gamma_limit")) {
            reports.push_back(wavekin::check_gamma_limit(f0, p, cfg.verify.scales));
        }
        if (selected("stability")) {
            auto g0 = f0;
            for (double& v : g0.values) v *= 1.01;
            reports.push_back(wavekin::check_stability(f0, g0, cfg.run, l_emp));
        }
    }
    if (selected("exact_energy")) {
        reports.push_back(wavekin::check_exact_energy(fam, p));
    }
    if (reports.empty()) {
        std::fprintf(stderr, "wavekin: error: suite \"%s\" selects no checks for this config\n",
                     suite.c_str());
        return 2;
    }

    const auto stamp = make_stamp(cfg, args);
    const std::filesystem::path report_path =
        std::filesystem::path(args.out_dir) / "report.json";
    wavekin::write_report(report_path, reports, stamp);

    bool all_passed = true;
    for (const auto& r : reports) {
        all_passed = all_passed && r.passed;
        std::printf("%-28s %s  worst %.6g vs bound %.6g [%s] %s\n", r.name.c_str(),
                    r.passed ? "pass" : "FAIL", r.worst_ratio, r.bound, r.provenance.c_str(),
                    r.note.c_str());
    }
    std::printf("verify: %zu checks -> %s\n", reports.size(), report_path.string().c_str());
    return all_passed ? 0 : 1;
}

int eval_command(const wavekin::ConfigFile& cfg, const CommonArgs& args) {
    const auto grid = cfg.make_grid();
    const auto f0 = wavekin::initial_spectrum(cfg, grid);
    wavekin::CollisionResult result;
    if (cfg.run.mode == wavekin::RunMode::exact_resonance) {
        result = wavekin::evaluate_exact(f0, cfg.physical);
    } else {
        const auto table = wavekin::build_triads(*grid);
        result = wavekin::evaluate(f0, cfg.physical, table);
    }
    const std::filesystem::path path = std::filesystem::path(args.out_dir) / "eval.csv";
    wavekin::write_eval(path, f0, result, make_stamp(cfg, args));
    std::printf("eval: %zu nodes -> %s\n", f0.size(), path.string().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"near-resonance three-wave kinetic solver and verification harness"};
    app.require_subcommand(1);

    CommonArgs run_args, verify_args, eval_args;
    bool strict = false;
    bool at_t0 = false;
    std::string suite_flag;

    CLI::App* run_cmd = app.add_subcommand("run", "evolve and write ledger + snapshots");
    add_common_options(run_cmd, run_args);
    run_cmd->add_flag("--strict", strict, "exit nonzero if any invariant flag fails");

    CLI::App* verify_cmd_app =
        app.add_subcommand("verify", "run the check suite and write report.json");
    add_common_options(verify_cmd_app, verify_args);
    verify_cmd_app->add_option("--suite", suite_flag,
                               "check to run (or \"all\"); defaults to verify.suite");

    CLI::App* eval_cmd_app =
        app.add_subcommand("eval", "write one collision-operator evaluation as CSV");
    add_common_options(eval_cmd_app, eval_args);
    eval_cmd_app->add_flag("--t0", at_t0,
                           "evaluate at the configured initial condition (the default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const CommonArgs& args = run_cmd->parsed()       ? run_args
                                 : verify_cmd_app->parsed() ? verify_args
                                                            : eval_args;
        const wavekin::ConfigFile cfg = wavekin::load_config(args.config_path);
        std::filesystem::create_directories(args.out_dir);
        if (run_cmd->parsed()) return run_command(cfg, args, strict);
        if (verify_cmd_app->parsed()) return verify_command(cfg, args, suite_flag);
        return eval_command(cfg, args);
    } catch (const std::exception& e) {
        std::cerr << "wavekin: error: " << e.what() << '\n';
        return 2;
    }
}
