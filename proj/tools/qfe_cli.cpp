// qfe_cli.cpp — command-line front end: scan, run, validate, sweep
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include "qfe/config.hpp"
#include "qfe/cycle.hpp"
#include "qfe/errors.hpp"
#include "qfe/report_io.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
    std::string config;
    std::string out;
    long long seed{0};  // reserved, the core is deterministic
    int threads{1};
    std::string sweep_parameter;
    std::vector<double> sweep_values;
    bool quiet{false};
};

qfe::RunConfig load(const Options& o) {
    qfe::RunConfig cfg = o.config.empty() ? qfe::parse_config(json::object()) : qfe::load_config(o.config);
    if (!o.out.empty()) cfg.outputs.directory = o.out;
    return cfg;
}

void print_resolution(const qfe::Resolution& res) {
    std::printf("omega_eff_1 = %.6f\nomega_eff_2 = %.6f\ndelta_omega = %.6f\n", res.drive.omega_eff_1,
                res.drive.omega_eff_2, res.drive.delta_omega());
    if (res.resonances) {
        std::printf("gap_1 = %.6g (levels %d,%d)\ngap_2 = %.6g (levels %d,%d)\n", res.resonances->wall1.gap,
                    res.resonances->wall1.level_pair.first, res.resonances->wall1.level_pair.second,
                    res.resonances->wall2.gap, res.resonances->wall2.level_pair.first,
                    res.resonances->wall2.level_pair.second);
    }
    for (const auto& n : res.notes) std::printf("note: %s\n", n.c_str());
}

int cmd_validate(const Options& o) {
    const qfe::RunConfig cfg = load(o);
    std::cout << qfe::to_json(cfg).dump(2) << "\nconfig_hash = " << qfe::hash_hex(qfe::config_hash(cfg))
              << "\nvalid\n";
    return 0;
}

int cmd_scan(const Options& o) {
    qfe::RunConfig cfg = load(o);
    // The scan always locates both resonances, whatever the config pins.
    cfg.omega_c_auto = cfg.omega_eff_1_auto = cfg.omega_eff_2_auto = true;
    const qfe::Resolution res = qfe::resolve(cfg, o.threads);
    qfe::write_scan_outputs(cfg.outputs.directory, cfg, res);
    print_resolution(res);
    if (res.bare_fallback) std::printf("degenerate crossing: reported the bare resonances\n");
    return 0;
}

struct RunSummary {
    qfe::Resolution res;
    qfe::EngineResult result;
};

RunSummary execute(const qfe::RunConfig& cfg, const fs::path& dir, bool verbose, int scan_threads) {
    RunSummary s{qfe::resolve(cfg, scan_threads), {}};
    qfe::EngineOptions opt = cfg.engine;
    if (verbose) opt.progress = [](const std::string& m) { std::fprintf(stderr, "[qfe] %s\n", m.c_str()); };
    qfe::DriveSchedule sched = s.res.drive;
    s.result = qfe::run_engine(s.res.model, cfg.baths, sched, cfg.truncation, opt);
    qfe::write_run_outputs(dir, cfg, s.res, s.result);
    return s;
}

int cmd_run(const Options& o) {
    const qfe::RunConfig cfg = load(o);
    const RunSummary s = execute(cfg, cfg.outputs.directory, !o.quiet, o.threads);
    print_resolution(s.res);
    for (const auto& c : s.result.cycles) {
        std::printf("cycle %d: eta = %.6f (carnot %.6f), W_out = %.6e, Q_in = %.6e%s\n", c.index, c.eta,
                    c.eta_carnot, c.W_out, c.Q_in, c.engine_works ? "" : "  [W_out <= 0]");
        std::printf("         suppression cold %.2f%%, hot %.2f%%\n", 100.0 * c.suppression_cold,
                    100.0 * c.suppression_hot);
    }
    const auto& d = s.result.diagnostics;
    std::printf("trace drift %.3g, first-law residual %.3g, min eigenvalue %.3g, %.1f s\n", d.max_trace_drift,
                d.max_first_law_residual, d.min_eigenvalue, d.wall_seconds);
    return 0;
}

int cmd_sweep(const Options& o) {
    const qfe::RunConfig cfg = load(o);
    qfe::SweepConfig sweep = cfg.sweep.value_or(qfe::SweepConfig{});
    if (!o.sweep_parameter.empty()) sweep.parameter = o.sweep_parameter;
    if (!o.sweep_values.empty()) sweep.values = o.sweep_values;
    if (sweep.parameter.empty() || sweep.values.empty()) {
        throw qfe::InvalidParameter({"sweep: need a parameter and at least one value"});
    }
    std::vector<qfe::RunConfig> runs;
    for (double v : sweep.values) runs.push_back(qfe::with_parameter(cfg, sweep.parameter, v));

    const fs::path root = cfg.outputs.directory;
    std::vector<json> rows(runs.size());
    std::vector<std::string> failures(runs.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    const auto worker = [&] {
        for (std::size_t k = next++; k < runs.size(); k = next++) {
            const std::string tag = sweep.parameter + "=" + json(sweep.values[k]).dump();
            try {
                const RunSummary s = execute(runs[k], root / tag, false, 1);
                json cycles = json::array();
                for (const auto& c : s.result.cycles) cycles.push_back(qfe::to_json(c));
                rows[k] = {{"value", sweep.values[k]}, {"directory", tag}, {"cycles", cycles}};
            } catch (const std::exception& e) {
                failures[k] = e.what();
                rows[k] = {{"value", sweep.values[k]}, {"directory", tag}, {"error", e.what()}};
            }
            std::lock_guard lock(log_mutex);
            if (!o.quiet) std::fprintf(stderr, "[qfe] sweep point %s done\n", tag.c_str());
        }
    };
    std::vector<std::thread> pool;
    const int n_workers = std::max(1, std::min<int>(o.threads, static_cast<int>(runs.size())));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    fs::create_directories(root);
    qfe::write_json(root / "sweep.json", {{"parameter", sweep.parameter},
                                          {"config_hash", qfe::hash_hex(qfe::config_hash(cfg))},
                                          {"points", rows}});
    std::printf("%-14s %-10s %-14s %-14s\n", "value", "cycle", "eta", "W_out");
    for (const auto& r : rows) {
        if (r.contains("error")) {
            std::printf("%-14g failed: %s\n", r["value"].get<double>(), r["error"].get<std::string>().c_str());
            continue;
        }
        for (const auto& c : r["cycles"]) {
            std::printf("%-14g %-10d %-14s %-14.6e\n", r["value"].get<double>(), c["index"].get<int>(),
                        c["eta"].is_null() ? "n/a" : std::to_string(c["eta"].get<double>()).c_str(),
                        c["W_out"].get<double>());
        }
    }
    for (const auto& f : failures) {
        if (!f.empty()) return kExitNumerical;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum-field Otto engine: dressed-state spectrum scans and open-system cycle simulation"};
    app.set_version_flag("--version", std::string(qfe::code_version()));
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    app.add_option("--config,-c", o.config, "JSON configuration file (defaults when omitted)");
    app.add_option("--out,-o", o.out, "Output directory (overrides outputs.directory)");
    app.add_option("--seed", o.seed, "Reserved; the simulation is deterministic");
    app.add_option("--threads,-j", o.threads, "Worker threads for scans and sweeps")->check(CLI::PositiveNumber);
    app.add_flag("--quiet,-q", o.quiet, "Suppress progress messages");

    auto* scan = app.add_subcommand("scan", "Spectrum scan and avoided-crossing location");
    auto* run = app.add_subcommand("run", "Transient plus Otto cycles; writes ledger and cycle reports");
    auto* validate = app.add_subcommand("validate", "Check a configuration without running it");
    auto* sweep = app.add_subcommand("sweep", "Independent runs over one parameter");
    sweep->add_option("--parameter", o.sweep_parameter, "section.key, e.g. baths.T_h");
    sweep->add_option("--values", o.sweep_values, "Parameter values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (scan->parsed()) return cmd_scan(o);
        if (run->parsed()) return cmd_run(o);
        if (validate->parsed()) return cmd_validate(o);
        if (sweep->parsed()) return cmd_sweep(o);
    } catch (const qfe::InvalidParameter& e) {
        std::fprintf(stderr, "configuration error:\n");
        for (const auto& v : e.violations()) std::fprintf(stderr, "  %s\n", v.c_str());
        return kExitConfig;
    } catch (const qfe::InvalidDimension& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfig;
    } catch (const qfe::NoCrossing& e) {
        std::fprintf(stderr, "no crossing: %s\n", e.what());
        return kExitNumerical;
    } catch (const qfe::Divergence& e) {
        std::fprintf(stderr, "integration diverged at t = %.6g: %s\n", e.time(), e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    }
    return 0;
}
