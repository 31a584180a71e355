// report_io.cpp — serialization of scans, cycle reports and run metadata

#include "qfe/report_io.hpp"

#include "qfe/errors.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#ifndef QFE_VERSION
#define QFE_VERSION "unknown"
#endif

namespace qfe {

using nlohmann::json;

namespace {

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    return out;
}

} // namespace

const char* code_version() noexcept { return QFE_VERSION; }

json to_json(const CrossingReport& c) {
    return {{"omega_eff", c.omega_eff},
            {"gap", c.gap},
            {"level_pair", {c.level_pair.first, c.level_pair.second}},
            {"scan_range", {c.scan_range.first, c.scan_range.second}}};
}

json to_json(const CycleReport& r) {
    json strokes = json::array();
    for (const auto& s : r.strokes) {
        strokes.push_back({{"stroke", to_string(s.stroke)},
                           {"t_begin", s.t_begin},
                           {"t_end", s.t_end},
                           {"dU", s.dU},
                           {"dQ", s.dQ},
                           {"dW", s.dW}});
    }
    return {{"index", r.index},
            {"t_begin", r.t_begin},
            {"t_end", r.t_end},
            {"eta", finite_or_null(r.eta)},
            {"eta_carnot", r.eta_carnot},
            {"W_out", r.W_out},
            {"W_net", r.W_net},
            {"Q_in", r.Q_in},
            {"Q_out", r.Q_out},
            {"engine_works", r.engine_works},
            {"W_out_nonpositive", !r.engine_works},
            {"N_c_end_hot", r.N_c_end_hot},
            {"N_c_end_cold", r.N_c_end_cold},
            {"suppression_hot", r.suppression_hot},
            {"suppression_cold", r.suppression_cold},
            {"N_c_begin_hot", r.N_c_begin_hot},
            {"N_w2_begin_hot", r.N_w2_begin_hot},
            {"N_w2_min_hot", r.N_w2_min_hot},
            {"cold_duration", r.cold_duration},
            {"cold_plateau", r.cold_plateau},
            {"heat_rate_peak_hot", r.heat_rate_peak_hot},
            {"heat_rate_peak_ramps", r.heat_rate_peak_ramps},
            {"strokes", strokes}};
}

json to_json(const RunDiagnostics& d) {
    return {{"dressed_builds", d.dressed_builds},
            {"block_mode", d.block_mode},
            {"steps", d.steps},
            {"max_trace_drift", d.max_trace_drift},
            {"trace_renormalizations", d.trace_renormalizations},
            {"max_hermiticity_residual", d.max_hermiticity_residual},
            {"positivity_violations", d.positivity_violations},
            {"min_eigenvalue", d.min_eigenvalue},
            {"max_first_law_residual", d.max_first_law_residual},
            {"transient_end", d.transient_end},
            {"transient_plateau", d.transient_plateau}};
}

json crossings_json(const Resolution& res, std::uint64_t hash) {
    json j;
    j["config_hash"] = hash_hex(hash);
    j["omega_eff_1"] = res.drive.omega_eff_1;
    j["omega_eff_2"] = res.drive.omega_eff_2;
    j["delta_omega"] = res.drive.delta_omega();
    j["bare_fallback"] = res.bare_fallback;
    if (res.resonances) {
        j["gap_1"] = res.resonances->wall1.gap;
        j["gap_2"] = res.resonances->wall2.gap;
        j["wall1"] = to_json(res.resonances->wall1);
        j["wall2"] = to_json(res.resonances->wall2);
    } else {
        j["gap_1"] = nullptr;
        j["gap_2"] = nullptr;
    }
    j["notes"] = res.notes;
    return j;
}

json cycles_json(const EngineResult& result, std::uint64_t hash) {
    json cycles = json::array();
    for (const auto& c : result.cycles) cycles.push_back(to_json(c));
    json starts = result.schedule.cycle_starts;
    return {{"config_hash", hash_hex(hash)},
            {"cycles", cycles},
            {"cycle_starts", starts},
            {"diagnostics", to_json(result.diagnostics)}};
}

json run_meta_json(const RunConfig& cfg, const Resolution& res, const EngineResult& result,
                   std::uint64_t hash) {
    json resolved = to_json(cfg);
    resolved["model"]["omega_c"] = res.model.omega_c;
    resolved["drive"]["omega_eff_1"] = res.drive.omega_eff_1;
    resolved["drive"]["omega_eff_2"] = res.drive.omega_eff_2;
    resolved["drive"]["delta_omega"] = res.drive.delta_omega();
    return {{"config_hash", hash_hex(hash)},
            {"code_version", code_version()},
            {"config", to_json(cfg)},
            {"resolved", resolved},
            {"notes", res.notes},
            {"wall_clock_seconds", result.diagnostics.wall_seconds},
            {"dimension", result.energies.size()}};
}

void write_json(const std::filesystem::path& file, const json& j) {
    auto out = open_out(file);
    out << j.dump(2) << '\n';
}

void write_scan_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const Resolution& res) {
    std::filesystem::create_directories(dir);
    const std::uint64_t hash = config_hash(cfg);
    if (cfg.outputs.wants("csv") && res.scan) {
        auto out = open_out(dir / "spectrum.csv");
        out << "# config_hash=" << hash_hex(hash) << '\n';
        write_scan_csv(out, *res.scan);
    }
    if (cfg.outputs.wants("json")) write_json(dir / "crossings.json", crossings_json(res, hash));
}

void write_run_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const Resolution& res,
                       const EngineResult& result) {
    std::filesystem::create_directories(dir);
    const std::uint64_t hash = config_hash(cfg);
    if (cfg.outputs.wants("csv")) {
        auto out = open_out(dir / "ledger.csv");
        write_ledger_csv(out, result.ledger, hash);
    }
    if (cfg.outputs.wants("json")) {
        write_json(dir / "cycles.json", cycles_json(result, hash));
        write_json(dir / "run_meta.json", run_meta_json(cfg, res, result, hash));
    }
}

} // namespace qfe
