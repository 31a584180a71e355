// report_io.hpp — JSON/CSV artifacts written by the command-line tool

#pragma once

#include "qfe/config.hpp"
#include "qfe/cycle.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace qfe {

nlohmann::json to_json(const CrossingReport& c);
nlohmann::json to_json(const CycleReport& r);
nlohmann::json to_json(const RunDiagnostics& d);

/// crossings.json body: resolved frequencies, gaps and how they were found.
nlohmann::json crossings_json(const Resolution& res, std::uint64_t hash);

/// cycles.json body: per-cycle efficiency and energy breakdown.
nlohmann::json cycles_json(const EngineResult& result, std::uint64_t hash);

/// run_meta.json body: resolved parameters, code version and timing.
nlohmann::json run_meta_json(const RunConfig& cfg, const Resolution& res, const EngineResult& result,
                             std::uint64_t hash);

/// Writes spectrum.csv / crossings.json into `dir` (created if needed).
void write_scan_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const Resolution& res);

/// Writes ledger.csv, cycles.json and run_meta.json into `dir`.
void write_run_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const Resolution& res,
                       const EngineResult& result);

void write_json(const std::filesystem::path& file, const nlohmann::json& j);

const char* code_version() noexcept;

} // namespace qfe
