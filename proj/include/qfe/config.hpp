// config.hpp — strict JSON run configuration and parameter resolution

#pragma once

#include "qfe/cycle.hpp"
#include "qfe/drive.hpp"
#include "qfe/model.hpp"
#include "qfe/operator_algebra.hpp"
#include "qfe/spectral.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qfe {

struct ScanConfig {
    double omega_min{0.9};
    double omega_max{1.4};
    int points{201};
    int n_levels{10};
};

struct OutputConfig {
    std::string directory{"out"};
    std::vector<std::string> formats{"csv", "json"};

    bool wants(const std::string& format) const;
};

struct SweepConfig {
    std::string parameter;  // "section.key", e.g. "baths.T_h"
    std::vector<double> values;
};

/// Everything a command needs. `omega_c_auto` and the `omega_eff_*_auto`
/// flags mark values that are taken from the spectrum scan at run time.
struct RunConfig {
    ModelParams model;
    bool omega_c_auto{true};
    BathParams baths;
    TruncationSpec truncation;
    DriveSchedule drive{1.01, 1.31, 20.0, 1500.0, 1500.0, {}, 2};
    bool omega_eff_1_auto{true};
    bool omega_eff_2_auto{true};
    EngineOptions engine;
    ScanConfig scan;
    OutputConfig outputs;
    std::optional<SweepConfig> sweep;

    /// Every violated invariant, prefixed with its field path.
    std::vector<std::string> violations() const;
    /// Throws InvalidParameter listing all violations.
    void validate() const;
};

/// Strict parse: unknown keys and wrong types are violations. Missing keys
/// take the documented defaults. Throws InvalidParameter.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Canonical form with every field spelled out ("auto" where unresolved).
nlohmann::json to_json(const RunConfig& cfg);

/// FNV-1a over the canonical JSON dump.
std::uint64_t config_hash(const RunConfig& cfg);
std::string hash_hex(std::uint64_t h);

/// Returns a copy of `cfg` with the numeric field at `path` ("section.key")
/// replaced by `value`.
RunConfig with_parameter(const RunConfig& cfg, const std::string& path, double value);

/// Scan-derived quantities with the provenance of each value.
struct Resolution {
    ModelParams model;     // omega_c resolved
    DriveSchedule drive;   // omega_eff_1/2 resolved
    std::optional<SpectrumScan> scan;
    std::optional<Resonances> resonances;
    bool bare_fallback{false};  // g = 0: closed gaps, bare resonances used
    std::vector<std::string> notes;
};

/// Runs the spectrum scan when any frequency is "auto". Throws NoCrossing
/// when the scan finds no usable avoided crossing (except for the closed
/// gaps of an uncoupled model, which fall back to omega_j / 2).
Resolution resolve(const RunConfig& cfg, int threads = 1);

} // namespace qfe
