// config.cpp — strict config parsing, canonical echo, hashing and scan-based resolution

#include "qfe/config.hpp"

#include "qfe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

namespace qfe {

using nlohmann::json;

bool OutputConfig::wants(const std::string& format) const {
    return std::find(formats.begin(), formats.end(), format) != formats.end();
}

namespace {

// Reads one section, recording type errors and unknown keys by path.
class Section {
public:
    Section(const json& root, const std::string& name, std::vector<std::string>& errors)
        : name_(name), errors_(errors) {
        if (!root.contains(name)) return;
        const json& s = root.at(name);
        if (!s.is_object()) {
            errors_.push_back(name + ": expected an object");
            return;
        }
        node_ = &s;
    }

    ~Section() = default;

    void number(const char* key, double& out) {
        if (const json* v = take(key)) {
            if (v->is_number()) out = v->get<double>();
            else errors_.push_back(path(key) + ": expected a number");
        }
    }

    void integer(const char* key, int& out) {
        if (const json* v = take(key)) {
            if (v->is_number_integer()) out = v->get<int>();
            else errors_.push_back(path(key) + ": expected an integer");
        }
    }

    void boolean(const char* key, bool& out) {
        if (const json* v = take(key)) {
            if (v->is_boolean()) out = v->get<bool>();
            else errors_.push_back(path(key) + ": expected true or false");
        }
    }

    void string(const char* key, std::string& out) {
        if (const json* v = take(key)) {
            if (v->is_string()) out = v->get<std::string>();
            else errors_.push_back(path(key) + ": expected a string");
        }
    }

    /// A number or the string "auto".
    void number_or_auto(const char* key, double& out, bool& is_auto) {
        if (const json* v = take(key)) {
            if (v->is_number()) {
                out = v->get<double>();
                is_auto = false;
            } else if (v->is_string() && v->get<std::string>() == "auto") {
                is_auto = true;
            } else {
                errors_.push_back(path(key) + ": expected a number or \"auto\"");
            }
        }
    }

    void strings(const char* key, std::vector<std::string>& out) {
        if (const json* v = take(key)) {
            if (v->is_array() && std::all_of(v->begin(), v->end(), [](const json& e) { return e.is_string(); })) {
                out = v->get<std::vector<std::string>>();
            } else {
                errors_.push_back(path(key) + ": expected an array of strings");
            }
        }
    }

    void numbers(const char* key, std::vector<double>& out) {
        if (const json* v = take(key)) {
            if (v->is_array() && std::all_of(v->begin(), v->end(), [](const json& e) { return e.is_number(); })) {
                out = v->get<std::vector<double>>();
            } else {
                errors_.push_back(path(key) + ": expected an array of numbers");
            }
        }
    }

    /// Reports keys that no reader asked for.
    void finish() {
        if (!node_) return;
        for (const auto& [key, value] : node_->items()) {
            if (!seen_.count(key)) errors_.push_back(path(key.c_str()) + ": unknown key");
        }
    }

private:
    const json* take(const char* key) {
        seen_.insert(key);
        if (!node_ || !node_->contains(key)) return nullptr;
        return &node_->at(key);
    }
    std::string path(const char* key) const { return name_ + "." + key; }

    std::string name_;
    std::vector<std::string>& errors_;
    const json* node_{nullptr};
    std::set<std::string> seen_;
};

const std::set<std::string> kFormats{"csv", "json"};

} // namespace

std::vector<std::string> RunConfig::violations() const {
    std::vector<std::string> out;
    const auto append = [&](std::vector<std::string> v) { out.insert(out.end(), v.begin(), v.end()); };

    ModelParams m = model;
    if (omega_c_auto) m.omega_c = 0.5 * model.omega_1;  // placeholder, resolved from the scan
    append(m.violations("model"));
    append(baths.violations("baths"));
    try {
        truncation.validate();
    } catch (const InvalidDimension& e) {
        out.push_back(std::string("truncation: ") + e.what());
    }
    DriveSchedule d = drive;
    if (omega_eff_1_auto) d.omega_eff_1 = 0.5 * model.omega_1;
    if (omega_eff_2_auto) d.omega_eff_2 = std::max(0.5 * model.omega_2, d.omega_eff_1 + 1.0);
    append(d.violations("drive"));
    append(engine.violations("integrator"));

    if (!(scan.omega_min > 0.0) || !(scan.omega_max > scan.omega_min)) {
        out.push_back("scan.omega_max: need 0 < omega_min < omega_max");
    }
    if (scan.points < 3) out.push_back("scan.points: must be >= 3");
    if (scan.n_levels < 2 || scan.n_levels > truncation.total()) {
        out.push_back("scan.n_levels: must lie in [2, d_c*d_1*d_2]");
    }
    if (outputs.directory.empty()) out.push_back("outputs.directory: must not be empty");
    for (const auto& f : outputs.formats) {
        if (!kFormats.count(f)) out.push_back("outputs.formats: unknown format '" + f + "' (csv, json)");
    }
    if (sweep) {
        if (sweep->values.empty()) out.push_back("sweep.values: must not be empty");
        try {
            if (!sweep->values.empty()) with_parameter(*this, sweep->parameter, sweep->values.front());
        } catch (const InvalidParameter& e) {
            out.push_back("sweep.parameter: " + std::string(e.what()));
        }
    }
    return out;
}

void RunConfig::validate() const {
    if (auto v = violations(); !v.empty()) throw InvalidParameter(std::move(v));
}

RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw InvalidParameter({"config: top level must be an object"});
    std::vector<std::string> errors;
    RunConfig cfg;
    static const std::set<std::string> sections{"model", "baths", "truncation", "drive", "integrator",
                                                "cycle", "scan", "outputs", "sweep"};
    for (const auto& [key, value] : j.items()) {
        if (!sections.count(key)) errors.push_back(key + ": unknown section");
    }

    {
        Section s(j, "model", errors);
        s.number("omega_1", cfg.model.omega_1);
        s.number("omega_2", cfg.model.omega_2);
        s.number_or_auto("omega_c", cfg.model.omega_c, cfg.omega_c_auto);
        s.number("g_1", cfg.model.g_1);
        s.number("g_2", cfg.model.g_2);
        s.finish();
    }
    {
        Section s(j, "baths", errors);
        s.number("gamma_1", cfg.baths.gamma_1);
        s.number("gamma_2", cfg.baths.gamma_2);
        s.number("kappa", cfg.baths.kappa);
        s.number("T_c", cfg.baths.T_c);
        s.number("T_h", cfg.baths.T_h);
        s.number("T_0", cfg.baths.T_0);
        s.finish();
    }
    {
        Section s(j, "truncation", errors);
        s.integer("d_c", cfg.truncation.d_c);
        s.integer("d_1", cfg.truncation.d_1);
        s.integer("d_2", cfg.truncation.d_2);
        s.finish();
    }
    {
        Section s(j, "drive", errors);
        s.number_or_auto("omega_eff_1", cfg.drive.omega_eff_1, cfg.omega_eff_1_auto);
        s.number_or_auto("omega_eff_2", cfg.drive.omega_eff_2, cfg.omega_eff_2_auto);
        s.number("tau", cfg.drive.tau);
        s.number("dt_hot", cfg.drive.dt_hot);
        s.number("dt_cold", cfg.drive.dt_cold);
        s.integer("n_cycles", cfg.drive.n_cycles);
        s.finish();
    }
    {
        Section s(j, "integrator", errors);
        s.number("step", cfg.engine.step);
        s.integer("sample_stride", cfg.engine.sample_stride);
        s.finish();
    }
    {
        Section s(j, "cycle", errors);
        s.number("plateau_window", cfg.engine.plateau_window);
        s.number("plateau_tol_rel", cfg.engine.plateau_tol_rel);
        s.number("plateau_tol_abs", cfg.engine.plateau_tol_abs);
        s.number("transient_max", cfg.engine.transient_max);
        s.number("cold_max", cfg.engine.cold_max);
        s.boolean("extend_cold", cfg.engine.extend_cold);
        s.boolean("check_positivity", cfg.engine.check_positivity);
        s.finish();
    }
    {
        Section s(j, "scan", errors);
        s.number("omega_min", cfg.scan.omega_min);
        s.number("omega_max", cfg.scan.omega_max);
        s.integer("points", cfg.scan.points);
        s.integer("n_levels", cfg.scan.n_levels);
        s.finish();
    }
    {
        Section s(j, "outputs", errors);
        s.string("directory", cfg.outputs.directory);
        s.strings("formats", cfg.outputs.formats);
        s.finish();
    }
    if (j.contains("sweep")) {
        SweepConfig sw;
        Section s(j, "sweep", errors);
        s.string("parameter", sw.parameter);
        s.numbers("values", sw.values);
        s.finish();
        cfg.sweep = std::move(sw);
    }

    if (errors.empty()) errors = cfg.violations();
    if (!errors.empty()) throw InvalidParameter(std::move(errors));
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter({"config: cannot open '" + path + "'"});
    json j;
    try {
        j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw InvalidParameter({"config: " + std::string(e.what())});
    }
    return parse_config(j);
}

json to_json(const RunConfig& cfg) {
    const auto num_or_auto = [](double v, bool is_auto) { return is_auto ? json("auto") : json(v); };
    json j;
    j["model"] = {{"omega_1", cfg.model.omega_1},
                  {"omega_2", cfg.model.omega_2},
                  {"omega_c", num_or_auto(cfg.model.omega_c, cfg.omega_c_auto)},
                  {"g_1", cfg.model.g_1},
                  {"g_2", cfg.model.g_2}};
    j["baths"] = {{"gamma_1", cfg.baths.gamma_1}, {"gamma_2", cfg.baths.gamma_2}, {"kappa", cfg.baths.kappa},
                  {"T_c", cfg.baths.T_c},         {"T_h", cfg.baths.T_h},         {"T_0", cfg.baths.T_0}};
    j["truncation"] = {{"d_c", cfg.truncation.d_c}, {"d_1", cfg.truncation.d_1}, {"d_2", cfg.truncation.d_2}};
    j["drive"] = {{"omega_eff_1", num_or_auto(cfg.drive.omega_eff_1, cfg.omega_eff_1_auto)},
                  {"omega_eff_2", num_or_auto(cfg.drive.omega_eff_2, cfg.omega_eff_2_auto)},
                  {"tau", cfg.drive.tau},
                  {"dt_hot", cfg.drive.dt_hot},
                  {"dt_cold", cfg.drive.dt_cold},
                  {"n_cycles", cfg.drive.n_cycles}};
    j["integrator"] = {{"step", cfg.engine.step}, {"sample_stride", cfg.engine.sample_stride}};
    j["cycle"] = {{"plateau_window", cfg.engine.plateau_window},
                  {"plateau_tol_rel", cfg.engine.plateau_tol_rel},
                  {"plateau_tol_abs", cfg.engine.plateau_tol_abs},
                  {"transient_max", cfg.engine.transient_max},
                  {"cold_max", cfg.engine.cold_max},
                  {"extend_cold", cfg.engine.extend_cold},
                  {"check_positivity", cfg.engine.check_positivity}};
    j["scan"] = {{"omega_min", cfg.scan.omega_min},
                 {"omega_max", cfg.scan.omega_max},
                 {"points", cfg.scan.points},
                 {"n_levels", cfg.scan.n_levels}};
    j["outputs"] = {{"directory", cfg.outputs.directory}, {"formats", cfg.outputs.formats}};
    if (cfg.sweep) j["sweep"] = {{"parameter", cfg.sweep->parameter}, {"values", cfg.sweep->values}};
    return j;
}

std::uint64_t config_hash(const RunConfig& cfg) {
    // The output directory does not change results, so it is left out.
    json j = to_json(cfg);
    j.erase("outputs");
    const std::string text = j.dump();
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunConfig with_parameter(const RunConfig& cfg, const std::string& path, double value) {
    const auto dot = path.find('.');
    if (dot == std::string::npos) throw InvalidParameter({"'" + path + "' is not of the form section.key"});
    const std::string section = path.substr(0, dot), key = path.substr(dot + 1);
    static const std::set<std::string> sweepable{"model", "baths", "truncation", "drive", "integrator", "cycle"};
    json j = to_json(cfg);
    j.erase("sweep");
    if (!sweepable.count(section) || !j[section].contains(key)) {
        throw InvalidParameter({"'" + path + "' is not a sweepable numeric parameter"});
    }
    json& slot = j[section][key];
    if (slot.is_boolean()) throw InvalidParameter({"'" + path + "' is not numeric"});
    if (slot.is_number_integer() || section == "truncation" || key == "n_cycles" || key == "sample_stride") {
        if (value != std::floor(value)) throw InvalidParameter({"'" + path + "' takes integer values"});
        slot = static_cast<int>(value);
    } else {
        slot = value;
    }
    RunConfig out = parse_config(j);
    out.sweep = cfg.sweep;
    return out;
}

Resolution resolve(const RunConfig& cfg, int threads) {
    cfg.validate();
    Resolution r;
    r.model = cfg.model;
    r.drive = cfg.drive;
    const bool need_scan = cfg.omega_c_auto || cfg.omega_eff_1_auto || cfg.omega_eff_2_auto;
    if (need_scan) {
        const auto grid = linspace(cfg.scan.omega_min, cfg.scan.omega_max, cfg.scan.points);
        ModelParams base = cfg.model;
        base.omega_c = grid.front();
        r.scan = scan_spectrum(base, grid, cfg.truncation, cfg.scan.n_levels, threads);
        double w1 = 0.5 * cfg.model.omega_1, w2 = 0.5 * cfg.model.omega_2;
        try {
            r.resonances = locate_resonances(*r.scan, cfg.model);
            w1 = r.resonances->wall1.omega_eff;
            w2 = r.resonances->wall2.omega_eff;
        } catch (const NoCrossing& e) {
            if (!e.degenerate()) throw;
            r.bare_fallback = true;
            r.notes.push_back(std::string("degenerate crossing (") + e.what() +
                              "); using the bare resonances omega_j / 2");
        }
        if (cfg.omega_eff_1_auto) r.drive.omega_eff_1 = w1;
        if (cfg.omega_eff_2_auto) r.drive.omega_eff_2 = w2;
    }
    if (cfg.omega_c_auto) r.model.omega_c = r.drive.omega_eff_1;
    r.model.validate();
    r.drive.validate();
    return r;
}

} // namespace qfe
