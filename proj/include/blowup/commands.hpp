#pragma once

// Experiment configuration and the four command bodies behind the CLI:
// thresholds, criterion, simulate, sweep.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "blowup/criteria.hpp"
#include "blowup/error.hpp"
#include "blowup/io.hpp"
#include "blowup/model.hpp"
#include "blowup/solver.hpp"

namespace blowup::cli {

using json = nlohmann::json;

/// p from a JSON number or a string "a/b" / "a"; strings give an exact ratio.
struct ExponentSpec {
    double value = 0.0;
    std::optional<Ratio> ratio;
};

inline ExponentSpec parse_exponent(const std::string& s) {
    ExponentSpec e;
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            std::size_t used = 0;
            const long long n = std::stoll(s, &used);
            if (used == s.size()) {
                e.ratio = Ratio{n, 1};
                e.value = static_cast<double>(n);
                return e;
            }
            e.value = io::parse_double(s);
            return e;
        }
        std::size_t used_num = 0;
        std::size_t used_den = 0;
        const std::string num = s.substr(0, slash);
        const std::string den = s.substr(slash + 1);
        const long long a = std::stoll(num, &used_num);
        const long long b = std::stoll(den, &used_den);
        if (used_num != num.size() || used_den != den.size()) throw DomainError("");
        e.ratio = Ratio{a, b};
        e.value = e.ratio->value();
        return e;
    } catch (const std::logic_error&) {
        throw DomainError("cannot parse exponent p = '" + s + "'");
    }
}

inline ExponentSpec parse_exponent(const json& j) {
    if (j.is_string()) return parse_exponent(j.get<std::string>());
    return {io::to_double(j), std::nullopt};
}

struct SweepSpec {
    std::string parameter;  ///< "d" or a numeric profile field such as "scale" or "cap"
    std::vector<double> values;
};

struct ExperimentConfig {
    int d = 0;
    std::optional<ExponentSpec> p;
    std::optional<double> beta;
    double weighted_T = 1.0;
    json profile;
    GridConfig grid;
    double t_max = 1.0;
    SimOptions sim;
    bool refine = false;
    std::optional<SweepSpec> sweep;
    std::filesystem::path outputs;
    std::filesystem::path base_dir;

    ModelParams params() const {
        if (d == 0) throw DomainError("dimension d is required (--d or \"d\")");
        if (!p) throw DomainError("exponent p is required (--p or \"p\")");
        return p->ratio ? ModelParams::make(d, *p->ratio) : ModelParams::make(d, p->value);
    }

    RadialProfile make_profile(const ModelParams& m) const {
        if (profile.is_null()) throw DomainError("a \"profile\" record is required");
        return io::profile_from_json(profile, m, base_dir);
    }
};

/// Reads a config document; unknown keys are rejected so typos surface.
inline ExperimentConfig config_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
    static const char* const known[] = {"d",       "p",          "beta",           "T",     "profile",
                                        "grid",    "t_max",      "record_interval", "T_ref", "snapshot_times",
                                        "refine",  "sweep",      "outputs",        "blowup_sup_threshold",
                                        "cfl_coeff", "safety",    "positivity_fraction"};
    if (!j.is_object()) throw DomainError("config must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(std::begin(known), std::end(known), key) == std::end(known))
            throw DomainError("unknown config key '" + key + "'");
    }
    ExperimentConfig c;
    c.base_dir = base_dir;
    if (j.contains("d")) c.d = j.at("d").get<int>();
    if (j.contains("p")) c.p = parse_exponent(j.at("p"));
    if (j.contains("beta")) c.beta = io::to_double(j.at("beta"));
    if (j.contains("T")) c.weighted_T = io::to_double(j.at("T"));
    if (j.contains("profile")) c.profile = j.at("profile");
    if (j.contains("grid")) c.grid = io::grid_from_json(j.at("grid"));
    if (j.contains("t_max")) c.t_max = io::to_double(j.at("t_max"));
    if (j.contains("record_interval")) c.sim.record_interval = io::to_double(j.at("record_interval"));
    if (j.contains("T_ref")) c.sim.T_ref = io::to_double(j.at("T_ref"));
    if (j.contains("snapshot_times")) c.sim.snapshot_times = j.at("snapshot_times").get<std::vector<double>>();
    if (j.contains("blowup_sup_threshold")) c.sim.blowup_sup_threshold = io::to_double(j.at("blowup_sup_threshold"));
    if (j.contains("cfl_coeff")) c.sim.step.cfl_coeff = io::to_double(j.at("cfl_coeff"));
    if (j.contains("safety")) c.sim.step.safety = io::to_double(j.at("safety"));
    if (j.contains("positivity_fraction"))
        c.sim.step.positivity_fraction = io::to_double(j.at("positivity_fraction"));
    if (j.contains("refine")) c.refine = j.at("refine").get<bool>();
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        SweepSpec spec;
        spec.parameter = s.at("parameter").get<std::string>();
        spec.values = s.at("values").get<std::vector<double>>();
        c.sweep = std::move(spec);
    }
    if (j.contains("outputs")) c.outputs = j.at("outputs").get<std::string>();
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DomainError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

// ---- commands --------------------------------------------------------------

inline ThresholdReport cmd_thresholds(const ExperimentConfig& c) {
    const auto m = c.params();
    m.require_c();
    return threshold_report(m.d, m.p);
}

/// Criterion report; when β is set, the weighted-extension bound at horizon T
/// is appended under "weighted".
inline json cmd_criterion(const ExperimentConfig& c) {
    const auto m = c.params();
    const auto report = check_blowup_criterion(c.make_profile(m), m, c.sim.quadrature);
    json out = io::to_json(report);
    if (c.beta) {
        out["weighted"] = {{"beta", *c.beta},
                           {"T", c.weighted_T},
                           {"bound", io::number(weighted_criterion_bound(m.d, m.p, *c.beta, c.weighted_T))}};
    }
    return out;
}

struct SimulateOutput {
    SimResult result;
    io::SimSummary summary;
    std::vector<std::filesystem::path> written;
};

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot write '" + path.string() + "'");
    return f;
}

/// Runs the configured simulation; with an output directory, writes
/// summary.json, series.csv, barrier.csv and one snapshot_<k>.csv per
/// requested time.
inline SimulateOutput cmd_simulate(const ExperimentConfig& c) {
    const auto m = c.params();
    const auto u0 = c.make_profile(m);
    SimulateOutput out;
    out.result = c.refine ? simulate_refined(u0, m, c.grid, c.t_max, c.sim).finest
                          : simulate(u0, m, c.grid, c.t_max, c.sim);
    out.summary = io::summarize(out.result, m.p);
    if (c.outputs.empty()) return out;

    std::filesystem::create_directories(c.outputs);
    auto emit = [&](const std::string& name, auto&& writer) {
        const auto path = c.outputs / name;
        auto f = open_output(path);
        writer(f);
        out.written.push_back(path);
    };
    emit("summary.json", [&](std::ostream& f) { f << io::to_json(out.summary).dump(2) << '\n'; });
    emit("series.csv", [&](std::ostream& f) { io::write_series_csv(f, out.result.series); });
    if (out.result.barrier_series)
        emit("barrier.csv", [&](std::ostream& f) { io::write_barrier_csv(f, *out.result.barrier_series); });
    for (std::size_t k = 0; k < out.result.snapshots.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%03zu.csv", k);
        emit(name, [&](std::ostream& f) { io::write_snapshot_csv(f, out.result.snapshots[k]); });
    }
    return out;
}

struct SweepRow {
    std::string parameter;
    double value = 0.0;
    std::string verdict;
    std::string outcome;
    double t = 0.0;  ///< t_blow or survival horizon
    double margin = 0.0;
};

inline SweepRow sweep_cell(const ExperimentConfig& base, const std::string& parameter, double value) {
    ExperimentConfig c = base;
    if (parameter == "d") {
        if (value != std::floor(value)) throw DomainError("sweep over d needs integer values");
        c.d = static_cast<int>(value);
    } else {
        if (!c.profile.is_object()) throw DomainError("a \"profile\" record is required");
        c.profile[parameter] = value;
    }
    const auto m = c.params();
    const auto u0 = c.make_profile(m);
    const auto report = check_blowup_criterion(u0, m, c.sim.quadrature);
    const auto res = simulate(u0, m, c.grid, c.t_max, c.sim);
    const auto summary = io::summarize(res, m.p);
    return {parameter, value, std::string(io::verdict_name(report.verdict)), summary.status, summary.t,
            report.margin};
}

/// One row per value, in the order given; cells run concurrently.
inline std::vector<SweepRow> cmd_sweep(const ExperimentConfig& c) {
    if (!c.sweep) throw DomainError("sweep needs a \"sweep\": {\"parameter\", \"values\"} record");
    const auto& spec = *c.sweep;
    std::vector<std::future<SweepRow>> cells;
    cells.reserve(spec.values.size());
    for (double v : spec.values)
        cells.push_back(std::async(std::launch::async, [&c, &spec, v] { return sweep_cell(c, spec.parameter, v); }));
    std::vector<SweepRow> rows;
    rows.reserve(cells.size());
    for (auto& f : cells) rows.push_back(f.get());
    return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    io::csv_row(out, "parameter", "value", "verdict", "outcome", "t", "margin");
    for (const auto& r : rows) io::csv_row(out, r.parameter, r.value, r.verdict, r.outcome, r.t, r.margin);
}

inline json to_json(const SweepRow& r) {
    return {{"parameter", r.parameter}, {"value", io::number(r.value)}, {"verdict", r.verdict},
            {"outcome", r.outcome},     {"t", io::number(r.t)},         {"margin", io::number(r.margin)}};
}

}  // namespace blowup::cli
