#pragma once

// JSON and CSV surfaces: report serialization, the profile grammar used by
// configuration files, and plot-ready CSV tables.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "blowup/criteria.hpp"
#include "blowup/diagnostics.hpp"
#include "blowup/error.hpp"
#include "blowup/model.hpp"
#include "blowup/solver.hpp"

namespace blowup::io {

using json = nlohmann::json;

// ---- numbers ---------------------------------------------------------------

/// Finite values as numbers; NaN as "nan", ±∞ as "infinite"/"-infinite".
inline json number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "infinite" : "-infinite";
    return x;
}

inline double to_double(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "infinite") return std::numeric_limits<double>::infinity();
        if (s == "-infinite") return -std::numeric_limits<double>::infinity();
    }
    throw DomainError("expected a number, \"nan\" or \"infinite\", got " + j.dump());
}

/// Shortest round-trip decimal form, '.' separator regardless of locale.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "infinite" : "-infinite";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

/// Inverse of format_double.
inline double parse_double(std::string_view s) {
    if (s == "nan" || s == "infinite" || s == "-infinite") return to_double(json(std::string(s)));
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw DomainError("not a number: '" + std::string(s) + "'");
    return x;
}

// ---- reports ---------------------------------------------------------------

inline std::string_view verdict_name(Verdict v) {
    return v == Verdict::blowup_predicted ? "blowup_predicted" : "inconclusive";
}

inline Verdict parse_verdict(const std::string& s) {
    if (s == "blowup_predicted") return Verdict::blowup_predicted;
    if (s == "inconclusive") return Verdict::inconclusive;
    throw DomainError("unknown verdict '" + s + "'");
}

inline json to_json(const CriterionReport& r) {
    return {{"quantity", number(r.quantity)},
            {"argmax_T", r.argmax_T ? number(*r.argmax_T) : json("divergent")},
            {"threshold", number(r.threshold)},
            {"verdict", verdict_name(r.verdict)},
            {"margin", number(r.margin)},
            {"blowup_time_bound", r.blowup_time_bound ? number(*r.blowup_time_bound) : json("none")}};
}

inline CriterionReport criterion_report_from_json(const json& j) {
    CriterionReport r;
    r.quantity = to_double(j.at("quantity"));
    if (const auto& a = j.at("argmax_T"); !(a.is_string() && a.get<std::string>() == "divergent"))
        r.argmax_T = to_double(a);
    r.threshold = to_double(j.at("threshold"));
    r.verdict = parse_verdict(j.at("verdict").get<std::string>());
    r.margin = to_double(j.at("margin"));
    if (const auto& b = j.at("blowup_time_bound"); !(b.is_string() && b.get<std::string>() == "none"))
        r.blowup_time_bound = to_double(b);
    return r;
}

inline json to_json(const ThresholdReport& r) {
    return {{"N_exact", number(r.N_exact)},
            {"N_asymptotic", number(r.N_asymptotic)},
            {"M_bound", number(r.M_bound)},
            {"M_asymptotic", number(r.M_asymptotic)},
            {"morrey_norm_uC", number(r.morrey_norm_uC)}};
}

inline ThresholdReport threshold_report_from_json(const json& j) {
    ThresholdReport r;
    r.N_exact = to_double(j.at("N_exact"));
    r.N_asymptotic = to_double(j.at("N_asymptotic"));
    r.M_bound = to_double(j.at("M_bound"));
    r.M_asymptotic = to_double(j.at("M_asymptotic"));
    r.morrey_norm_uC = to_double(j.at("morrey_norm_uC"));
    return r;
}

inline json to_json(const RegimeFlags& f) {
    return {{"fujita_subcritical", f.fujita_subcritical},
            {"fujita_critical", f.fujita_critical},
            {"singular_solution_exists", f.singular_solution_exists}};
}

/// Flat view of a SimResult for the summary JSON.
struct SimSummary {
    std::string status;  ///< blew_up | survived | step_failure
    double t = 0.0;      ///< t_blow, survival horizon, or failure time
    double sup = std::numeric_limits<double>::quiet_NaN();
    std::string reason;
    long long steps = 0;
    double T_ref = 0.0;
    std::size_t series_entries = 0;
    double barrier_max = std::numeric_limits<double>::quiet_NaN();
    std::size_t moment_violations = 0;
    double lower_bound_deficit = std::numeric_limits<double>::quiet_NaN();
};

inline SimSummary summarize(const SimResult& res, double p) {
    SimSummary s;
    std::visit(
        [&](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, BlewUp>) {
                s.status = "blew_up";
                s.t = o.t_blow;
                s.sup = o.sup_at_detection;
            } else if constexpr (std::is_same_v<T, Survived>) {
                s.status = "survived";
                s.t = o.horizon;
                s.sup = o.final_sup;
            } else {
                s.status = "step_failure";
                s.t = o.t;
                s.reason = o.reason;
            }
        },
        res.outcome);
    s.steps = res.steps;
    s.T_ref = res.series.T_ref;
    s.series_entries = res.series.entries.size();
    if (res.barrier_series && !res.barrier_series->empty()) {
        s.barrier_max = 0.0;
        for (const auto& b : *res.barrier_series) s.barrier_max = std::max(s.barrier_max, b.z_max);
    }
    s.moment_violations = check_moment_ode(res.series, p).size();
    if (!res.series.entries.empty() && res.series.entries.front().W > 0.0)
        s.lower_bound_deficit = check_lower_bound(res.series, p);
    return s;
}

inline json to_json(const SimSummary& s) {
    json j = {{"status", s.status},
              {"t", number(s.t)},
              {"sup", number(s.sup)},
              {"steps", s.steps},
              {"T_ref", number(s.T_ref)},
              {"series_entries", s.series_entries},
              {"barrier_max", number(s.barrier_max)},
              {"moment_violations", s.moment_violations},
              {"lower_bound_deficit", number(s.lower_bound_deficit)}};
    if (!s.reason.empty()) j["reason"] = s.reason;
    return j;
}

inline SimSummary sim_summary_from_json(const json& j) {
    SimSummary s;
    s.status = j.at("status").get<std::string>();
    s.t = to_double(j.at("t"));
    s.sup = to_double(j.at("sup"));
    s.reason = j.value("reason", std::string{});
    s.steps = j.at("steps").get<long long>();
    s.T_ref = to_double(j.at("T_ref"));
    s.series_entries = j.at("series_entries").get<std::size_t>();
    s.barrier_max = to_double(j.at("barrier_max"));
    s.moment_violations = j.at("moment_violations").get<std::size_t>();
    s.lower_bound_deficit = to_double(j.at("lower_bound_deficit"));
    return s;
}

// ---- profiles --------------------------------------------------------------

/// (r, u) pairs from a two-column CSV; a non-numeric first line is a header.
inline std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(std::istream& in) {
    std::vector<double> r;
    std::vector<double> u;
    std::string line;
    std::size_t lineno = 0;
    auto parse = [](std::string_view s, double& out) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
        const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
        return res.ec == std::errc{} && res.ptr == s.data() + s.size();
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r" || line.front() == '#') continue;
        const auto comma = line.find(',');
        double a = 0.0;
        double b = 0.0;
        const bool ok = comma != std::string::npos && parse(std::string_view(line).substr(0, comma), a) &&
                        parse(std::string_view(line).substr(comma + 1), b);
        if (!ok) {
            if (r.empty() && lineno == 1) continue;
            throw DomainError("malformed CSV row " + std::to_string(lineno) + ": '" + line + "'");
        }
        r.push_back(a);
        u.push_back(b);
    }
    return {std::move(r), std::move(u)};
}

inline std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open profile CSV '" + path.string() + "'");
    return read_two_column_csv(in);
}

/// Builds a profile from its config record, e.g.
/// {"kind": "truncated_singular", "scale": 2.0, "cap": 10.0}.
/// Relative "csv" paths of sampled profiles resolve against base_dir.
inline RadialProfile profile_from_json(const json& j, const ModelParams& m,
                                       const std::filesystem::path& base_dir = {}) {
    if (!j.is_object() || !j.contains("kind")) throw DomainError("profile must be an object with a \"kind\"");
    const auto kind = j.at("kind").get<std::string>();
    auto num = [&](const char* key, std::optional<double> fallback = std::nullopt) {
        if (j.contains(key)) return to_double(j.at(key));
        if (fallback) return *fallback;
        throw DomainError("profile '" + kind + "' needs field \"" + key + "\"");
    };
    if (kind == "singular") return RadialProfile::singular(m, num("scale", 1.0));
    if (kind == "truncated_singular") return RadialProfile::truncated_singular(m, num("scale", 1.0), num("cap"));
    if (kind == "gaussian") return RadialProfile::gaussian(num("amplitude", 1.0), num("width", 1.0));
    if (kind == "indicator") return RadialProfile::indicator(num("amplitude", 1.0), num("radius", 1.0));
    if (kind == "constant") return RadialProfile::constant(num("level"));
    if (kind == "power_tail") return RadialProfile::power_tail(num("amplitude", 1.0), num("exponent"));
    if (kind == "sampled") {
        const double tail = num("tail_exponent", 0.0);
        if (j.contains("csv")) {
            std::filesystem::path path = j.at("csv").get<std::string>();
            if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
            auto [r, u] = read_two_column_csv(path);
            return RadialProfile::sampled(std::move(r), std::move(u), tail);
        }
        return RadialProfile::sampled(j.at("r").get<std::vector<double>>(), j.at("u").get<std::vector<double>>(),
                                      tail);
    }
    throw DomainError("unknown profile kind '" + kind + "'");
}

inline json to_json(const RadialProfile& u0) {
    return std::visit(
        [](const auto& k) -> json {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, profile::Singular>) {
                return {{"kind", "singular"}, {"scale", k.scale}};
            } else if constexpr (std::is_same_v<T, profile::TruncatedSingular>) {
                return {{"kind", "truncated_singular"}, {"scale", k.scale}, {"cap", k.cap}};
            } else if constexpr (std::is_same_v<T, profile::Gaussian>) {
                return {{"kind", "gaussian"}, {"amplitude", k.amplitude}, {"width", k.width}};
            } else if constexpr (std::is_same_v<T, profile::Indicator>) {
                return {{"kind", "indicator"}, {"amplitude", k.amplitude}, {"radius", k.radius}};
            } else if constexpr (std::is_same_v<T, profile::Constant>) {
                return {{"kind", "constant"}, {"level", k.level}};
            } else if constexpr (std::is_same_v<T, profile::PowerTail>) {
                return {{"kind", "power_tail"}, {"amplitude", k.amplitude}, {"exponent", number(k.exponent)}};
            } else {
                return {{"kind", "sampled"}, {"r", k.r}, {"u", k.u}, {"tail_exponent", number(k.tail_exponent)}};
            }
        },
        u0.kind());
}

// ---- grids -----------------------------------------------------------------

inline GridConfig grid_from_json(const json& j, GridConfig g = {}) {
    if (j.contains("r_min")) g.r_min = to_double(j.at("r_min"));
    if (j.contains("r_max")) g.r_max = to_double(j.at("r_max"));
    if (j.contains("n_cells")) g.n_cells = j.at("n_cells").get<int>();
    if (j.contains("spacing")) {
        const auto s = j.at("spacing").get<std::string>();
        if (s == "uniform")
            g.spacing = Spacing::uniform;
        else if (s == "log")
            g.spacing = Spacing::log;
        else
            throw DomainError("grid spacing must be \"uniform\" or \"log\"");
    }
    if (j.contains("origin_node")) g.origin_node = j.at("origin_node").get<bool>();
    if (j.contains("outer_neumann")) g.outer_neumann = j.at("outer_neumann").get<bool>();
    if (j.contains("inner_dirichlet")) g.inner_dirichlet = j.at("inner_dirichlet").get<bool>();
    g.validate();
    return g;
}

inline json to_json(const GridConfig& g) {
    return {{"r_min", g.r_min},
            {"r_max", g.r_max},
            {"n_cells", g.n_cells},
            {"spacing", g.spacing == Spacing::uniform ? "uniform" : "log"},
            {"origin_node", g.origin_node},
            {"outer_neumann", g.outer_neumann},
            {"inner_dirichlet", g.inner_dirichlet}};
}

// ---- CSV -------------------------------------------------------------------

/// Writes one CSV row; LF line ending.
template <class... Cells>
void csv_row(std::ostream& out, const Cells&... cells) {
    bool first = true;
    auto cell = [&](const auto& c) {
        if (!first) out << ',';
        first = false;
        if constexpr (std::is_floating_point_v<std::decay_t<decltype(c)>>)
            out << format_double(c);
        else
            out << c;
    };
    (cell(cells), ...);
    out << '\n';
}

inline void write_series_csv(std::ostream& out, const MomentSeries& s) {
    csv_row(out, "t", "W", "mass_L1", "sup_norm");
    for (const auto& e : s.entries) csv_row(out, e.t, e.W, e.mass_L1, e.sup_norm);
}

inline MomentSeries read_series_csv(std::istream& in, double T_ref) {
    MomentSeries s;
    s.T_ref = T_ref;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        double v[4];
        for (double& x : v) {
            if (!std::getline(row, cell, ',')) throw DomainError("malformed series row '" + line + "'");
            x = parse_double(cell);
        }
        s.entries.push_back({v[0], v[1], v[2], v[3]});
    }
    return s;
}

inline void write_snapshot_csv(std::ostream& out, const SimState& s, bool header = true) {
    if (header) csv_row(out, "t", "r", "u");
    const auto& r = s.radii();
    for (std::size_t i = 0; i < r.size(); ++i) csv_row(out, s.t, r[i], s.values[i]);
}

inline void write_barrier_csv(std::ostream& out, const std::vector<BarrierPoint>& pts) {
    csv_row(out, "t", "z_max");
    for (const auto& b : pts) csv_row(out, b.t, b.z_max);
}

inline void write_criterion_csv(std::ostream& out, const CriterionReport& r) {
    csv_row(out, "quantity", "argmax_T", "threshold", "verdict", "margin", "blowup_time_bound");
    csv_row(out, r.quantity, r.argmax_T ? format_double(*r.argmax_T) : std::string("divergent"), r.threshold,
            verdict_name(r.verdict), r.margin,
            r.blowup_time_bound ? format_double(*r.blowup_time_bound) : std::string("none"));
}

inline void write_thresholds_csv(std::ostream& out, const ThresholdReport& r) {
    csv_row(out, "N_exact", "N_asymptotic", "M_bound", "M_asymptotic", "morrey_norm_uC");
    csv_row(out, r.N_exact, r.N_asymptotic, r.M_bound, r.M_asymptotic, r.morrey_norm_uC);
}

}  // namespace blowup::io
