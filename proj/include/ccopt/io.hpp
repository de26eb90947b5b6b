#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ccopt/baseline.hpp"
#include "ccopt/channel.hpp"
#include "ccopt/delivery.hpp"
#include "ccopt/errors.hpp"
#include "ccopt/experiments.hpp"
#include "ccopt/plot.hpp"
#include "ccopt/power.hpp"
#include "ccopt/strfmt.hpp"

namespace ccopt {

using nlohmann::json;

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << content;
    if (!out) throw ConfigError("write failed: " + path);
}

inline json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

namespace detail {

inline const json& require_field(const json& j, const char* key, const std::string& what) {
    const auto it = j.find(key);
    if (it == j.end()) throw ConfigError(what + ": missing field '" + key + "'");
    return *it;
}

template <typename T>
T field_as(const json& j, const char* key, const std::string& what) {
    try {
        return require_field(j, key, what).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(what + ": field '" + key + "': " + e.what());
    }
}

template <typename T>
T field_or(const json& j, const char* key, T def, const std::string& what) {
    const auto it = j.find(key);
    if (it == j.end()) return def;
    try {
        return it->get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(what + ": field '" + key + "': " + e.what());
    }
}

} // namespace detail

// ---- problem instances ----

inline ProblemInstance instance_from_json(const json& j) {
    const std::string what = "instance";
    ProblemInstance inst;
    inst.users = detail::field_as<int>(j, "users", what);
    inst.dim = detail::field_as<int>(j, "antennas_dim", what);
    inst.copies = detail::field_as<int>(j, "cache_copies", what);
    inst.files = detail::field_or<long>(j, "files", -1, what);
    inst.rates = detail::field_as<std::vector<double>>(j, "rates", what);
    inst.validate();
    return inst;
}

inline json instance_to_json(const ProblemInstance& inst) {
    json j;
    j["users"] = inst.users;
    j["antennas_dim"] = inst.dim;
    j["cache_copies"] = inst.copies;
    if (inst.files >= 0) j["files"] = inst.files;
    j["rates"] = inst.rates;
    return j;
}

// ---- network scenarios ----

inline NetworkScenario scenario_from_json(const json& j) {
    const std::string what = "scenario";
    NetworkScenario sc;
    sc.users = detail::field_as<int>(j, "users", what);
    sc.bs_antennas = detail::field_as<int>(j, "bs_antennas", what);
    sc.user_antennas = detail::field_or<int>(j, "user_antennas", 1, what);
    sc.bins = detail::field_as<int>(j, "bins", what);
    sc.symbol_rate = detail::field_or<double>(j, "symbol_rate", 1.0, what);
    sc.noise_power = detail::field_or<double>(j, "noise_power", 1.0, what);
    sc.total_power = detail::field_as<double>(j, "total_power", what);
    sc.pathloss_exp = detail::field_or<double>(j, "pathloss_exp", 0.0, what);
    sc.seed = detail::field_or<std::uint64_t>(j, "seed", 1, what);
    if (j.contains("distances")) {
        sc.distances = detail::field_as<std::vector<double>>(j, "distances", what);
    } else if (j.contains("cell_radius")) {
        sc.cell_radius = detail::field_as<double>(j, "cell_radius", what);
    } else {
        throw ConfigError("scenario: needs either 'distances' or 'cell_radius'");
    }
    sc.validate();
    return sc;
}

inline json scenario_to_json(const NetworkScenario& sc) {
    json j;
    j["users"] = sc.users;
    j["bs_antennas"] = sc.bs_antennas;
    j["user_antennas"] = sc.user_antennas;
    j["bins"] = sc.bins;
    j["symbol_rate"] = sc.symbol_rate;
    j["noise_power"] = sc.noise_power;
    j["total_power"] = sc.total_power;
    j["pathloss_exp"] = sc.pathloss_exp;
    if (!sc.distances.empty()) j["distances"] = sc.distances;
    else j["cell_radius"] = sc.cell_radius;
    j["seed"] = sc.seed;
    return j;
}

// ---- delivery solutions ----

inline json solution_to_json(const DeliverySolution& sol, std::uint64_t seed) {
    const SectionSet sections = enumerate_sections(sol.instance.users, sol.instance.copies);
    json j;
    j["seed"] = seed;
    j["instance"] = instance_to_json(sol.instance);
    j["T"] = sol.total_time;
    json u = json::array();
    for (int l = 0; l < sections.count(); ++l) {
        if (sol.u[l] <= 0) continue;
        json e;
        e["support"] = sections.support[l];
        e["length"] = sol.u[l];
        u.push_back(std::move(e));
    }
    j["u"] = std::move(u);
    j["q"] = sol.q;
    json sched = json::array();
    for (const auto& entry : sol.schedule) {
        const DenseScheduleEntry de = to_dense_entry(entry, sections);
        json e;
        e["combination"] = de.combo;
        e["mode_matrix"] = de.matrix;
        e["duration"] = de.duration;
        sched.push_back(std::move(e));
    }
    j["schedule"] = std::move(sched);
    j["nonzero_variables"] = sol.nonzero_variables;
    j["iterations"] = sol.iterations;
    return j;
}

struct SolutionFile {
    ProblemInstance instance;
    std::vector<double> u; // full per-section vector
    std::vector<double> q;
    double total_time = 0;
    std::vector<DenseScheduleEntry> schedule;
};

inline SolutionFile solution_from_json(const json& j) {
    const std::string what = "solution";
    SolutionFile sf;
    sf.instance = instance_from_json(detail::require_field(j, "instance", what));
    sf.total_time = detail::field_as<double>(j, "T", what);
    const SectionSet sections = enumerate_sections(sf.instance.users, sf.instance.copies);
    std::map<std::vector<int>, int> index_of;
    for (int l = 0; l < sections.count(); ++l) index_of[sections.support[l]] = l;
    sf.u.assign(sections.count(), 0.0);
    for (const auto& e : detail::require_field(j, "u", what)) {
        auto support = detail::field_as<std::vector<int>>(e, "support", "solution.u entry");
        std::sort(support.begin(), support.end());
        const auto it = index_of.find(support);
        if (it == index_of.end())
            throw ConfigError("solution: 'u' lists a support that is not a valid section");
        sf.u[it->second] = detail::field_as<double>(e, "length", "solution.u entry");
    }
    sf.q = detail::field_or<std::vector<double>>(j, "q", {}, what);
    for (const auto& e : detail::require_field(j, "schedule", what)) {
        DenseScheduleEntry de;
        de.combo = detail::field_as<std::vector<int>>(e, "combination", "schedule entry");
        de.duration = detail::field_as<double>(e, "duration", "schedule entry");
        de.matrix =
            detail::field_as<std::vector<std::vector<int>>>(e, "mode_matrix", "schedule entry");
        if (static_cast<int>(de.matrix.size()) != sections.count())
            throw ConfigError("solution: mode_matrix must have one row per section");
        for (const auto& row : de.matrix)
            if (static_cast<int>(row.size()) != sf.instance.users)
                throw ConfigError("solution: mode_matrix rows must have one entry per user");
        sf.schedule.push_back(std::move(de));
    }
    return sf;
}

// ---- power allocations ----

inline json allocation_to_json(const NetworkScenario& sc, const PowerAllocation& a,
                               const std::string& scheme_name) {
    json j;
    j["seed"] = sc.seed;
    j["scheme"] = scheme_name;
    j["users"] = sc.users;
    j["total_power"] = sc.total_power;
    j["power_used"] = a.user_power.sum();
    j["user_power"] = std::vector<double>(a.user_power.data(),
                                          a.user_power.data() + a.user_power.size());
    j["rates"] = std::vector<double>(a.rates.data(), a.rates.data() + a.rates.size());
    j["sum_rate"] = a.rates.sum();
    j["water_level"] = a.rho;
    j["capped_users"] = a.capped;
    return j;
}

inline std::string rates_csv(const NetworkScenario& sc, const PowerAllocation& a) {
    std::string out = "# seed=" + std::to_string(sc.seed) + "\n";
    out += "user,distance,power,rate\n";
    for (int i = 0; i < sc.users; ++i) {
        out += std::to_string(i) + "," + format_g(sc.distances[i]) + "," +
               format_g(a.user_power(i)) + "," + format_g(a.rates(i)) + "\n";
    }
    return out;
}

// ---- experiment configs, records, outputs ----

inline ExperimentConfig experiment_config_from_json(const json& j) {
    const std::string what = "config";
    ExperimentConfig cfg;
    cfg.realizations = detail::field_or<int>(j, "realizations", cfg.realizations, what);
    cfg.cell_radius = detail::field_or<double>(j, "cell_radius", cfg.cell_radius, what);
    cfg.alphas = detail::field_or<std::vector<double>>(j, "alphas", cfg.alphas, what);
    cfg.cache_sizes = detail::field_or<std::vector<int>>(j, "cache_sizes", cfg.cache_sizes, what);
    if (j.contains("schemes")) {
        cfg.schemes.clear();
        for (const auto& s : detail::field_as<std::vector<std::string>>(j, "schemes", what))
            cfg.schemes.push_back(scheme_from_string(s));
    }
    cfg.edge_snr_db = detail::field_or<std::vector<double>>(j, "edge_snr_db", cfg.edge_snr_db, what);
    cfg.bins = detail::field_or<int>(j, "bins", cfg.bins, what);
    cfg.bs_antennas = detail::field_or<int>(j, "bs_antennas", cfg.bs_antennas, what);
    cfg.user_antennas = detail::field_or<int>(j, "user_antennas", cfg.user_antennas, what);
    cfg.symbol_rate = detail::field_or<double>(j, "symbol_rate", cfg.symbol_rate, what);
    cfg.noise_power = detail::field_or<double>(j, "noise_power", cfg.noise_power, what);
    cfg.seed = detail::field_or<std::uint64_t>(j, "seed", cfg.seed, what);
    cfg.validate();
    return cfg;
}

inline json experiment_config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["realizations"] = cfg.realizations;
    j["cell_radius"] = cfg.cell_radius;
    j["alphas"] = cfg.alphas;
    j["cache_sizes"] = cfg.cache_sizes;
    std::vector<std::string> schemes;
    for (Scheme s : cfg.schemes) schemes.push_back(to_string(s));
    j["schemes"] = schemes;
    j["edge_snr_db"] = cfg.edge_snr_db;
    j["bins"] = cfg.bins;
    j["bs_antennas"] = cfg.bs_antennas;
    j["user_antennas"] = cfg.user_antennas;
    j["symbol_rate"] = cfg.symbol_rate;
    j["noise_power"] = cfg.noise_power;
    j["seed"] = cfg.seed;
    return j;
}

inline std::string records_csv(const std::vector<ThroughputRecord>& records) {
    std::string out = "scheme,M,alpha,edge_snr_db,throughput,stderr,realizations,seed\n";
    for (const auto& r : records) {
        out += std::string(to_string(r.scheme)) + "," + std::to_string(r.cache_size) + "," +
               format_g(r.alpha) + "," + format_g(r.edge_snr_db) + "," +
               format_g(r.throughput) + "," + format_g(r.stderr_) + "," +
               std::to_string(r.realizations) + "," + std::to_string(r.seed) + "\n";
    }
    return out;
}

namespace detail {

inline std::string series_label(Scheme scheme, int cache_size) {
    return std::string(to_string(scheme)) + " M=" + std::to_string(cache_size);
}

inline std::vector<std::pair<double, double>> snr_curve(
    const std::vector<ThroughputRecord>& records, Scheme scheme, int cache_size, double alpha) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : records)
        if (r.scheme == scheme && r.cache_size == cache_size && r.alpha == alpha)
            pts.emplace_back(r.edge_snr_db, r.throughput);
    std::sort(pts.begin(), pts.end());
    return pts;
}

} // namespace detail

// Raw throughput vs edge SNR at one path-loss exponent, a line per
// (scheme, cache size).
inline std::string fig_throughput(const std::vector<ThroughputRecord>& records, double alpha,
                                  bool normalized) {
    std::set<int> cache_sizes;
    std::set<Scheme> seen;
    for (const auto& r : records)
        if (r.alpha == alpha) {
            cache_sizes.insert(r.cache_size);
            seen.insert(r.scheme);
        }
    if (cache_sizes.empty())
        throw ConfigError("figure: no records at alpha=" + format_g(alpha));
    PlotSpec spec;
    spec.title = std::string(normalized ? "Normalized net throughput" : "Net throughput") +
                 ", alpha=" + format_g(alpha);
    spec.x_label = "cell-edge SNR [dB]";
    spec.y_label = normalized ? "throughput / zero-cache optimal" : "net throughput [bit/s]";
    for (int m : cache_sizes)
        for (Scheme s : {Scheme::Optimal, Scheme::EqualPower, Scheme::EqualRate}) {
            if (!seen.count(s)) continue;
            auto pts = detail::snr_curve(records, s, m, alpha);
            if (pts.empty()) continue;
            spec.series.push_back({detail::series_label(s, m), std::move(pts)});
        }
    return render_line_plot(spec);
}

// Path-loss comparison: normalized curves for the largest cache size, one
// line per (alpha, scheme) for the optimal and equal-rate schemes.
inline std::string fig_alpha_comparison(const std::vector<ThroughputRecord>& normalized) {
    int m_top = -1;
    std::set<double> alphas;
    for (const auto& r : normalized) {
        m_top = std::max(m_top, r.cache_size);
        alphas.insert(r.alpha);
    }
    if (m_top < 0) throw ConfigError("figure: no records");
    PlotSpec spec;
    spec.title = "Normalized throughput by path loss, M=" + std::to_string(m_top);
    spec.x_label = "cell-edge SNR [dB]";
    spec.y_label = "throughput / zero-cache optimal";
    for (double a : alphas)
        for (Scheme s : {Scheme::Optimal, Scheme::EqualRate}) {
            auto pts = detail::snr_curve(normalized, s, m_top, a);
            if (pts.empty()) continue;
            spec.series.push_back(
                {std::string(to_string(s)) + " alpha=" + format_g(a), std::move(pts)});
        }
    if (spec.series.empty()) throw ConfigError("figure: no optimal/equal_rate records");
    return render_line_plot(spec);
}

// Renders everything first, then writes, so a bad record set leaves no
// partial files behind.
inline void emit_outputs(const std::vector<ThroughputRecord>& records,
                         const std::string& out_dir) {
    if (records.empty()) throw ConfigError("emit_outputs: no records");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec); // write_text_file reports failures
    const std::vector<ThroughputRecord> norm = normalize(records);
    double alpha_first = records.front().alpha;
    for (const auto& r : records) alpha_first = std::min(alpha_first, r.alpha);

    const std::string raw_csv = records_csv(records);
    const std::string norm_csv = records_csv(norm);
    const std::string fig2 = fig_throughput(records, alpha_first, /*normalized=*/false);
    const std::string fig3 = fig_throughput(norm, alpha_first, /*normalized=*/true);
    const std::string fig4 = fig_alpha_comparison(norm);

    write_text_file(out_dir + "/throughput.csv", raw_csv);
    write_text_file(out_dir + "/normalized.csv", norm_csv);
    write_text_file(out_dir + "/fig2.svg", fig2);
    write_text_file(out_dir + "/fig3.svg", fig3);
    write_text_file(out_dir + "/fig4.svg", fig4);
}

// ---- machine-readable document shapes for --schema ----

inline std::string instance_schema() {
    return R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "instance",
  "type": "object",
  "required": ["users", "antennas_dim", "cache_copies", "rates"],
  "properties": {
    "users": {"type": "integer", "minimum": 1},
    "antennas_dim": {"type": "integer", "minimum": 1},
    "cache_copies": {"type": "integer", "minimum": 0},
    "files": {"type": "integer"},
    "rates": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}}
  }
})";
}

inline std::string solution_schema() {
    return R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "solution",
  "type": "object",
  "required": ["instance", "T", "u", "q", "schedule"],
  "properties": {
    "seed": {"type": "integer"},
    "instance": {"$ref": "instance"},
    "T": {"type": "number", "minimum": 0},
    "u": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["support", "length"],
        "properties": {
          "support": {"type": "array", "items": {"type": "integer", "minimum": 0}},
          "length": {"type": "number", "minimum": 0}
        }
      }
    },
    "q": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}},
    "schedule": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["combination", "mode_matrix", "duration"],
        "properties": {
          "combination": {"type": "array", "items": {"type": "integer", "minimum": 0}},
          "mode_matrix": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "integer", "enum": [0, 1]}}
          },
          "duration": {"type": "number", "minimum": 0}
        }
      }
    },
    "nonzero_variables": {"type": "integer"},
    "iterations": {"type": "integer"}
  }
})";
}

inline std::string scenario_schema() {
    return R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "scenario",
  "type": "object",
  "required": ["users", "bs_antennas", "bins", "total_power"],
  "properties": {
    "users": {"type": "integer", "minimum": 1},
    "bs_antennas": {"type": "integer", "minimum": 1},
    "user_antennas": {"type": "integer", "minimum": 1, "default": 1},
    "bins": {"type": "integer", "minimum": 1},
    "symbol_rate": {"type": "number", "exclusiveMinimum": 0, "default": 1},
    "noise_power": {"type": "number", "exclusiveMinimum": 0, "default": 1},
    "total_power": {"type": "number", "exclusiveMinimum": 0},
    "pathloss_exp": {"type": "number", "minimum": 0, "default": 0},
    "distances": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
    "cell_radius": {"type": "number", "exclusiveMinimum": 0},
    "seed": {"type": "integer", "default": 1}
  },
  "oneOf": [{"required": ["distances"]}, {"required": ["cell_radius"]}]
})";
}

inline std::string config_schema() {
    return R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "config",
  "type": "object",
  "properties": {
    "realizations": {"type": "integer", "minimum": 1, "default": 100},
    "cell_radius": {"type": "number", "exclusiveMinimum": 0, "default": 1},
    "alphas": {"type": "array", "items": {"type": "number", "minimum": 0}},
    "cache_sizes": {"type": "array", "items": {"type": "integer", "minimum": 0}},
    "schemes": {
      "type": "array",
      "items": {"type": "string", "enum": ["optimal", "equal_power", "equal_rate"]}
    },
    "edge_snr_db": {"type": "array", "items": {"type": "number"}},
    "bins": {"type": "integer", "minimum": 1, "default": 100},
    "bs_antennas": {"type": "integer", "minimum": 1, "default": 4},
    "user_antennas": {"type": "integer", "minimum": 1, "default": 1},
    "symbol_rate": {"type": "number", "exclusiveMinimum": 0, "default": 1},
    "noise_power": {"type": "number", "exclusiveMinimum": 0, "default": 1},
    "seed": {"type": "integer", "default": 1}
  }
})";
}

} // namespace ccopt
