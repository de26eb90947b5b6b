#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ccopt/channel.hpp"
#include "ccopt/closed_form.hpp"
#include "ccopt/errors.hpp"
#include "ccopt/power.hpp"
#include "ccopt/rng.hpp"

namespace ccopt {

enum class Scheme { Optimal, EqualPower, EqualRate };

inline const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::Optimal: return "optimal";
        case Scheme::EqualPower: return "equal_power";
        case Scheme::EqualRate: return "equal_rate";
    }
    return "?";
}

inline Scheme scheme_from_string(const std::string& s) {
    if (s == "optimal") return Scheme::Optimal;
    if (s == "equal_power") return Scheme::EqualPower;
    if (s == "equal_rate") return Scheme::EqualRate;
    throw ConfigError("unknown scheme '" + s + "' (optimal, equal_power, equal_rate)");
}

// Cell population scales with the cache budget: U = M + N users, so every
// realization runs at full spatial load.
struct ExperimentConfig {
    int realizations = 100;
    double cell_radius = 1.0;
    std::vector<double> alphas = {2.0, 3.2, 4.0};
    std::vector<int> cache_sizes = {0, 2, 4};
    std::vector<Scheme> schemes = {Scheme::Optimal, Scheme::EqualPower, Scheme::EqualRate};
    std::vector<double> edge_snr_db = {-10, -5, 0, 5, 10, 15, 20, 25, 30, 35, 40};
    int bins = 100;
    int bs_antennas = 4;
    int user_antennas = 1;
    double symbol_rate = 1.0;
    double noise_power = 1.0;
    std::uint64_t seed = 1;

    int mux_dim() const {
        if (user_antennas < 1 || bs_antennas < 1 || bs_antennas % user_antennas != 0)
            throw ConfigError("experiment: bs_antennas must be a positive multiple of user_antennas");
        return bs_antennas / user_antennas;
    }

    void validate() const {
        if (realizations < 1) throw ConfigError("experiment: realizations must be >= 1");
        if (!(cell_radius > 0)) throw ConfigError("experiment: cell_radius must be > 0");
        if (alphas.empty()) throw ConfigError("experiment: alphas must be nonempty");
        for (double a : alphas)
            if (!(a >= 0)) throw ConfigError("experiment: pathloss exponents must be >= 0");
        if (cache_sizes.empty()) throw ConfigError("experiment: cache_sizes must be nonempty");
        for (int m : cache_sizes)
            if (m < 0) throw ConfigError("experiment: cache sizes must be >= 0");
        if (schemes.empty()) throw ConfigError("experiment: schemes must be nonempty");
        if (edge_snr_db.empty()) throw ConfigError("experiment: edge_snr_db must be nonempty");
        if (bins < 1) throw ConfigError("experiment: bins must be >= 1");
        if (!(symbol_rate > 0)) throw ConfigError("experiment: symbol_rate must be > 0");
        if (!(noise_power > 0)) throw ConfigError("experiment: noise_power must be > 0");
        mux_dim();
    }
};

struct ThroughputRecord {
    Scheme scheme = Scheme::Optimal;
    int cache_size = 0;
    double alpha = 0;
    double edge_snr_db = 0;
    double throughput = 0; // mean net throughput (U-M)/T over realizations
    double stderr_ = 0;    // standard error of that mean
    int realizations = 0;  // samples that contributed
    int failures = 0;      // realizations dropped to solver failures
    std::uint64_t seed = 0;
};

// Area-uniform user drops: radius r_max * sqrt(u01).
inline std::vector<double> generate_positions(int users, double r_max, std::uint64_t seed,
                                              std::initializer_list<std::uint64_t> extra = {}) {
    if (users < 1) throw ConfigError("generate_positions: users must be >= 1");
    if (!(r_max > 0)) throw ConfigError("generate_positions: r_max must be > 0");
    Rng rng(seed, {streams::positions});
    for (std::uint64_t k : extra) rng.mix_key(k);
    std::vector<double> r(users);
    for (int i = 0; i < users; ++i) r[i] = r_max * std::sqrt(rng.next_double());
    return r;
}

namespace detail {

// one network draw, shared by every (alpha, SNR, scheme) cell of a point
struct RealizationDraw {
    std::vector<double> distances;
    FadingRealization fading;
};

inline RealizationDraw draw_realization(const ExperimentConfig& cfg, int users, long k) {
    RealizationDraw d;
    d.distances = generate_positions(users, cfg.cell_radius, cfg.seed,
                                     {static_cast<std::uint64_t>(users),
                                      static_cast<std::uint64_t>(k)});
    NetworkScenario sc;
    sc.users = users;
    sc.bs_antennas = cfg.bs_antennas;
    sc.user_antennas = cfg.user_antennas;
    sc.bins = cfg.bins;
    sc.symbol_rate = cfg.symbol_rate;
    sc.noise_power = cfg.noise_power;
    sc.total_power = 1.0; // not used for fading
    sc.pathloss_exp = 2.0;
    sc.distances = d.distances;
    sc.seed = Rng(cfg.seed, {streams::realization, static_cast<std::uint64_t>(users),
                             static_cast<std::uint64_t>(k)})
                  .next_u64();
    d.fading = sample_fading(sc);
    return d;
}

inline GainTable gains_for_alpha(const ExperimentConfig& cfg, const RealizationDraw& d,
                                 double alpha) {
    NetworkScenario sc;
    sc.users = static_cast<int>(d.distances.size());
    sc.bs_antennas = cfg.bs_antennas;
    sc.user_antennas = cfg.user_antennas;
    sc.bins = cfg.bins;
    sc.symbol_rate = cfg.symbol_rate;
    sc.noise_power = cfg.noise_power;
    sc.total_power = 1.0;
    sc.pathloss_exp = alpha;
    sc.distances = d.distances;
    sc.seed = d.fading.seed;
    return effective_gain_table(sc, d.fading);
}

// Total transmit power that puts the stated per-user SNR share at the cell
// edge: snr = (P/U) * r_max^-alpha / sigma^2.
inline double budget_for_edge_snr(const ExperimentConfig& cfg, int users, double alpha,
                                  double snr_db) {
    const double snr = std::pow(10.0, snr_db / 10.0);
    return snr * users * cfg.noise_power * std::pow(cfg.cell_radius, alpha);
}

// Net throughput (U-M)/T for one allocation's rate profile. T is the
// completion time: N/sum(R) when the profile meets the rate cap, and the
// capped extension (strong users finish early) otherwise, which matches
// the covering-LP optimum for U = M+N.
inline double net_throughput(const Eigen::VectorXd& rates, int copies) {
    std::vector<double> r(rates.data(), rates.data() + rates.size());
    const double t = completion_time(r, copies);
    if (!(t > 0)) throw NumericalError("net_throughput: nonpositive completion time");
    return (static_cast<int>(r.size()) - copies) / t;
}

inline double realization_throughput(const GainTable& g, Scheme scheme, int dim, int copies,
                                     double budget, double symbol_rate) {
    PowerAllocation a;
    switch (scheme) {
        case Scheme::Optimal:
            a = constrained_allocation(g, dim, budget, symbol_rate);
            break;
        case Scheme::EqualRate:
            a = equal_rate_allocation(g, budget, symbol_rate);
            break;
        case Scheme::EqualPower:
            a = equal_power_allocation(g, budget, symbol_rate);
            break;
    }
    return net_throughput(a.rates, copies);
}

struct Accumulator {
    double sum = 0, sumsq = 0;
    int n = 0;
    void add(double v) {
        sum += v;
        sumsq += v * v;
        ++n;
    }
    double mean() const { return n ? sum / n : 0.0; }
    double stderr_of_mean() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double var = std::max(0.0, (sumsq - n * m * m) / (n - 1));
        return std::sqrt(var / n);
    }
};

} // namespace detail

// One grid point, drawing its own realizations. run_experiments computes the
// same statistics with the draws shared across grid cells.
inline ThroughputRecord run_point(const ExperimentConfig& cfg, Scheme scheme, int cache_size,
                                  double alpha, double snr_db) {
    cfg.validate();
    const int dim = cfg.mux_dim();
    const int users = cache_size + dim;
    const double budget = detail::budget_for_edge_snr(cfg, users, alpha, snr_db);
    detail::Accumulator acc;
    int failures = 0;
    for (long k = 0; k < cfg.realizations; ++k) {
        const detail::RealizationDraw draw = detail::draw_realization(cfg, users, k);
        const GainTable g = detail::gains_for_alpha(cfg, draw, alpha);
        try {
            acc.add(detail::realization_throughput(g, scheme, dim, cache_size, budget,
                                                   cfg.symbol_rate));
        } catch (const NumericalError&) {
            ++failures;
        } catch (const InfeasibleError&) {
            ++failures;
        }
    }
    ThroughputRecord rec;
    rec.scheme = scheme;
    rec.cache_size = cache_size;
    rec.alpha = alpha;
    rec.edge_snr_db = snr_db;
    rec.throughput = acc.mean();
    rec.stderr_ = acc.stderr_of_mean();
    rec.realizations = acc.n;
    rec.failures = failures;
    rec.seed = cfg.seed;
    return rec;
}

// Full grid sweep with network draws and gain tables shared across SNR and
// scheme (they depend only on (users, realization) and alpha), so common
// random numbers pair the scheme curves.
inline std::vector<ThroughputRecord> run_experiments(const ExperimentConfig& cfg) {
    cfg.validate();
    const int dim = cfg.mux_dim();
    std::vector<ThroughputRecord> out;
    for (int cache_size : cfg.cache_sizes) {
        const int users = cache_size + dim;
        std::vector<detail::RealizationDraw> draws;
        draws.reserve(cfg.realizations);
        for (long k = 0; k < cfg.realizations; ++k)
            draws.push_back(detail::draw_realization(cfg, users, k));
        for (double alpha : cfg.alphas) {
            std::vector<GainTable> gains;
            gains.reserve(draws.size());
            for (const auto& d : draws) gains.push_back(detail::gains_for_alpha(cfg, d, alpha));
            for (Scheme scheme : cfg.schemes) {
                for (double snr_db : cfg.edge_snr_db) {
                    const double budget =
                        detail::budget_for_edge_snr(cfg, users, alpha, snr_db);
                    detail::Accumulator acc;
                    int failures = 0;
                    for (const auto& g : gains) {
                        try {
                            acc.add(detail::realization_throughput(
                                g, scheme, dim, cache_size, budget, cfg.symbol_rate));
                        } catch (const NumericalError&) {
                            ++failures;
                        } catch (const InfeasibleError&) {
                            ++failures;
                        }
                    }
                    ThroughputRecord rec;
                    rec.scheme = scheme;
                    rec.cache_size = cache_size;
                    rec.alpha = alpha;
                    rec.edge_snr_db = snr_db;
                    rec.throughput = acc.mean();
                    rec.stderr_ = acc.stderr_of_mean();
                    rec.realizations = acc.n;
                    rec.failures = failures;
                    rec.seed = cfg.seed;
                    out.push_back(rec);
                }
            }
        }
    }
    return out;
}

// Divide by the zero-cache optimal-allocation throughput at the same
// (alpha, SNR). The reference mean is treated as exact, so standard errors
// scale by the same factor.
inline std::vector<ThroughputRecord> normalize(const std::vector<ThroughputRecord>& records) {
    std::map<std::pair<double, double>, double> ref;
    for (const auto& r : records)
        if (r.scheme == Scheme::Optimal && r.cache_size == 0)
            ref[{r.alpha, r.edge_snr_db}] = r.throughput;
    std::vector<ThroughputRecord> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        const auto it = ref.find({r.alpha, r.edge_snr_db});
        if (it == ref.end())
            throw ConfigError("normalize: no zero-cache optimal reference at alpha=" +
                              std::to_string(r.alpha) + " snr=" +
                              std::to_string(r.edge_snr_db));
        if (!(it->second > 0))
            throw NumericalError("normalize: reference throughput is not positive");
        ThroughputRecord n = r;
        n.throughput = r.throughput / it->second;
        n.stderr_ = r.stderr_ / it->second;
        out.push_back(n);
    }
    return out;
}

} // namespace ccopt
