#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "ccopt/channel.hpp"
#include "ccopt/errors.hpp"

namespace ccopt {

// Absolute per-bin channel gains: gain(i,m) * (per-bin power) is the SNR of
// user i in bin m. Rows follow scenario user order.
using GainTable = Eigen::ArrayXXd;

// Gains r_i^-alpha * eta_im / sigma^2 with the projector convention used
// throughout the simulations: user i's stream is nulled at the dim-1
// cyclically following users, so every projector leaves one clear direction.
inline GainTable effective_gain_table(const NetworkScenario& sc, const FadingRealization& f) {
    sc.validate();
    if (sc.user_antennas != 1)
        throw ConfigError("effective_gain_table: single-antenna users only");
    if (static_cast<int>(sc.distances.size()) != sc.users)
        throw ConfigError("effective_gain_table: scenario needs explicit distances");
    const int dim = sc.mux_dim();
    GainTable g(sc.users, sc.bins);
    std::vector<Eigen::MatrixXcd> to_null;
    for (int i = 0; i < sc.users; ++i) {
        const double w = std::pow(sc.distances[i], -sc.pathloss_exp) / sc.noise_power;
        for (int m = 0; m < sc.bins; ++m) {
            to_null.clear();
            for (int k = 1; k < dim; ++k)
                to_null.push_back(f.at((i + k) % sc.users, m));
            const ZfProjector proj = zf_projector(to_null, sc.bs_antennas);
            g(i, m) = w * effective_gain_scalar(f.at(i, m), proj);
        }
    }
    return g;
}

struct WaterfillResult {
    Eigen::ArrayXXd bin_power; // absolute power per (user, bin)
    Eigen::VectorXd user_power; // bin average, so powers sum against the budget
    Eigen::VectorXd rates;      // symbol_rate * sum over bins of log2(1 + snr)
};

// Water-filling at a common level rho: per-bin power (rho - 1/gain)_+ and
// the bin rate collapses to log2(max(1, rho*gain)).
inline WaterfillResult waterfill_rates(const GainTable& g, double rho, double symbol_rate) {
    if (!(rho >= 0)) throw ConfigError("waterfill_rates: rho must be >= 0");
    const Eigen::Index users = g.rows(), bins = g.cols();
    WaterfillResult r;
    r.bin_power.resize(users, bins);
    r.user_power.resize(users);
    r.rates.resize(users);
    for (Eigen::Index i = 0; i < users; ++i) {
        double rate = 0;
        for (Eigen::Index m = 0; m < bins; ++m) {
            const double gain = g(i, m);
            const double p = gain > 0 ? std::max(0.0, rho - 1.0 / gain) : 0.0;
            r.bin_power(i, m) = p;
            if (p > 0) rate += std::log2(rho * gain);
        }
        r.user_power(i) = r.bin_power.row(i).mean();
        r.rates(i) = symbol_rate * rate;
    }
    return r;
}

namespace detail {

// rate of one user's gains at water level rho
inline double rate_at_level(const Eigen::ArrayXd& gains, double rho, double symbol_rate) {
    double rate = 0;
    for (Eigen::Index m = 0; m < gains.size(); ++m)
        if (rho * gains(m) > 1.0) rate += std::log2(rho * gains(m));
    return symbol_rate * rate;
}

inline double power_at_level(const Eigen::ArrayXd& gains, double rho) {
    double p = 0;
    for (Eigen::Index m = 0; m < gains.size(); ++m)
        if (gains(m) > 0) p += std::max(0.0, rho - 1.0 / gains(m));
    return p / static_cast<double>(gains.size());
}

// smallest water level reaching the target rate (bisection; rate is
// continuous and nondecreasing in the level)
inline double level_for_rate(const Eigen::ArrayXd& gains, double target, double symbol_rate,
                             double hi_start) {
    if (target <= 0) return 0;
    double lo = 0, hi = std::max(hi_start, 1e-12);
    int guard = 0;
    while (rate_at_level(gains, hi, symbol_rate) < target) {
        hi *= 2;
        if (++guard > 400) throw NumericalError("water level search failed to bracket");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (rate_at_level(gains, mid, symbol_rate) >= target) hi = mid;
        else lo = mid;
        if (hi - lo <= 1e-14 * hi) break;
    }
    return hi;
}

// flat (non-waterfilling) power reaching the target rate
inline double flat_power_for_rate(const Eigen::ArrayXd& gains, double target,
                                  double symbol_rate, double hi_start) {
    if (target <= 0) return 0;
    auto rate_of = [&](double p) {
        double rate = 0;
        for (Eigen::Index m = 0; m < gains.size(); ++m) rate += std::log2(1.0 + p * gains(m));
        return symbol_rate * rate;
    };
    double lo = 0, hi = std::max(hi_start, 1e-12);
    int guard = 0;
    while (rate_of(hi) < target) {
        hi *= 2;
        if (++guard > 400) throw NumericalError("flat power search failed to bracket");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (rate_of(mid) >= target) hi = mid;
        else lo = mid;
        if (hi - lo <= 1e-14 * hi) break;
    }
    return hi;
}

} // namespace detail

struct HSearchResult {
    int capped = 0;     // h: users pinned to the cap
    double rate_cap = 0; // R_max(h)
    std::vector<int> valid; // every h passing both inequality families
};

// Given per-user water-filling rates sorted ascending, find h in [0, dim)
// with cap (sum of the users-h smallest rates)/(dim-h) such that the first
// users-h rates sit at or below the cap and the last h at or above it. The
// smallest valid h is returned; ties can make neighbours valid too, and all
// of them describe the same allocation.
inline HSearchResult find_h(const std::vector<double>& rates_sorted, int dim) {
    const int users = static_cast<int>(rates_sorted.size());
    if (dim < 1 || dim > users) throw ConfigError("find_h: need 1 <= dim <= users");
    for (int i = 1; i < users; ++i)
        if (rates_sorted[i] < rates_sorted[i - 1] * (1.0 - 1e-12) - 1e-15)
            throw ConfigError("find_h: rates must be sorted ascending");
    HSearchResult out;
    bool found = false;
    for (int h = 0; h < dim; ++h) {
        double head = 0;
        for (int u = 0; u < users - h; ++u) head += rates_sorted[u];
        const double cap = head / (dim - h);
        const double slack = 1e-9 * (std::abs(cap) + 1e-300);
        bool ok = true;
        for (int u = 0; u < users - h && ok; ++u) ok = rates_sorted[u] <= cap + slack;
        for (int u = users - h; u < users && ok; ++u) ok = rates_sorted[u] >= cap - slack;
        if (ok) {
            out.valid.push_back(h);
            if (!found) {
                out.capped = h;
                out.rate_cap = cap;
                found = true;
            }
        }
    }
    if (!found)
        throw NumericalError("find_h: no valid cap count (is the rate list sorted?)");
    return out;
}

struct PowerAllocation {
    Eigen::VectorXd user_power; // watts per user, bin-averaged
    Eigen::ArrayXXd intra;      // per-bin factors, mean 1 across bins (1 for idle users)
    Eigen::VectorXd rates;
    double rho = 0; // common water level (0 when not level-based)
    int capped = 0; // users pinned to the rate cap
};

namespace detail {

inline PowerAllocation assemble(const Eigen::ArrayXXd& bin_power, const GainTable& g,
                                double symbol_rate) {
    PowerAllocation a;
    const Eigen::Index users = g.rows(), bins = g.cols();
    a.user_power.resize(users);
    a.intra.resize(users, bins);
    a.rates.resize(users);
    for (Eigen::Index i = 0; i < users; ++i) {
        const double p = bin_power.row(i).mean();
        a.user_power(i) = p;
        if (p > 0) a.intra.row(i) = bin_power.row(i) / p;
        else a.intra.row(i).setOnes();
        double rate = 0;
        for (Eigen::Index m = 0; m < bins; ++m)
            rate += std::log2(1.0 + bin_power(i, m) * g(i, m));
        a.rates(i) = symbol_rate * rate;
    }
    return a;
}

} // namespace detail

struct BisectOptions {
    double power_rtol = 1e-9; // on the total-power match
    int max_iterations = 200;
};

// Throughput-optimal allocation under the group rate cap: water-fill at a
// common level, pin the strongest h users to the cap at their own minimal
// water levels, and bisect the common level until the bin-averaged powers
// sum to the budget. The capped count h and membership follow the rate
// order at the current level, so the total power stays monotone in rho.
inline PowerAllocation constrained_allocation(const GainTable& g, int dim, double budget,
                                              double symbol_rate,
                                              const BisectOptions& opt = {}) {
    if (!(budget > 0)) throw ConfigError("constrained_allocation: budget must be > 0");
    const int users = static_cast<int>(g.rows());
    if (dim < 1 || dim > users) throw ConfigError("constrained_allocation: bad dim");

    struct Eval {
        double total = 0;
        Eigen::ArrayXXd bin_power;
        int capped = 0;
    };
    auto evaluate = [&](double rho) {
        Eval ev;
        WaterfillResult wf = waterfill_rates(g, rho, symbol_rate);
        std::vector<int> order(users);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return wf.rates(a) < wf.rates(b); });
        std::vector<double> sorted(users);
        for (int k = 0; k < users; ++k) sorted[k] = wf.rates(order[k]);
        const HSearchResult hs = find_h(sorted, dim);
        ev.capped = hs.capped;
        ev.bin_power = wf.bin_power;
        for (int k = users - hs.capped; k < users; ++k) {
            const int i = order[k];
            const Eigen::ArrayXd gains = g.row(i).transpose();
            const double level = detail::level_for_rate(gains, hs.rate_cap, symbol_rate, rho);
            for (Eigen::Index m = 0; m < g.cols(); ++m)
                ev.bin_power(i, m) = gains(m) > 0 ? std::max(0.0, level - 1.0 / gains(m)) : 0.0;
        }
        ev.total = 0;
        for (int i = 0; i < users; ++i) ev.total += ev.bin_power.row(i).mean();
        return ev;
    };

    double lo = 0, hi = 1.0;
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index m = 0; m < g.cols(); ++m)
            if (g(i, m) > 0) hi = std::max(hi, 1.0 / g(i, m));
    int guard = 0;
    while (evaluate(hi).total < budget) {
        hi *= 2;
        if (++guard > 400)
            throw NumericalError("constrained_allocation: failed to bracket the budget");
    }
    Eval best = evaluate(hi);
    for (int it = 0; it < opt.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        Eval ev = evaluate(mid);
        if (ev.total >= budget) {
            hi = mid;
            best = std::move(ev);
        } else {
            lo = mid;
        }
        if (std::abs(best.total - budget) <= opt.power_rtol * budget) break;
        if (hi - lo <= 1e-15 * hi) break;
    }
    PowerAllocation a = detail::assemble(best.bin_power, g, symbol_rate);
    a.rho = hi;
    a.capped = best.capped;

    const double cap = a.rates.sum() / dim;
    for (int i = 0; i < users; ++i)
        if (a.rates(i) > cap * (1.0 + 1e-6))
            throw NumericalError("constrained_allocation: cap violated after assembly");
    return a;
}

// All users at one common rate, each with water-filling over its own bins at
// the minimal level reaching that rate; the common rate is bisected until
// the budget is met.
inline PowerAllocation equal_rate_allocation(const GainTable& g, double budget,
                                             double symbol_rate,
                                             const BisectOptions& opt = {}) {
    if (!(budget > 0)) throw ConfigError("equal_rate_allocation: budget must be > 0");
    const int users = static_cast<int>(g.rows());
    const Eigen::Index bins = g.cols();

    auto min_power_for = [&](double rate, Eigen::ArrayXXd* out) {
        double total = 0;
        if (out) out->setZero(users, bins);
        for (int i = 0; i < users; ++i) {
            const Eigen::ArrayXd gains = g.row(i).transpose();
            const double level = detail::level_for_rate(gains, rate, symbol_rate, 1.0);
            double p = 0;
            for (Eigen::Index m = 0; m < bins; ++m) {
                const double bp = gains(m) > 0 ? std::max(0.0, level - 1.0 / gains(m)) : 0.0;
                if (out) (*out)(i, m) = bp;
                p += bp;
            }
            total += p / static_cast<double>(bins);
        }
        return total;
    };

    // the worst user alone, given the whole budget, bounds the common rate
    double hi = std::numeric_limits<double>::infinity();
    for (int i = 0; i < users; ++i) {
        const Eigen::ArrayXd gains = g.row(i).transpose();
        double llo = 0, lhi = 1.0;
        int guard = 0;
        while (detail::power_at_level(gains, lhi) < budget) {
            lhi *= 2;
            if (++guard > 400) throw NumericalError("equal_rate_allocation: level bracket");
        }
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (llo + lhi);
            if (detail::power_at_level(gains, mid) >= budget) lhi = mid;
            else llo = mid;
        }
        hi = std::min(hi, detail::rate_at_level(gains, lhi, symbol_rate));
    }
    double lo = 0;
    for (int it = 0; it < opt.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (min_power_for(mid, nullptr) >= budget) hi = mid;
        else lo = mid;
        if (hi - lo <= 1e-13 * std::max(hi, 1e-300)) break;
    }
    Eigen::ArrayXXd bin_power;
    min_power_for(lo, &bin_power);
    PowerAllocation a = detail::assemble(bin_power, g, symbol_rate);
    a.rho = 0;
    a.capped = 0;
    return a;
}

// The flat reference: budget/users per user on every bin.
inline PowerAllocation equal_power_allocation(const GainTable& g, double budget,
                                              double symbol_rate) {
    if (!(budget > 0)) throw ConfigError("equal_power_allocation: budget must be > 0");
    const int users = static_cast<int>(g.rows());
    Eigen::ArrayXXd bin_power(users, g.cols());
    bin_power.setConstant(budget / users);
    PowerAllocation a = detail::assemble(bin_power, g, symbol_rate);
    a.rho = 0;
    a.capped = 0;
    return a;
}

// Equal power with the strongest users wired down (still flat per bin) to
// the group rate cap. This stays inside the capped feasible set, so its sum
// rate is always dominated by constrained_allocation on the same gains.
inline PowerAllocation equal_power_capped_allocation(const GainTable& g, int dim,
                                                     double budget, double symbol_rate) {
    PowerAllocation a = equal_power_allocation(g, budget, symbol_rate);
    const int users = static_cast<int>(g.rows());
    std::vector<int> order(users);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return a.rates(x) < a.rates(y); });
    std::vector<double> sorted(users);
    for (int k = 0; k < users; ++k) sorted[k] = a.rates(order[k]);
    const HSearchResult hs = find_h(sorted, dim);
    if (hs.capped == 0) return a;
    Eigen::ArrayXXd bin_power(users, g.cols());
    for (int i = 0; i < users; ++i) bin_power.row(i).setConstant(budget / users);
    for (int k = users - hs.capped; k < users; ++k) {
        const int i = order[k];
        const Eigen::ArrayXd gains = g.row(i).transpose();
        const double p = detail::flat_power_for_rate(gains, hs.rate_cap, symbol_rate,
                                                     budget / users);
        bin_power.row(i).setConstant(std::min(p, budget / users));
    }
    PowerAllocation out = detail::assemble(bin_power, g, symbol_rate);
    out.rho = 0;
    out.capped = hs.capped;
    return out;
}

} // namespace ccopt
