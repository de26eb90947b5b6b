#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "ccopt/errors.hpp"

namespace ccopt {

struct FeasibilityReport {
    bool feasible = true;
    std::vector<bool> per_user; // user i within the rate cap
    double rate_cap = 0;        // (sum of rates) / dim
};

// A rate profile admits a schedule where every user stays active for the
// whole delivery iff no rate exceeds (sum of rates)/dim. Applies to the
// fully-loaded case users == copies + dim.
inline FeasibilityReport feasibility_check(const std::vector<double>& rates, int dim) {
    if (dim < 1) throw ConfigError("feasibility_check: dim must be >= 1");
    if (rates.empty()) throw ConfigError("feasibility_check: empty rate list");
    for (double r : rates)
        if (!(r > 0)) throw ConfigError("feasibility_check: rates must be positive");
    const double sum = std::accumulate(rates.begin(), rates.end(), 0.0);
    FeasibilityReport rep;
    rep.rate_cap = sum / dim;
    rep.per_user.resize(rates.size());
    for (std::size_t i = 0; i < rates.size(); ++i) {
        rep.per_user[i] = rates[i] <= rep.rate_cap * (1.0 + 1e-12);
        rep.feasible = rep.feasible && rep.per_user[i];
    }
    return rep;
}

struct ClosedFormSolution {
    double total_time = 0;
    std::vector<double> q;
};

// Fully-loaded case: delivery takes dim / (sum of rates) and user u caches
// q_u = 1 - T * R_u of every file. copies == users means everything is
// cached and T = 0 (degenerate but well defined).
inline ClosedFormSolution closed_form_solution(const std::vector<double>& rates, int dim,
                                               int copies) {
    const int users = static_cast<int>(rates.size());
    if (copies < 0 || dim < 0 || copies + dim != users)
        throw ConfigError("closed_form_solution: needs copies + dim == users");
    ClosedFormSolution sol;
    if (dim == 0) {
        sol.total_time = 0;
        sol.q.assign(users, 1.0);
        return sol;
    }
    const FeasibilityReport rep = feasibility_check(rates, dim);
    if (!rep.feasible)
        throw InfeasibleError("a user rate exceeds the group cap of " +
                              std::to_string(rep.rate_cap) +
                              "; rebalance power or fall back to the general program");
    const double sum = std::accumulate(rates.begin(), rates.end(), 0.0);
    sol.total_time = dim / sum;
    sol.q.resize(users);
    for (int u = 0; u < users; ++u) sol.q[u] = std::max(0.0, 1.0 - sol.total_time * rates[u]);
    return sol;
}

// Interval-tiling placement for given per-user fractions with sum(q) =
// copies: lay the arcs [s_u, s_u + q_u) head to tail over [0, copies) and
// wrap modulo 1. Every point of the unit file is then covered by exactly
// `copies` users and user u covers q_u of it, with at most users+1 segments.
struct TiledSegment {
    double begin = 0;
    double end = 0;
    std::vector<int> stored_at;
};

struct SectionLayout {
    std::vector<TiledSegment> segments;
};

inline SectionLayout placement_for_closed_form(const std::vector<double>& q, int copies) {
    const int users = static_cast<int>(q.size());
    double sum = 0;
    for (double v : q) {
        if (v < -1e-9 || v > 1.0 + 1e-9)
            throw ConfigError("placement: fractions must lie in [0,1]");
        sum += v;
    }
    if (std::abs(sum - copies) > 1e-6)
        throw ConfigError("placement: fractions must sum to the copy count");

    // arc starts, wrapped into [0,1)
    std::vector<double> start(users), stop(users);
    double at = 0;
    for (int u = 0; u < users; ++u) {
        start[u] = at - std::floor(at);
        at += q[u];
        stop[u] = at - std::floor(at);
    }
    std::vector<double> cuts{0.0, 1.0};
    for (int u = 0; u < users; ++u) {
        cuts.push_back(start[u]);
        cuts.push_back(stop[u]);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               cuts.end());

    SectionLayout layout;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        TiledSegment seg;
        seg.begin = cuts[k];
        seg.end = cuts[k + 1];
        const double mid = 0.5 * (seg.begin + seg.end);
        for (int u = 0; u < users; ++u) {
            if (q[u] <= 1e-12) continue;
            const bool inside = q[u] >= 1.0 - 1e-12 ||
                                (start[u] <= stop[u] - 1e-12
                                     ? (mid >= start[u] && mid < stop[u])
                                     : (mid >= start[u] || mid < stop[u]));
            if (inside) seg.stored_at.push_back(u);
        }
        if (seg.end - seg.begin > 1e-12) layout.segments.push_back(std::move(seg));
    }
    return layout;
}

// Smallest T with sum over users of max(0, 1 - T*R_u) equal to the copy
// count: the delivery-completion bound when early-finishing users may drop
// out. Coincides with dim/(sum of rates) whenever the cap condition holds.
inline double completion_time(const std::vector<double>& rates, int copies) {
    const int users = static_cast<int>(rates.size());
    if (copies < 0 || copies > users) throw ConfigError("completion_time: bad copy count");
    for (double r : rates)
        if (!(r > 0)) throw ConfigError("completion_time: rates must be positive");
    if (copies == users) return 0.0;
    // g(T) = sum(1 - T R)_+ - copies is piecewise linear, decreasing from
    // users - copies > 0 at T=0 to -copies at T = max 1/R; scan breakpoints.
    std::vector<double> brk(users);
    for (int i = 0; i < users; ++i) brk[i] = 1.0 / rates[i];
    std::sort(brk.begin(), brk.end());
    double lo = 0;
    for (int k = 0; k <= users; ++k) {
        const double hi = k < users ? brk[k] : brk.back();
        // on [lo, hi] the active set is {i : 1/R_i >= hi}, linear there
        double ones = 0, slope = 0;
        for (int i = 0; i < users; ++i)
            if (1.0 / rates[i] >= hi - 1e-15) {
                ones += 1.0;
                slope += rates[i];
            }
        if (slope <= 0) break;
        const double t = (ones - copies) / slope;
        if (t >= lo - 1e-12 && t <= hi + 1e-12) return std::max(t, 0.0);
        lo = hi;
    }
    throw NumericalError("completion_time: no breakpoint interval contained the root");
}

} // namespace ccopt
