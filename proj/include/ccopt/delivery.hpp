#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ccopt/errors.hpp"
#include "ccopt/scheme.hpp"
#include "ccopt/simplex.hpp"

namespace ccopt {

struct ProblemInstance {
    int users = 0;   // U
    int dim = 0;     // N, spatial multiplexing dimension
    int copies = 0;  // M, database copies spread across caches
    long files = -1; // F; any value >= users gives the same reduced problem
    std::vector<double> rates;

    void validate() const {
        if (users < 1) throw ConfigError("instance: users must be >= 1");
        if (dim < 1) throw ConfigError("instance: antennas_dim must be >= 1");
        if (copies < 0) throw ConfigError("instance: cache_copies must be >= 0");
        if (copies + dim > users)
            throw ConfigError("instance: need cache_copies + antennas_dim <= users");
        if (static_cast<int>(rates.size()) != users)
            throw ConfigError("instance: rates must list one entry per user");
        for (double r : rates)
            if (!(r > 0)) throw ConfigError("instance: rates must be strictly positive");
        if (files >= 0 && files < users)
            throw ConfigError("instance: files must be >= users");
    }
};

// Per-mode delivery rate: each active user at its own link rate, or the
// whole group at the slowest member's rate (the rate-oblivious discipline).
enum class RateModel { PerUser, GroupMin };

struct DeliveryBuildOptions {
    RateModel rate_model = RateModel::PerUser;
    bool uniform_placement = false; // pin every section length to 1/L
    std::uint64_t variable_cap = 10000000;
};

// The delivery-time program over section lengths u and mode durations T:
//   min sum T   s.t.   sum_l u_l = 1   (dropped when placement is pinned)
//                      sum_{modes} T * [mode sends l to i] * rate >= u_l
//                            for every (l, i) with user i not storing l
// Delivery rows are covering constraints: receiving a section for longer
// than it takes is wasteful but legal, and with them the program is feasible
// for every valid instance. On balanced instances the optimum meets them
// with equality. Variables are ordered u_0..u_{L-1}, then modes grouped by
// combination in enumeration order, J per combination.
struct DeliveryLp {
    ProblemInstance instance;
    DeliveryBuildOptions options;
    SectionSet sections;
    std::vector<std::vector<int>> combos;
    std::uint64_t modes_per_combo = 0;
    LinearProgram lp;
    std::vector<std::vector<int>> zero_rank; // [l][i] -> rank of i among non-storers of l, -1 if storer

    int num_u_cols() const { return options.uniform_placement ? 0 : sections.count(); }
    int row_of(int l, int i) const {
        const int base = options.uniform_placement ? 0 : 1;
        return base + l * (instance.users - instance.copies) + zero_rank[l][i];
    }
    // inverse of the mode-column layout
    std::pair<int, std::uint64_t> combo_and_ordinal(std::size_t col) const {
        const std::uint64_t t = col - num_u_cols();
        return {static_cast<int>(t / modes_per_combo), t % modes_per_combo};
    }
};

inline double group_min_rate(const ProblemInstance& inst, const std::vector<int>& combo) {
    double r = inst.rates[combo.front()];
    for (int i : combo) r = std::min(r, inst.rates[i]);
    return r;
}

inline DeliveryLp build_delivery_lp(const ProblemInstance& inst,
                                    const DeliveryBuildOptions& opt = {}) {
    inst.validate();
    const std::uint64_t total_vars = variable_count(inst.users, inst.copies, inst.dim);
    if (total_vars > opt.variable_cap)
        throw ConfigError("delivery LP would have " + std::to_string(total_vars) +
                          " variables, above the cap of " + std::to_string(opt.variable_cap));

    DeliveryLp d;
    d.instance = inst;
    d.options = opt;
    d.sections = enumerate_sections(inst.users, inst.copies);
    d.combos = enumerate_combinations(inst.users, inst.copies + inst.dim);
    d.modes_per_combo =
        checked_pow(binomial(inst.copies + inst.dim - 1, inst.copies),
                    static_cast<unsigned>(inst.copies + inst.dim));

    const int L = d.sections.count();
    const int zeros_per_section = inst.users - inst.copies;
    d.zero_rank.assign(L, std::vector<int>(inst.users, -1));
    for (int l = 0; l < L; ++l) {
        int rank = 0;
        for (int i = 0; i < inst.users; ++i)
            if (!d.sections.stores(l, i)) d.zero_rank[l][i] = rank++;
    }

    const bool pinned = opt.uniform_placement;
    const int rows = (pinned ? 0 : 1) + L * zeros_per_section;
    d.lp.num_rows = rows;
    d.lp.rhs.assign(rows, 0.0);
    d.lp.sense.assign(rows, RowSense::Ge);
    if (!pinned) {
        d.lp.rhs[0] = 1.0;
        d.lp.sense[0] = RowSense::Eq;
    } else {
        for (int r = 0; r < rows; ++r) d.lp.rhs[r] = 1.0 / L;
    }

    d.lp.cols.reserve(static_cast<std::size_t>(total_vars) - (pinned ? L : 0));
    if (!pinned) {
        for (int l = 0; l < L; ++l) {
            SparseColumn col;
            col.row.push_back(0);
            col.val.push_back(1.0);
            for (int i = 0; i < inst.users; ++i)
                if (!d.sections.stores(l, i)) {
                    col.row.push_back(d.row_of(l, i));
                    col.val.push_back(-1.0);
                }
            d.lp.cols.push_back(std::move(col));
            d.lp.cost.push_back(0.0);
        }
    }
    for (const auto& combo : d.combos) {
        const double rmin = group_min_rate(inst, combo);
        for_each_mode(combo, d.sections, [&](const ModeMatrix& mode) {
            SparseColumn col;
            col.row.reserve(combo.size());
            col.val.reserve(combo.size());
            for (std::size_t t = 0; t < combo.size(); ++t) {
                const int i = combo[t];
                const int l = mode.row[t];
                const double rate =
                    opt.rate_model == RateModel::PerUser ? inst.rates[i] : rmin;
                col.row.push_back(d.row_of(l, i));
                col.val.push_back(rate);
            }
            std::vector<std::size_t> order(col.row.size());
            for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return col.row[a] < col.row[b]; });
            SparseColumn sorted;
            sorted.row.reserve(order.size());
            sorted.val.reserve(order.size());
            for (std::size_t k : order) {
                sorted.row.push_back(col.row[k]);
                sorted.val.push_back(col.val[k]);
            }
            d.lp.cols.push_back(std::move(sorted));
            d.lp.cost.push_back(1.0);
        });
    }
    return d;
}

struct ScheduleEntry {
    std::vector<int> combo;
    ModeMatrix mode;
    double duration = 0;
};

struct DeliverySolution {
    ProblemInstance instance;
    double total_time = 0;
    std::vector<double> u; // per section, enumeration order
    std::vector<double> q; // per user cached fraction
    std::vector<ScheduleEntry> schedule;
    int nonzero_variables = 0;
    long iterations = 0;
};

// Durations below this are basic-solution dust, not schedule entries.
constexpr double kActiveDuration = 1e-9;

inline std::vector<double> placement_fractions(const SectionSet& sections,
                                               const std::vector<double>& u) {
    std::vector<double> q(sections.users, 0.0);
    for (int l = 0; l < sections.count(); ++l)
        for (int i : sections.support[l]) q[i] += u[l];
    return q;
}

inline DeliverySolution extract_solution(const DeliveryLp& d, const SimplexResult& res) {
    DeliverySolution out;
    out.instance = d.instance;
    out.total_time = res.objective;
    out.iterations = res.iterations;
    const int L = d.sections.count();
    if (d.options.uniform_placement) {
        out.u.assign(L, 1.0 / L);
    } else {
        out.u.assign(res.x.begin(), res.x.begin() + L);
        for (double& v : out.u) v = std::max(v, 0.0);
    }
    out.q = placement_fractions(d.sections, out.u);
    for (std::size_t j = d.num_u_cols(); j < res.x.size(); ++j) {
        if (res.x[j] <= kActiveDuration) continue;
        const auto [ci, ordinal] = d.combo_and_ordinal(j);
        ScheduleEntry e;
        e.combo = d.combos[ci];
        e.mode = mode_from_ordinal(e.combo, d.sections, ordinal);
        e.duration = res.x[j];
        out.schedule.push_back(std::move(e));
    }
    out.nonzero_variables = 0;
    for (double v : res.x)
        if (v > kActiveDuration) ++out.nonzero_variables;
    return out;
}

inline DeliverySolution solve_delivery(const ProblemInstance& inst,
                                       const DeliveryBuildOptions& opt = {},
                                       const SimplexOptions& sopt = {}) {
    const DeliveryLp d = build_delivery_lp(inst, opt);
    const SimplexResult res = solve_lp(d.lp, sopt);
    switch (res.status) {
        case LpStatus::Optimal: return extract_solution(d, res);
        case LpStatus::Infeasible:
            // the covering program is feasible for every valid instance
            throw NumericalError("delivery LP reported infeasible (construction bug)");
        case LpStatus::Unbounded:
            throw NumericalError("delivery LP reported unbounded (construction bug)");
        case LpStatus::IterationLimit:
            throw NumericalError("delivery LP hit the solver iteration limit");
        case LpStatus::Numerical:
            throw NumericalError("delivery LP solve broke down numerically");
    }
    throw NumericalError("delivery LP: unknown solver status");
}

// Explicit placement map: sections own disjoint intervals of the unit file
// in enumeration order; each user caches the intervals of the sections it
// stores.
struct PlacementInterval {
    int section = 0;
    double begin = 0;
    double end = 0;
};

struct PlacementMap {
    std::vector<double> q;
    std::vector<PlacementInterval> intervals; // nonzero sections only
};

inline PlacementMap extract_placement(const SectionSet& sections, const std::vector<double>& u) {
    PlacementMap pm;
    pm.q = placement_fractions(sections, u);
    double at = 0;
    for (int l = 0; l < sections.count(); ++l) {
        if (u[l] <= 0) continue;
        pm.intervals.push_back({l, at, at + u[l]});
        at += u[l];
    }
    return pm;
}

struct VerificationReport {
    bool ok = true;
    std::vector<std::string> issues;

    void fail(std::string msg) {
        ok = false;
        issues.push_back(std::move(msg));
    }
};

// Dense schedule entry as it appears in solution files; the matrix is kept
// verbatim so tampered inputs can be checked literally.
struct DenseScheduleEntry {
    std::vector<int> combo;
    std::vector<std::vector<int>> matrix; // sections x users
    double duration = 0;
};

inline DenseScheduleEntry to_dense_entry(const ScheduleEntry& e, const SectionSet& sections) {
    DenseScheduleEntry de;
    de.combo = e.combo;
    de.duration = e.duration;
    const auto dm = e.mode.to_dense(sections.count(), sections.users);
    de.matrix.assign(dm.size(), {});
    for (std::size_t l = 0; l < dm.size(); ++l)
        de.matrix[l].assign(dm[l].begin(), dm[l].end());
    return de;
}

// Checks that a schedule covers every missing (section, user) amount: sum
// over entries of duration * E[l][i] * rate reaches u_l within 1e-6 (over-
// delivery is legal, shortfalls are not), every matrix passes the mode
// conditions, durations are nonnegative, and the section lengths form a
// valid placement.
inline VerificationReport verify_schedule(const ProblemInstance& inst,
                                          const std::vector<double>& u,
                                          const std::vector<DenseScheduleEntry>& schedule,
                                          RateModel rate_model = RateModel::PerUser) {
    inst.validate();
    const SectionSet sections = enumerate_sections(inst.users, inst.copies);
    const int L = sections.count();
    VerificationReport rep;
    if (static_cast<int>(u.size()) != L) {
        rep.fail("placement lists " + std::to_string(u.size()) + " sections, expected " +
                 std::to_string(L));
        return rep;
    }
    double total_u = 0;
    for (int l = 0; l < L; ++l) {
        if (u[l] < -1e-9) rep.fail("section " + std::to_string(l) + " has negative length");
        total_u += u[l];
    }
    if (std::abs(total_u - 1.0) > 1e-6)
        rep.fail("section lengths sum to " + std::to_string(total_u) + ", expected 1");

    std::vector<std::vector<double>> delivered(L, std::vector<double>(inst.users, 0.0));
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const auto& e = schedule[k];
        if (e.duration < 0) {
            rep.fail("entry " + std::to_string(k) + " has negative duration");
            continue;
        }
        const ModeCheck mc = validate_mode(e.matrix, sections, e.combo);
        if (!mc.ok) {
            rep.fail("entry " + std::to_string(k) + " violates mode condition " + mc.violation);
            continue;
        }
        const double rmin = group_min_rate(inst, e.combo);
        for (int l = 0; l < L; ++l)
            for (int i = 0; i < inst.users; ++i)
                if (e.matrix[l][i] == 1) {
                    const double rate =
                        rate_model == RateModel::PerUser ? inst.rates[i] : rmin;
                    delivered[l][i] += e.duration * rate;
                }
    }
    for (int l = 0; l < L; ++l)
        for (int i = 0; i < inst.users; ++i) {
            if (sections.stores(l, i)) continue;
            const double got = delivered[l][i];
            if (got < u[l] - 1e-6)
                rep.fail("user " + std::to_string(i) + " section " + std::to_string(l) +
                         ": delivered " + std::to_string(got) + ", needs " +
                         std::to_string(u[l]));
        }
    return rep;
}

inline VerificationReport verify_solution(const DeliverySolution& sol,
                                          RateModel rate_model = RateModel::PerUser) {
    const SectionSet sections = enumerate_sections(sol.instance.users, sol.instance.copies);
    std::vector<DenseScheduleEntry> dense;
    dense.reserve(sol.schedule.size());
    for (const auto& e : sol.schedule) dense.push_back(to_dense_entry(e, sections));
    return verify_schedule(sol.instance, sol.u, dense, rate_model);
}

} // namespace ccopt
