#pragma once

#include <utility>
#include <vector>

#include "ccopt/delivery.hpp"

namespace ccopt {

// Rate-oblivious comparison scheme: cache a 1/L share of every file at each
// section's user set (uniform placement) and deliver with every active user
// of a group served at the group's minimum rate. Durations are still chosen
// by the LP, so this is the comparison scheme at its best.
inline DeliverySolution min_rate_schedule(const ProblemInstance& inst,
                                          const SimplexOptions& sopt = {}) {
    DeliveryBuildOptions opt;
    opt.rate_model = RateModel::GroupMin;
    opt.uniform_placement = true;
    return solve_delivery(inst, opt, sopt);
}

// Same restriction but with the placement left to the LP. Lower bounds any
// placement the rate-oblivious scheme could use.
inline DeliverySolution min_rate_schedule_free_placement(const ProblemInstance& inst,
                                                         const SimplexOptions& sopt = {}) {
    DeliveryBuildOptions opt;
    opt.rate_model = RateModel::GroupMin;
    opt.uniform_placement = false;
    return solve_delivery(inst, opt, sopt);
}

struct ComparisonReport {
    double t_optimal = 0;
    double t_min_rate = 0;      // uniform placement
    double t_min_rate_free = 0; // placement optimized under the same restriction
    double ratio = 0;           // t_min_rate / t_optimal
    double ratio_free = 0;      // t_min_rate_free / t_optimal
};

// Head-to-head delivery times. The min-rate scheme only restricts the LP
// (rates can drop, never rise; placement pinned), so both ratios are >= 1.
inline ComparisonReport compare(const ProblemInstance& inst, const SimplexOptions& sopt = {}) {
    ComparisonReport rep;
    rep.t_optimal = solve_delivery(inst, {}, sopt).total_time;
    rep.t_min_rate = min_rate_schedule(inst, sopt).total_time;
    rep.t_min_rate_free = min_rate_schedule_free_placement(inst, sopt).total_time;
    rep.ratio = rep.t_min_rate / rep.t_optimal;
    rep.ratio_free = rep.t_min_rate_free / rep.t_optimal;
    return rep;
}

} // namespace ccopt
