#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "ccopt/closed_form.hpp"
#include "ccopt/rng.hpp"

using namespace ccopt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("feasibility cap") {
  const FeasibilityReport ok = feasibility_check({2.0, 2.0, 1.0}, 2);
  CHECK(ok.feasible);
  CHECK_THAT(ok.rate_cap, WithinRel(2.5, 1e-12));
  CHECK(ok.per_user == std::vector<bool>{true, true, true});

  // One user above (sum)/dim.
  const FeasibilityReport bad = feasibility_check({6.0, 2.0, 1.0}, 2);
  CHECK_FALSE(bad.feasible);
  CHECK(bad.per_user == std::vector<bool>{false, true, true});

  // Boundary: a rate exactly at the cap is feasible.
  const FeasibilityReport edge = feasibility_check({2.0, 1.0, 1.0}, 2);
  CHECK(edge.feasible);

  CHECK_THROWS_AS(feasibility_check({}, 1), ConfigError);
  CHECK_THROWS_AS(feasibility_check({1.0, -1.0}, 1), ConfigError);
  CHECK_THROWS_AS(feasibility_check({1.0}, 0), ConfigError);
}

TEST_CASE("balanced solution on the reference instance") {
  const ClosedFormSolution sol = closed_form_solution({2.0, 2.0, 1.0}, 2, 1);
  CHECK_THAT(sol.total_time, WithinAbs(0.4, 1e-12));
  CHECK_THAT(sol.q[0], WithinAbs(0.2, 1e-12));
  CHECK_THAT(sol.q[1], WithinAbs(0.2, 1e-12));
  CHECK_THAT(sol.q[2], WithinAbs(0.6, 1e-12));

  // Degenerate full-cache case.
  const ClosedFormSolution full = closed_form_solution({1.0, 2.0}, 0, 2);
  CHECK(full.total_time == 0.0);
  CHECK(full.q == std::vector<double>{1.0, 1.0});

  CHECK_THROWS_AS(closed_form_solution({6.0, 2.0, 1.0}, 2, 1), InfeasibleError);
  CHECK_THROWS_AS(closed_form_solution({1.0, 1.0}, 1, 2), ConfigError);
}

TEST_CASE("cached fractions account for exactly the undelivered part") {
  Rng rng(808, {0xc1});
  for (int trial = 0; trial < 40; ++trial) {
    const int users = 2 + static_cast<int>(rng.next_u64() % 5);
    const int dim = 1 + static_cast<int>(rng.next_u64() % users);
    const int copies = users - dim;
    std::vector<double> rates(users);
    for (double& r : rates) r = 0.3 + 3.0 * rng.next_double();
    if (!feasibility_check(rates, dim).feasible) continue;
    const ClosedFormSolution sol = closed_form_solution(rates, dim, copies);
    double qsum = 0.0;
    for (int u = 0; u < users; ++u) {
      CHECK_THAT(sol.q[u], WithinAbs(1.0 - sol.total_time * rates[u], 1e-12));
      CHECK(sol.q[u] >= 0.0);
      CHECK(sol.q[u] <= 1.0);
      qsum += sol.q[u];
    }
    // Total cached mass equals the copy budget.
    CHECK_THAT(qsum, WithinAbs(static_cast<double>(copies), 1e-9));
  }
}

TEST_CASE("interval tiling realizes the fractions with uniform coverage") {
  Rng rng(809, {0xc2});
  for (int trial = 0; trial < 40; ++trial) {
    const int users = 2 + static_cast<int>(rng.next_u64() % 5);
    const int copies = 1 + static_cast<int>(rng.next_u64() % (users - 1));
    // Random fractions normalized to sum to `copies`, capped at 1.
    std::vector<double> q(users);
    double sum = 0.0;
    for (double& v : q) {
      v = rng.next_double();
      sum += v;
    }
    bool ok = true;
    for (double& v : q) {
      v *= copies / sum;
      if (v > 1.0) ok = false;
    }
    if (!ok) continue;

    const SectionLayout layout = placement_for_closed_form(q, copies);
    REQUIRE(!layout.segments.empty());
    CHECK(layout.segments.size() <= static_cast<std::size_t>(users) + 1);

    // Segments partition [0,1) in order.
    double at = 0.0;
    std::vector<double> realized(users, 0.0);
    for (const auto& seg : layout.segments) {
      CHECK_THAT(seg.begin, WithinAbs(at, 1e-9));
      CHECK(seg.end > seg.begin);
      // Exactly `copies` users store every segment.
      CHECK(static_cast<int>(seg.stored_at.size()) == copies);
      CHECK(std::is_sorted(seg.stored_at.begin(), seg.stored_at.end()));
      for (int u : seg.stored_at) realized[u] += seg.end - seg.begin;
      at = seg.end;
    }
    CHECK_THAT(at, WithinAbs(1.0, 1e-9));
    for (int u = 0; u < users; ++u) CHECK_THAT(realized[u], WithinAbs(q[u], 1e-7));
  }
}

TEST_CASE("tiling handles degenerate fractions") {
  // A zero fraction and a full fraction at once.
  const SectionLayout layout = placement_for_closed_form({0.0, 1.0, 0.5, 0.5}, 2);
  double at = 0.0;
  std::vector<double> realized(4, 0.0);
  for (const auto& seg : layout.segments) {
    CHECK(static_cast<int>(seg.stored_at.size()) == 2);
    for (int u : seg.stored_at) realized[u] += seg.end - seg.begin;
    at = seg.end;
  }
  CHECK_THAT(at, WithinAbs(1.0, 1e-9));
  CHECK_THAT(realized[0], WithinAbs(0.0, 1e-9));
  CHECK_THAT(realized[1], WithinAbs(1.0, 1e-9));
  CHECK_THAT(realized[2], WithinAbs(0.5, 1e-9));
  CHECK_THAT(realized[3], WithinAbs(0.5, 1e-9));

  CHECK_THROWS_AS(placement_for_closed_form({0.5, 0.6}, 2), ConfigError);
  CHECK_THROWS_AS(placement_for_closed_form({1.5, 0.5}, 2), ConfigError);
}

TEST_CASE("completion time extends the balanced formula") {
  // Feasible profile: agrees with dim / sum(rates).
  CHECK_THAT(completion_time({2.0, 2.0, 1.0}, 1), WithinRel(0.4, 1e-12));
  // All-equal rates, no caching: T = 1/R with every user active throughout.
  CHECK_THAT(completion_time({2.0, 2.0}, 0), WithinRel(0.5, 1e-12));
  // Infeasible profile: the fast user finishes early and drops out.
  // rates (6, 2, 1), copies 1: at T, 3 - 9T = 1 would give T = 2/9 > 1/6, so
  // user 0 saturates; then 2 - 3T = 1 - 1/6*... solve: active {1,2}:
  // (1 - 2T) + (1 - T) = 1 - (1 - 6T)_+ ... direct: sum(1 - T R)_+ = 1.
  {
    const double t = completion_time({6.0, 2.0, 1.0}, 1);
    const double mass = std::max(0.0, 1 - 6 * t) + std::max(0.0, 1 - 2 * t) +
                        std::max(0.0, 1 - t);
    CHECK_THAT(mass, WithinAbs(1.0, 1e-9));
    CHECK(t > 2.0 / 9.0);  // strictly above the balanced value dim/sum
  }
  // Randomized root property.
  Rng rng(810, {0xc3});
  for (int trial = 0; trial < 40; ++trial) {
    const int users = 2 + static_cast<int>(rng.next_u64() % 5);
    const int copies = static_cast<int>(rng.next_u64() % users);
    std::vector<double> rates(users);
    for (double& r : rates) r = 0.1 + 5.0 * rng.next_double();
    const double t = completion_time(rates, copies);
    double mass = 0.0;
    for (double r : rates) mass += std::max(0.0, 1.0 - t * r);
    CHECK_THAT(mass, WithinAbs(static_cast<double>(copies), 1e-9));
  }
  CHECK(completion_time({1.0, 2.0}, 2) == 0.0);
  CHECK_THROWS_AS(completion_time({1.0}, 2), ConfigError);
  CHECK_THROWS_AS(completion_time({0.0}, 0), ConfigError);
}
