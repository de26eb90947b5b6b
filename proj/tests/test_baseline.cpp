#include <catch2/catch_amalgamated.hpp>

#include "ccopt/baseline.hpp"
#include "ccopt/rng.hpp"

using namespace ccopt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ProblemInstance make_instance(int users, int dim, int copies, std::vector<double> rates) {
  ProblemInstance inst;
  inst.users = users;
  inst.dim = dim;
  inst.copies = copies;
  inst.rates = std::move(rates);
  return inst;
}

}  // namespace

TEST_CASE("reference instance comparison") {
  // Three users at rates (2, 2, 1), two spatial dimensions, one copy: the
  // optimized schedule takes 0.4 while the min-rate scheme needs 2/3 under
  // either placement (every group of three moves at rate 1, and all three
  // single-user sections are the same size by symmetry of the restriction).
  const ProblemInstance inst = make_instance(3, 2, 1, {2.0, 2.0, 1.0});
  const ComparisonReport rep = compare(inst);
  CHECK_THAT(rep.t_optimal, WithinAbs(0.4, 1e-9));
  CHECK_THAT(rep.t_min_rate, WithinAbs(2.0 / 3.0, 1e-9));
  CHECK_THAT(rep.t_min_rate_free, WithinAbs(2.0 / 3.0, 1e-9));
  CHECK_THAT(rep.ratio, WithinRel(5.0 / 3.0, 1e-8));
  CHECK_THAT(rep.ratio_free, WithinRel(5.0 / 3.0, 1e-8));
}

TEST_CASE("equal rates neutralize the rate handicap") {
  // With identical link rates GroupMin and PerUser coincide, so only the
  // placement restriction can cost anything; on a symmetric instance the
  // uniform placement is already optimal and the ratio is exactly 1.
  const ProblemInstance inst = make_instance(4, 2, 1, {3.0, 3.0, 3.0, 3.0});
  const ComparisonReport rep = compare(inst);
  CHECK_THAT(rep.ratio, WithinRel(1.0, 1e-8));
  CHECK_THAT(rep.ratio_free, WithinRel(1.0, 1e-8));
}

TEST_CASE("the min-rate scheme never wins") {
  Rng rng(2718, {0xbab});
  for (int trial = 0; trial < 15; ++trial) {
    const int users = 3 + static_cast<int>(rng.next_u64() % 3);
    const int dim = 1 + static_cast<int>(rng.next_u64() % 2);
    const int copies = static_cast<int>(rng.next_u64() % (users - dim + 1));
    std::vector<double> rates(users);
    for (double& r : rates) r = 0.25 + 4.0 * rng.next_double();
    const ComparisonReport rep = compare(make_instance(users, dim, copies, rates));
    CHECK(rep.ratio >= 1.0 - 1e-9);
    CHECK(rep.ratio_free >= 1.0 - 1e-9);
    // The free-placement variant can only improve on the pinned one.
    CHECK(rep.t_min_rate_free <= rep.t_min_rate * (1.0 + 1e-9));
    // And it still cannot beat the unrestricted optimum.
    CHECK(rep.t_min_rate_free >= rep.t_optimal * (1.0 - 1e-9));
  }
}

TEST_CASE("rate spread widens the gap") {
  // The min-rate scheme pays for rate diversity: widening the spread while
  // keeping the sum fixed leaves the optimum at N/sum but slows every group
  // containing the weakest user.
  const double t_narrow = compare(make_instance(3, 2, 1, {2.0, 1.75, 1.25})).ratio;
  const double t_wide = compare(make_instance(3, 2, 1, {3.0, 1.5, 0.5})).ratio;
  CHECK(t_wide > t_narrow);
}
