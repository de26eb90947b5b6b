#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ccopt/channel.hpp"
#include "support/oracles.hpp"

using namespace ccopt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

NetworkScenario base_scenario(int users, int tx, int bins, std::uint64_t seed) {
  NetworkScenario sc;
  sc.users = users;
  sc.bs_antennas = tx;
  sc.user_antennas = 1;
  sc.bins = bins;
  sc.noise_power = 1.0;
  sc.total_power = 1.0;
  sc.pathloss_exp = 3.0;
  sc.distances.assign(users, 1.0);
  sc.seed = seed;
  return sc;
}

}  // namespace

TEST_CASE("scenario validation rejects malformed inputs") {
  NetworkScenario sc = base_scenario(3, 4, 8, 1);
  CHECK_NOTHROW(sc.validate());
  CHECK(sc.mux_dim() == 4);

  NetworkScenario bad = sc;
  bad.users = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = sc;
  bad.user_antennas = 3;  // 4 % 3 != 0
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = sc;
  bad.distances = {1.0, 2.0};  // wrong length
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = sc;
  bad.distances.clear();  // no cell radius either
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = sc;
  bad.noise_power = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("fading draws are reproducible and order independent") {
  NetworkScenario sc = base_scenario(3, 4, 5, 42);
  const FadingRealization a = sample_fading(sc);
  const FadingRealization b = sample_fading(sc);
  REQUIRE(a.mats.size() == 15);
  for (int u = 0; u < 3; ++u)
    for (int m = 0; m < 5; ++m) REQUIRE(a.at(u, m) == b.at(u, m));

  sc.seed = 43;
  const FadingRealization c = sample_fading(sc);
  CHECK(a.at(0, 0) != c.at(0, 0));
  CHECK(a.at(0, 0) != a.at(0, 1));
  CHECK(a.at(0, 0) != a.at(1, 0));

  // Unit average power per entry.
  NetworkScenario wide = base_scenario(1, 4, 20000, 7);
  const FadingRealization f = sample_fading(wide);
  double p = 0.0;
  for (int m = 0; m < wide.bins; ++m) p += f.at(0, m).squaredNorm();
  p /= wide.bins * 4.0;
  CHECK_THAT(p, WithinAbs(1.0, 0.02));
}

TEST_CASE("zero-forcing projector invariants") {
  NetworkScenario sc = base_scenario(4, 4, 3, 5);
  const FadingRealization f = sample_fading(sc);
  const std::vector<Eigen::MatrixXcd> null3 = {f.at(1, 0), f.at(2, 0), f.at(3, 0)};
  const ZfProjector proj = zf_projector(null3, 4);

  CHECK(proj.rank == 1);
  // Idempotent and Hermitian.
  CHECK((proj.p * proj.p - proj.p).norm() < 1e-12);
  CHECK((proj.p - proj.p.adjoint()).norm() < 1e-12);
  // Annihilates the nulled channels.
  for (const auto& h : null3) CHECK((h * proj.p).norm() < 1e-10 * h.norm());
  // Never amplifies.
  const Eigen::MatrixXcd g = f.at(0, 0);
  CHECK((g * proj.p).norm() <= g.norm() * (1.0 + 1e-12));
  CHECK(effective_gain_scalar(g, proj) >= 0.0);
  CHECK(effective_gain_scalar(g, proj) <= g.squaredNorm() * (1.0 + 1e-12));

  // Empty null set: identity, full rank.
  const ZfProjector id = zf_projector({}, 4);
  CHECK(id.rank == 4);
  CHECK((id.p - Eigen::MatrixXcd::Identity(4, 4)).norm() == 0.0);
  CHECK_THAT(effective_gain_scalar(g, id), WithinRel(g.squaredNorm(), 1e-12));

  // Too many rows to null.
  std::vector<Eigen::MatrixXcd> four(4, f.at(1, 0));
  CHECK_THROWS_AS(zf_projector(four, 4), ConfigError);
  // Rank-deficient null set is flagged rather than silently absorbed.
  std::vector<Eigen::MatrixXcd> dup = {f.at(1, 0), f.at(1, 0)};
  CHECK_THROWS_AS(zf_projector(dup, 4), NumericalError);
}

TEST_CASE("projected gain of a rank-one residual subspace is Exp(1)") {
  // With 4 transmit antennas and 3 nulled single-antenna users, the residual
  // subspace has dimension 1 and the projected power of an independent
  // CN(0, I) channel is a unit exponential.
  NetworkScenario sc = base_scenario(4, 4, 20000, 11);
  const FadingRealization f = sample_fading(sc);
  std::vector<double> samples;
  samples.reserve(sc.bins);
  for (int m = 0; m < sc.bins; ++m) {
    const ZfProjector proj = zf_projector({f.at(1, m), f.at(2, m), f.at(3, m)}, 4);
    samples.push_back(effective_gain_scalar(f.at(0, m), proj));
  }
  const double d = oracles::ks_statistic_exp1(samples);
  // KS 1% critical value at n = 2e4 is about 0.0115.
  CHECK(d < 0.0115);
}

TEST_CASE("monte carlo rate agrees with the fading-averaged closed form") {
  const int bins = 10000;
  NetworkScenario sc = base_scenario(4, 4, bins, 21);
  const FadingRealization f = sample_fading(sc);
  const std::vector<double> flat(bins, 1.0);
  const std::vector<int> others = {1, 2, 3};

  for (double eta : {0.1, 1.0, 10.0}) {
    const double mc = user_rate_mc(sc, f, 0, eta, flat, others);
    const double cf = user_rate_closed_form(eta, bins, sc.symbol_rate);
    // Monte Carlo standard error of the per-bin rate, from quadrature moments.
    const double mean = oracles::expected_log2_rate(eta);
    const double second = oracles::integrate(
        [eta](double x) {
          const double l = std::log2(1.0 + eta * x);
          return l * l * std::exp(-x);
        },
        0.0, 60.0, 1e-13);
    const double se_total = std::sqrt((second - mean * mean) * bins);
    CHECK(std::abs(mc - cf) < 3.0 * se_total);
  }
}

TEST_CASE("per-bin rate composition matches scalar gains") {
  NetworkScenario sc = base_scenario(3, 4, 6, 9);
  const FadingRealization f = sample_fading(sc);
  sc.distances = {2.0, 1.0, 0.5};
  std::vector<double> intra = {0.5, 1.5, 2.0, 0.0, 1.0, 1.0};
  const double power = 3.0;
  const std::vector<int> others = {1, 2};
  const double got = user_rate_mc(sc, f, 0, power, intra, others);

  const double scale = power * std::pow(2.0, -sc.pathloss_exp) / sc.noise_power;
  double expect = 0.0;
  for (int m = 0; m < sc.bins; ++m) {
    const ZfProjector proj = zf_projector({f.at(1, m), f.at(2, m)}, 4);
    const double gain = effective_gain_scalar(f.at(0, m), proj);
    expect += std::log2(1.0 + scale * intra[static_cast<std::size_t>(m)] * gain);
  }
  CHECK_THAT(got, WithinRel(expect * sc.symbol_rate, 1e-12));

  // Rate validation errors.
  CHECK_THROWS_AS(user_rate_mc(sc, f, 0, power, {1.0}, others), ConfigError);
  CHECK_THROWS_AS(user_rate_mc(sc, f, 0, power, intra, {0}), ConfigError);
  std::vector<double> off = intra;
  off[0] += 0.5;  // mean no longer 1
  CHECK_THROWS_AS(user_rate_mc(sc, f, 0, power, off, others), ConfigError);
}

TEST_CASE("closed-form rate scales linearly in bandwidth and symbol rate") {
  const double r1 = user_rate_closed_form(1.0, 1, 1.0);
  CHECK_THAT(r1, WithinRel(0.86034738227088595, 1e-11));
  CHECK_THAT(user_rate_closed_form(1.0, 100, 1.0), WithinRel(100.0 * r1, 1e-12));
  CHECK_THAT(user_rate_closed_form(1.0, 7, 2.5), WithinRel(17.5 * r1, 1e-12));
  CHECK_THAT(user_rate_closed_form(0.1, 1, 1.0), WithinRel(0.13209796780219238, 1e-11));
  CHECK_THAT(user_rate_closed_form(10.0, 1, 1.0), WithinRel(2.906514808414805, 1e-11));
  CHECK(user_rate_closed_form(1e-8, 1, 1.0) > 0.0);  // scaled form avoids overflow
  CHECK_THROWS_AS(user_rate_closed_form(0.0, 1, 1.0), ConfigError);
}
