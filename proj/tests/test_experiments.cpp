#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "ccopt/experiments.hpp"

using namespace ccopt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Small, fast grid for unit checks; acceptance runs the full-size study.
ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.realizations = 10;
  cfg.bins = 20;
  cfg.alphas = {2.0, 4.0};
  cfg.cache_sizes = {0, 2};
  cfg.edge_snr_db = {0.0, 30.0};
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("scheme names round trip") {
  for (Scheme s : {Scheme::Optimal, Scheme::EqualPower, Scheme::EqualRate})
    CHECK(scheme_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(scheme_from_string("waterfall"), ConfigError);
}

TEST_CASE("position draws are area uniform and reproducible") {
  const auto a = generate_positions(5000, 2.5, 99);
  const auto b = generate_positions(5000, 2.5, 99);
  CHECK(a == b);
  const auto c = generate_positions(5000, 2.5, 100);
  CHECK(a != c);

  // (r / r_max)^2 must be uniform on [0,1): two-sided KS.
  std::vector<double> u(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i] > 0.0);
    REQUIRE(a[i] <= 2.5);
    u[i] = (a[i] / 2.5) * (a[i] / 2.5);
  }
  std::sort(u.begin(), u.end());
  double d = 0.0;
  const double n = static_cast<double>(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    d = std::max(d, (i + 1.0) / n - u[i]);
    d = std::max(d, u[i] - i / n);
  }
  CHECK(d < 0.023);  // 1% critical value at n = 5000

  // Radius scaling is linear.
  const auto scaled = generate_positions(5000, 5.0, 99);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK_THAT(scaled[i], WithinRel(2.0 * a[i], 1e-12));

  // Extra keys move the stream.
  const auto keyed = generate_positions(5000, 2.5, 99, {4, 0});
  CHECK(a != keyed);
  CHECK_THROWS_AS(generate_positions(0, 1.0, 1), ConfigError);
}

TEST_CASE("edge SNR sets the budget") {
  ExperimentConfig cfg;
  cfg.cell_radius = 2.0;
  cfg.noise_power = 3.0;
  // 10 dB, 6 users, alpha 2: budget = 10 * 6 * 3 * 4.
  CHECK_THAT(detail::budget_for_edge_snr(cfg, 6, 2.0, 10.0), WithinRel(720.0, 1e-12));
  // 0 dB leaves just users * noise * r^alpha.
  CHECK_THAT(detail::budget_for_edge_snr(cfg, 4, 3.0, 0.0), WithinRel(96.0, 1e-12));
}

TEST_CASE("accumulator statistics") {
  detail::Accumulator acc;
  for (double v : {1.0, 2.0, 3.0, 4.0}) acc.add(v);
  CHECK_THAT(acc.mean(), WithinAbs(2.5, 1e-12));
  // sample sd = sqrt(5/3), se = sd/2
  CHECK_THAT(acc.stderr_of_mean(), WithinRel(std::sqrt(5.0 / 3.0) / 2.0, 1e-12));
  detail::Accumulator one;
  one.add(5.0);
  CHECK(one.stderr_of_mean() == 0.0);
}

TEST_CASE("grid runs are deterministic and match single points") {
  const ExperimentConfig cfg = small_config();
  const auto records = run_experiments(cfg);
  REQUIRE(records.size() == 2u * 2u * 3u * 2u);  // caches x alphas x schemes x snrs
  const auto again = run_experiments(cfg);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].throughput == again[i].throughput);
    CHECK(records[i].stderr_ == again[i].stderr_);
  }

  // Every record carries full metadata and non-degenerate statistics.
  for (const auto& r : records) {
    CHECK(r.seed == cfg.seed);
    CHECK(r.realizations + r.failures == cfg.realizations);
    CHECK(r.failures == 0);
    CHECK(r.throughput > 0.0);
  }

  // run_point reproduces the grid cell exactly (same draw keying).
  for (const auto& r :
       {records[0], records[records.size() / 2], records[records.size() - 1]}) {
    const ThroughputRecord p = run_point(cfg, r.scheme, r.cache_size, r.alpha, r.edge_snr_db);
    CHECK(p.throughput == r.throughput);
    CHECK(p.stderr_ == r.stderr_);
    CHECK(p.realizations == r.realizations);
  }
}

TEST_CASE("normalization divides by the zero-cache optimal curve") {
  const ExperimentConfig cfg = small_config();
  const auto records = run_experiments(cfg);
  const auto normed = normalize(records);
  REQUIRE(normed.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const auto& n = normed[i];
    if (r.scheme == Scheme::Optimal && r.cache_size == 0) {
      CHECK_THAT(n.throughput, WithinAbs(1.0, 1e-12));
    }
    if (r.throughput > 0) {
      CHECK_THAT(n.stderr_ / n.throughput, WithinRel(r.stderr_ / r.throughput, 1e-9));
    }
  }

  // Records without their reference cell are rejected.
  std::vector<ThroughputRecord> orphan = {records.back()};
  orphan[0].cache_size = 2;
  CHECK_THROWS_AS(normalize(orphan), ConfigError);
}

TEST_CASE("caching pays off at high SNR") {
  // At 30 dB edge SNR the cached system must beat the cache-less one by a
  // clear margin under the optimal allocation (unit-scale smoke version of
  // the full study).
  ExperimentConfig cfg = small_config();
  cfg.realizations = 16;
  cfg.schemes = {Scheme::Optimal};
  cfg.alphas = {4.0};
  cfg.edge_snr_db = {30.0};
  const auto records = run_experiments(cfg);
  REQUIRE(records.size() == 2);
  const auto& m0 = records[0];  // cache 0
  const auto& m2 = records[1];  // cache 2
  REQUIRE(m0.cache_size == 0);
  REQUIRE(m2.cache_size == 2);
  const double se = std::hypot(m0.stderr_, m2.stderr_);
  CHECK(m2.throughput > m0.throughput + 2.0 * se);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg = small_config();
  cfg.realizations = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.bs_antennas = 5;
  cfg.user_antennas = 2;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.alphas.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.cache_sizes = {-1};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
