#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "karlin/process.hpp"
#include "karlin/rng.hpp"

namespace {

using namespace karlin;
using namespace karlin::process;

TEST_CASE("model parameter validation rejects bad exponents") {
  CHECK_THROWS_AS(ModelParams::standard(0.0, 2.0, 0.5).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::standard(1.0, -1.0, 0.5).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::standard(1.0, 2.0, 0.0).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::standard(1.0, 2.0, 1.0).validate(),
                  std::invalid_argument);
  CHECK_NOTHROW(ModelParams::standard(1.0, 2.0, 0.5).validate());
}

TEST_CASE("simulated paths are reproducible and internally consistent") {
  const auto params = ModelParams::standard(1.0, 2.0, 0.5);
  RngStream rng_a(7, 0), rng_b(7, 0);
  const auto a = simulate_path(params, 5000, rng_a);
  const auto b = simulate_path(params, 5000, rng_b);
  REQUIRE(a.n == 5000);
  REQUIRE(a.labels.size() == 5000);
  REQUIRE(a.noise.size() == 5000);
  REQUIRE(a.products.size() == 5000);
  CHECK(a.labels == b.labels);
  CHECK(a.noise == b.noise);
  CHECK(a.products == b.products);

  for (std::size_t i = 0; i < a.n; ++i) {
    CHECK(a.labels[i] >= 1);
    CHECK(a.noise[i] >= params.noise_law.x_min);
    CHECK(a.signal_at(i) >= params.signal_law.x_min);
    // the stored product is exactly signal * noise
    CHECK(a.products[i] == a.signal_at(i) * a.noise[i]);
  }
  // locations are i/n in (0, 1]
  CHECK(a.location(0) == doctest::Approx(1.0 / 5000.0));
  CHECK(a.location(a.n - 1) == 1.0);
}

TEST_CASE("signal values are attached to labels, drawn once, and reused") {
  const auto params = ModelParams::standard(1.0, 2.0, 0.5);
  RngStream rng(11, 0);
  const auto path = simulate_path(params, 20000, rng);

  // every label present in the path has exactly one signal value
  for (std::size_t i = 0; i < path.n; ++i) {
    CHECK(path.signal_values.count(path.labels[i]) == 1);
  }
  // distinct labels are far fewer than n (heavy revisiting), so reuse
  // is actually exercised
  CHECK(path.signal_values.size() < path.n / 10);
}

TEST_CASE("occupancy statistics satisfy the conservation identities") {
  const auto params = ModelParams::standard(1.0, 2.0, 0.5);
  RngStream rng(13, 0);
  const auto path = simulate_path(params, 50000, rng);
  const auto occ = occupancy_stats(path);

  CHECK(occ.distinct_labels == path.signal_values.size());
  CHECK(occ.visits.size() == occ.distinct_labels);

  std::uint64_t sum_counts = 0, sum_weighted = 0;
  for (const auto& [count, j] : occ.count_histogram) {
    sum_counts += j;
    sum_weighted += count * j;
  }
  CHECK(sum_counts == occ.distinct_labels);
  CHECK(sum_weighted == path.n);

  std::uint64_t total_visits = 0;
  for (const auto& [label, v] : occ.visits) {
    CHECK(v >= 1);
    total_visits += v;
  }
  CHECK(total_visits == path.n);
}

TEST_CASE("occupancy grows like the regularly varying count function") {
  // K_n / nu(n) -> Gamma(1 - beta); at beta = 0.5 the limit is sqrt(pi).
  // A single path at n = 4e5 should be within ~15% (slow CLT scale).
  const auto params = ModelParams::standard(1.0, 2.0, 0.5);
  RngStream rng(17, 0);
  const std::uint64_t n = 400000;
  const auto path = simulate_path(params, n, rng);
  const double ratio =
      static_cast<double>(path.signal_values.size()) /
      static_cast<double>(nu(static_cast<double>(n), *params.label_law));
  CHECK(std::abs(ratio - std::sqrt(M_PI)) < 0.15 * std::sqrt(M_PI));
}

TEST_CASE("empirical sup-measure is a max over box members") {
  const auto params = ModelParams::standard(1.0, 2.0, 0.5);
  RngStream rng(19, 0);
  const auto path = simulate_path(params, 10000, rng);

  const std::vector<geometry::Box> boxes{
      geometry::make_box_1d(0.0, 0.5), geometry::make_box_1d(0.5, 1.0),
      geometry::make_box_1d(0.0, 1.0), geometry::make_box_1d(0.25, 0.3)};
  const auto values = empirical_sup_measure(path, boxes);
  REQUIRE(values.size() == 4);

  // partition property: the full-space value is the max of the halves
  CHECK(values[2] == std::max(values[0], values[1]));

  // manual recomputation
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    double manual = 0.0;
    for (std::size_t i = 0; i < path.n; ++i) {
      const double u = path.location(i);
      const std::array<double, 1> pt{u};
      if (boxes[b].contains(pt)) manual = std::max(manual, path.products[i]);
    }
    CHECK(values[b] == manual);
  }
}

TEST_CASE("top locations rank observations by each component") {
  const auto params = ModelParams::standard(1.0, 2.0, 0.5);
  RngStream rng(23, 0);
  const auto path = simulate_path(params, 5000, rng);
  const auto tops = top_locations(path, 5);
  REQUIRE(tops.by_product.size() == 5);
  REQUIRE(tops.by_signal.size() == 5);
  REQUIRE(tops.by_noise.size() == 5);

  double overall = 0.0;
  for (const double x : path.products) overall = std::max(overall, x);
  CHECK(tops.by_product.front().second == overall);

  for (const auto& list : {tops.by_product, tops.by_signal, tops.by_noise}) {
    for (std::size_t k = 0; k < list.size(); ++k) {
      CHECK(list[k].first >= 1);            // 1-based indices
      CHECK(list[k].first <= path.n);
      if (k > 0) CHECK(list[k].second <= list[k - 1].second);
    }
  }
  // the ranked values agree with the path at the reported indices
  for (const auto& [i1, v] : tops.by_product) {
    CHECK(path.products[i1 - 1] == v);
  }
  for (const auto& [i1, v] : tops.by_noise) {
    CHECK(path.noise[i1 - 1] == v);
  }

  CHECK_THROWS_AS(top_locations(path, 0), std::invalid_argument);
  CHECK_THROWS_AS(top_locations(path, path.n + 1), std::invalid_argument);
}

TEST_CASE("path CSV carries one labeled row per observation") {
  const auto params = ModelParams::standard(1.0, 2.0, 0.5);
  RngStream rng(29, 0);
  const auto path = simulate_path(params, 100, rng);
  std::ostringstream out;
  write_path_csv(path, out);
  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "i,label,sigma,z,x");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 100);
}

TEST_CASE("path length limit guards allocation") {
  CHECK(max_path_length() >= 100000000ULL);
  const auto params = ModelParams::standard(1.0, 2.0, 0.5);
  RngStream rng(31, 0);
  CHECK_THROWS_AS(simulate_path(params, max_path_length() + 1, rng),
                  std::length_error);
}

TEST_CASE("the wide-label fallback emits fresh unique tags") {
  // Sampling with beta close to 1 makes the label tail extremely fat
  // (exponent 1/beta near 1), so wide labels appear at a detectable rate.
  const auto params = ModelParams::standard(1.0, 2.0, 0.95);
  RngStream rng(37, 0);
  const auto path = simulate_path(params, 50000, rng);
  std::uint64_t wide = 0;
  for (const auto l : path.labels) {
    if (l >= samplers::ZetaLabelLaw::kWideLabelStart) ++wide;
  }
  // survival beyond the cached prefix at beta=0.95 is ~(1e6)^(-1/19)/zeta:
  // a fraction of a percent of draws; mostly sanity that nothing crashes
  // and products stay finite.
  for (const double x : path.products) CHECK(std::isfinite(x));
  CHECK(wide < path.n);  // trivially true; records the count is well-formed
}

}  // namespace
