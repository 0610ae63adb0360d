#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "doctest.h"
#include "karlin/rng.hpp"

namespace {

TEST_CASE("same seed and stream reproduce the identical bit sequence") {
  karlin::RngStream a(42, 7);
  karlin::RngStream b(42, 7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_bits() == b.next_bits());
  }
}

TEST_CASE("distinct stream ids decorrelate immediately") {
  karlin::RngStream a(42, 0);
  karlin::RngStream b(42, 1);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) {
    if (a.next_bits() == b.next_bits()) ++equal;
  }
  CHECK(equal == 0);

  // and distinct seeds too
  karlin::RngStream c(1, 0);
  karlin::RngStream d(2, 0);
  equal = 0;
  for (int i = 0; i < 1000; ++i) {
    if (c.next_bits() == d.next_bits()) ++equal;
  }
  CHECK(equal == 0);
}

TEST_CASE("uniform_open stays strictly inside (0,1) with the right mean") {
  karlin::RngStream rng(3, 0);
  const int n = 200000;
  double sum = 0.0;
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform_open();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    sum += u;
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  // mean 1/2, sd of the mean = 1/sqrt(12 n); allow 5 sigma
  CHECK(std::abs(sum / n - 0.5) < 5.0 / std::sqrt(12.0 * n));
  // with 2e5 draws the extremes should approach the ends
  CHECK(lo < 1e-4);
  CHECK(hi > 1.0 - 1e-4);
}

TEST_CASE("exponential has unit mean and variance") {
  karlin::RngStream rng(5, 1);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = rng.exponential();
    CHECK(e > 0.0);
    sum += e;
    sumsq += e * e;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean - 1.0) < 5.0 / std::sqrt(static_cast<double>(n)));
  // Var of the variance estimator for exp(1) is (kurtosis-rich) ~ 8/n
  CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(8.0 / n));
}

TEST_CASE("URBG interface satisfies the std concept requirements") {
  static_assert(karlin::RngStream::min() == 0);
  static_assert(karlin::RngStream::max() == ~std::uint64_t{0});
  karlin::RngStream rng(9, 2);
  std::vector<int> perm{1, 2, 3, 4, 5, 6, 7, 8};
  std::shuffle(perm.begin(), perm.end(), rng);  // compiles and runs
  std::set<int> seen(perm.begin(), perm.end());
  CHECK(seen.size() == 8);
}

TEST_CASE("hash_uniform_open is a deterministic open-interval map") {
  const double v = karlin::hash_uniform_open(11, 99);
  CHECK(v == karlin::hash_uniform_open(11, 99));
  CHECK(v > 0.0);
  CHECK(v < 1.0);
  CHECK(v != karlin::hash_uniform_open(11, 100));
  CHECK(v != karlin::hash_uniform_open(12, 99));

  // sequential keys should look uniform, not structured
  const int n = 100000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    sum += karlin::hash_uniform_open(123, static_cast<std::uint64_t>(k));
  }
  CHECK(std::abs(sum / n - 0.5) < 5.0 / std::sqrt(12.0 * n));
}

}  // namespace
