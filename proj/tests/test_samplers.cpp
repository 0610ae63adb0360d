#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "doctest.h"
#include "karlin/rng.hpp"
#include "karlin/samplers.hpp"
#include "karlin/special.hpp"
#include "karlin/stats.hpp"

namespace {

using namespace karlin;
using namespace karlin::samplers;

std::vector<double> sorted_draws(int n, const std::function<double(RngStream&)>& f,
                                 std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::vector<double> v(n);
  for (auto& x : v) x = f(rng);
  std::sort(v.begin(), v.end());
  return v;
}

TEST_CASE("sibuya pmf has the exact falling-factorial form") {
  for (double beta : {0.3, 0.5, 0.8}) {
    CHECK(sibuya_pmf(beta, 1) == doctest::Approx(beta).epsilon(1e-13));
    CHECK(sibuya_pmf(beta, 2) ==
          doctest::Approx(beta * (1.0 - beta) / 2.0).epsilon(1e-13));
    CHECK(sibuya_pmf(beta, 3) ==
          doctest::Approx(beta * (1.0 - beta) * (2.0 - beta) / 6.0)
              .epsilon(1e-13));
    // product form of the survival: P(Q > k) = prod_{j<=k} (1 - beta/j)
    double prod = 1.0;
    for (std::uint64_t k = 1; k <= 1000; ++k) {
      prod *= 1.0 - beta / static_cast<double>(k);
      CHECK(std::exp(sibuya_log_survival(beta, k)) ==
            doctest::Approx(prod).epsilon(1e-11));
    }
  }
}

TEST_CASE("sibuya pmf and survival are mutually consistent") {
  for (double beta : {0.3, 0.8}) {
    for (std::uint64_t k : {std::uint64_t{1}, std::uint64_t{7},
                            std::uint64_t{999}, std::uint64_t{12345}}) {
      const double drop = std::exp(sibuya_log_survival(beta, k - 1)) -
                          std::exp(sibuya_log_survival(beta, k));
      CHECK(drop == doctest::Approx(sibuya_pmf(beta, k)).epsilon(1e-10));
    }
  }
}

TEST_CASE("sibuya log-survival is smooth across the asymptotic switchover") {
  for (double beta : {0.3, 0.5, 0.8}) {
    double prev = sibuya_log_survival(beta, 99990);
    for (std::uint64_t k = 99991; k <= 100010; ++k) {
      const double cur = sibuya_log_survival(beta, k);
      CHECK(cur < prev);  // strictly decreasing
      // steps are O(beta/k)
      CHECK(prev - cur < 2.0 * beta / 99990.0);
      prev = cur;
    }
  }
}

TEST_CASE("sibuya sampler matches the pmf (chi-square)") {
  const double beta = 0.5;
  const int n_bins = 20;  // counts 1..20, then the tail
  std::vector<double> expected(n_bins + 1, 0.0);
  for (int k = 1; k <= n_bins; ++k) expected[k - 1] = sibuya_pmf(beta, k);
  expected[n_bins] = std::exp(sibuya_log_survival(beta, n_bins));

  const int draws = 100000;
  RngStream rng(17, 0);
  std::vector<std::uint64_t> observed(n_bins + 1, 0);
  for (int i = 0; i < draws; ++i) {
    const std::uint64_t q = sibuya_sample({beta}, rng);
    CHECK(q >= 1);
    ++observed[std::min<std::uint64_t>(q, n_bins + 1) - 1];
  }
  for (auto& e : expected) e *= draws;
  const auto res = stats::chi_square_gof(observed, expected);
  CHECK(res.dof == n_bins);
  CHECK(res.p_value > 1e-4);
}

TEST_CASE("pareto inversion is exact and the sampler matches its CDF") {
  const ParetoParam law{2.5, 3.0};
  CHECK(pareto_inverse_survival(law, 1.0) == doctest::Approx(3.0));
  CHECK(pareto_inverse_survival(law, 0.25) ==
        doctest::Approx(3.0 * std::pow(0.25, -1.0 / 2.5)).epsilon(1e-15));

  const auto sample = sorted_draws(
      20000, [&](RngStream& r) { return pareto_sample(law, r); }, 21);
  CHECK(sample.front() >= 3.0);
  const double d = stats::ks_statistic(sample, [&](double x) {
    return x < law.x_min ? 0.0 : 1.0 - std::pow(x / law.x_min, -law.alpha);
  });
  CHECK(stats::ks_p_value(d, sample.size()) > 1e-3);
}

TEST_CASE("frechet quantile and sampler agree with the CDF") {
  const double alpha = 1.5, scale = 2.0;
  for (double p : {0.1, 0.5, 0.9}) {
    const double q = frechet_quantile(alpha, scale, p);
    CHECK(std::exp(-scale * std::pow(q, -alpha)) ==
          doctest::Approx(p).epsilon(1e-12));
  }
  const auto sample = sorted_draws(
      20000, [&](RngStream& r) { return frechet_sample(alpha, scale, r); },
      22);
  const double d = stats::ks_statistic(sample, [&](double z) {
    return z <= 0.0 ? 0.0 : std::exp(-scale * std::pow(z, -alpha));
  });
  CHECK(stats::ks_p_value(d, sample.size()) > 1e-3);
}

TEST_CASE("poisson arrivals are increasing with unit mean spacing") {
  RngStream rng(23, 0);
  const auto t = poisson_arrivals(50000, rng);
  REQUIRE(t.size() == 50000);
  CHECK(t.front() > 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] > t[i - 1]);
  // t_n / n -> 1
  CHECK(t.back() / 50000.0 == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("poisson_count has the right mean, variance, and zero mass") {
  RngStream rng(29, 0);
  const double lambda = 0.7;
  int zeros = 0;
  const int reps = 100000;
  for (int i = 0; i < reps; ++i) {
    if (poisson_count(lambda, rng) == 0) ++zeros;
  }
  const double p0 = std::exp(-lambda);
  CHECK(std::abs(zeros / static_cast<double>(reps) - p0) <
        5.0 * std::sqrt(p0 * (1 - p0) / reps));

  double sum = 0.0, sumsq = 0.0;
  const int reps2 = 20000;
  for (int i = 0; i < reps2; ++i) {
    const double n = static_cast<double>(poisson_count(100.0, rng));
    sum += n;
    sumsq += n * n;
  }
  const double mean = sum / reps2;
  const double var = sumsq / reps2 - mean * mean;
  CHECK(std::abs(mean - 100.0) < 5.0 * std::sqrt(100.0 / reps2));
  CHECK(std::abs(var - 100.0) / 100.0 < 0.1);
}

TEST_CASE("positive stable at index 1/2 matches the exact closed-form law") {
  // With Laplace transform exp(-sqrt(s)) the half-stable law has CDF
  // erfc(1/(2 sqrt(x))): an oracle independent of the sampler's algebra.
  const auto cdf = [](double x) {
    return x <= 0.0 ? 0.0 : std::erfc(1.0 / (2.0 * std::sqrt(x)));
  };
  const auto direct = sorted_draws(
      20000, [](RngStream& r) { return stable_sample({0.5}, r); }, 31);
  CHECK(stats::ks_p_value(stats::ks_statistic(direct, cdf), direct.size()) >
        1e-3);

  // The jump-sum oracle must land on the same law.
  const auto summed = sorted_draws(
      5000, [](RngStream& r) { return stable_sample_ppp_sum({0.5}, r); }, 32);
  CHECK(stats::ks_p_value(stats::ks_statistic(summed, cdf), summed.size()) >
        1e-3);
}

TEST_CASE("stable sampler satisfies its Laplace transform") {
  for (double beta : {0.3, 0.8}) {
    RngStream rng(37, 0);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    const double s = 1.0;
    for (int i = 0; i < n; ++i) {
      const double v = std::exp(-s * stable_sample({beta}, rng));
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / n;
    const double se =
        std::sqrt((sumsq / n - mean * mean) / static_cast<double>(n - 1));
    CHECK(std::abs(mean - std::exp(-std::pow(s, beta))) < 5.0 * se);
  }
}

TEST_CASE("stable_from_uniforms is the deterministic core of the sampler") {
  const double v1 = stable_from_uniforms(0.7, 0.3, 1.2);
  CHECK(v1 == stable_from_uniforms(0.7, 0.3, 1.2));
  CHECK(v1 > 0.0);
  CHECK(std::isfinite(v1));
  // extreme inputs stay finite and positive
  CHECK(stable_from_uniforms(0.5, 1e-12, 1e-9) > 0.0);
  CHECK(std::isfinite(stable_from_uniforms(0.9, 1.0 - 1e-12, 20.0)));
}

TEST_CASE("zeta label law pmf, survival, and tail sums are consistent") {
  const double beta = 0.5;
  const ZetaLabelLaw law(beta);
  CHECK(law.exponent() == doctest::Approx(2.0));
  CHECK(law.normalizer() ==
        doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-12));
  CHECK(law.pmf(1) ==
        doctest::Approx(6.0 / (M_PI * M_PI)).epsilon(1e-12));
  CHECK(law.pmf(3) ==
        doctest::Approx(std::pow(3.0, -2.0) / (M_PI * M_PI / 6.0))
            .epsilon(1e-12));
  CHECK(law.survival(0) == doctest::Approx(1.0).epsilon(1e-13));
  for (std::uint64_t k : {std::uint64_t{1}, std::uint64_t{50},
                          std::uint64_t{99999}, std::uint64_t{2000000}}) {
    CHECK(law.survival(k - 1) - law.survival(k) ==
          doctest::Approx(law.pmf(k)).epsilon(1e-9));
  }
  // tail of pmf powers: sum_{l>k} p_l^a = power_tail_sum(a/beta, k)/zeta^a
  for (double a : {1.0, 1.5}) {
    for (std::uint64_t k : {std::uint64_t{10}, std::uint64_t{100000}}) {
      CHECK(law.tail_power_sum(a, k) ==
            doctest::Approx(special::power_tail_sum(a / beta, k) /
                            std::pow(law.normalizer(), a))
                .epsilon(1e-11));
    }
  }
}

TEST_CASE("occupancy count inverts the pmf at exact boundaries") {
  const ZetaLabelLaw law(0.5);
  const double zeta = law.normalizer();
  // 1/p_k = k^2 * zeta; just above that boundary the count includes k,
  // just below it does not. (The exact tie depends on the rounding of the
  // double product, so probe with a margin well above representation error
  // and well below the 2/k gap to the next boundary.)
  for (std::uint64_t k : {std::uint64_t{1}, std::uint64_t{5},
                          std::uint64_t{1000}}) {
    const double x = static_cast<double>(k) * static_cast<double>(k) * zeta;
    CHECK(law.occupancy_count(x * (1.0 + 1e-12)) == k);
    CHECK(law.occupancy_count(x * 0.999) == k - 1);
  }
  CHECK(law.occupancy_count(0.5) == 0);
  CHECK(law.occupancy_count(1000.0) == 24);  // floor(sqrt(1000/zeta(2)))
  // monotone in x
  std::uint64_t prev = 0;
  for (double x = 1.0; x < 1e6; x *= 1.7) {
    const std::uint64_t cur = law.occupancy_count(x);
    CHECK(cur >= prev);
    prev = cur;
  }
}

TEST_CASE("zeta label sampler matches its pmf (chi-square)") {
  const ZetaLabelLaw law(0.5);
  const int n_bins = 12;
  std::vector<double> expected(n_bins + 1, 0.0);
  for (int k = 1; k <= n_bins; ++k) expected[k - 1] = law.pmf(k);
  expected[n_bins] = law.survival(n_bins);

  RngStream rng(41, 0);
  const int draws = 200000;
  std::vector<std::uint64_t> observed(n_bins + 1, 0);
  for (int i = 0; i < draws; ++i) {
    const std::uint64_t y = law.sample(rng);
    CHECK(y >= 1);
    ++observed[std::min<std::uint64_t>(y, n_bins + 1) - 1];
  }
  for (auto& e : expected) e *= draws;
  const auto res = stats::chi_square_gof(observed, expected);
  CHECK(res.p_value > 1e-4);
}

TEST_CASE("zeta label sampler reaches deep tail labels consistently") {
  // With beta = 0.8 the exponent is 1.25 and the tail is fat enough that
  // labels beyond the cached prefix occur at a few percent rate; verify the
  // exact tail inversion by comparing the empirical exceedance rate of the
  // prefix cutoff against the analytic survival.
  const ZetaLabelLaw law(0.8, 10000);
  RngStream rng(43, 0);
  const int draws = 200000;
  const std::uint64_t cut = law.prefix_cutoff();
  int beyond = 0;
  for (int i = 0; i < draws; ++i) {
    if (law.sample(rng) > cut) ++beyond;
  }
  const double p = law.survival(cut);
  CHECK(std::abs(beyond / static_cast<double>(draws) - p) <
        5.0 * std::sqrt(p * (1 - p) / draws));
}

}  // namespace
