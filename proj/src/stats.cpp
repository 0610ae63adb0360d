#include "karlin/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "karlin/special.hpp"

namespace karlin::stats {

namespace {

void require_nonempty(std::span<const double> s, const char* what) {
  if (s.empty()) {
    throw std::invalid_argument(std::string(what) + ": sample is empty");
  }
}

// Inverse of the Kolmogorov tail by bisection (Q is strictly decreasing).
double kolmogorov_tail_inverse(double level) {
  double lo = 1e-8;
  double hi = 4.0;
  while (kolmogorov_tail(hi) > level) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (kolmogorov_tail(mid) > level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double ks_statistic(std::span<const double> sorted_sample,
                    const std::function<double(double)>& cdf) {
  require_nonempty(sorted_sample, "ks_statistic");
  const double n = static_cast<double>(sorted_sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted_sample.size(); ++i) {
    const double f = cdf(sorted_sample[i]);
    const double above = (static_cast<double>(i) + 1.0) / n - f;
    const double below = f - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return d;
}

double two_sample_ks(std::span<const double> sorted_a,
                     std::span<const double> sorted_b) {
  require_nonempty(sorted_a, "two_sample_ks");
  require_nonempty(sorted_b, "two_sample_ks");
  const double na = static_cast<double>(sorted_a.size());
  const double nb = static_cast<double>(sorted_b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < sorted_a.size() && j < sorted_b.size()) {
    const double x = std::min(sorted_a[i], sorted_b[j]);
    while (i < sorted_a.size() && sorted_a[i] <= x) ++i;
    while (j < sorted_b.size() && sorted_b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double kolmogorov_tail(double t) {
  if (t <= 0.0) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_p_value(double d, std::size_t n) {
  return kolmogorov_tail(d * std::sqrt(static_cast<double>(n)));
}

double ks_p_value_two(double d, std::size_t n, std::size_t m) {
  const double eff = static_cast<double>(n) * static_cast<double>(m) /
                     static_cast<double>(n + m);
  return kolmogorov_tail(d * std::sqrt(eff));
}

double ks_threshold(std::size_t n, double level) {
  return kolmogorov_tail_inverse(level) / std::sqrt(static_cast<double>(n));
}

double ks_threshold_two(std::size_t n, std::size_t m, double level) {
  const double eff = static_cast<double>(n) * static_cast<double>(m) /
                     static_cast<double>(n + m);
  return kolmogorov_tail_inverse(level) / std::sqrt(eff);
}

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> expected) {
  if (observed.empty() || observed.size() != expected.size()) {
    throw std::invalid_argument("chi_square_gof: size mismatch or empty");
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(expected[i] > 0.0)) {
      throw std::invalid_argument("chi_square_gof: nonpositive expected count");
    }
    const double diff = static_cast<double>(observed[i]) - expected[i];
    stat += diff * diff / expected[i];
  }
  const std::uint64_t dof = observed.size() - 1;
  const double p = special::regularized_gamma_q(
      0.5 * static_cast<double>(dof), 0.5 * stat);
  return {stat, dof, p};
}

MeanResult sample_mean(std::span<const double> values) {
  require_nonempty(values, "sample_mean");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean, sd / std::sqrt(n)};
}

double empirical_cdf(std::span<const double> sorted_sample, double z) {
  require_nonempty(sorted_sample, "empirical_cdf");
  const auto it =
      std::upper_bound(sorted_sample.begin(), sorted_sample.end(), z);
  return static_cast<double>(it - sorted_sample.begin()) /
         static_cast<double>(sorted_sample.size());
}

}  // namespace karlin::stats
