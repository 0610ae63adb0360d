#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace karlin::stats {

// One-sample Kolmogorov-Smirnov statistic: sup over the sample points of
// |F_emp - F|, evaluated on both sides of each step. The sample must be
// sorted ascending and nonempty.
double ks_statistic(std::span<const double> sorted_sample,
                    const std::function<double(double)>& cdf);

// Two-sample KS statistic; both samples sorted ascending and nonempty.
double two_sample_ks(std::span<const double> sorted_a,
                     std::span<const double> sorted_b);

// Asymptotic Kolmogorov tail Q(t) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 t^2):
// the limiting p-value of sqrt(n) * D (or sqrt(nm/(n+m)) * D two-sample).
double kolmogorov_tail(double t);

// One-sample p-value at sample size n; two-sample at sizes (n, m).
double ks_p_value(double d, std::size_t n);
double ks_p_value_two(double d, std::size_t n, std::size_t m);

// Critical value at significance `level`: D must stay below this to accept.
double ks_threshold(std::size_t n, double level);
double ks_threshold_two(std::size_t n, std::size_t m, double level);

struct ChiSquareResult {
  double statistic;
  std::uint64_t dof;
  double p_value;
};

// Pearson chi-square against expected counts (same length, each expected
// count > 0); dof = bins - 1 (counts are constrained to the common total).
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> expected);

struct MeanResult {
  double mean;
  double stderr_;  // sd / sqrt(n)
};

MeanResult sample_mean(std::span<const double> values);

// Empirical CDF value P(X <= z) of a sorted sample.
double empirical_cdf(std::span<const double> sorted_sample, double z);

}  // namespace karlin::stats
