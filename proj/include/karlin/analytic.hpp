#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "karlin/samplers.hpp"

namespace karlin::analytic {

// Phase of the model: which of signal and noise drives the extremes.
enum class Regime { kNoiseDominance, kSignalDominance, kCritical };

std::string regime_name(Regime regime);

// Trichotomy on alpha vs alpha_prime * beta. Exactly representable inputs
// (halves, quarters, ...) classify exactly in IEEE arithmetic; otherwise a
// relative tolerance of 1e-12 decides equality.
Regime regime_classify(double alpha, double alpha_prime, double beta,
                       double tol = 1e-12);

// exp(-theta * z^(-alpha)); theta = 0 degenerates to unit mass at 0.
double frechet_cdf(double theta, double alpha, double z);

// Joint limit CDF exp(-(sum_i mu_i * x_i^(-alpha_prime))^beta) on disjoint
// sets of measures mu_i. beta in (0,1]; beta = 1 factorizes.
double logistic_fdd_cdf(const std::vector<double>& mus,
                        const std::vector<double>& xs, double alpha_prime,
                        double beta);

// Tail of the largest of Sibuya(beta)-many i.i.d. noise draws:
// P(Ztilde > x) = min(1, tail_Z(x))^beta.
double ztilde_tail(const samplers::ParetoParam& noise_law, double beta,
                   double x);

// E Ztilde^alpha = x_min^alpha * (1 + alpha/(alpha_prime*beta - alpha));
// finite iff alpha_prime*beta > alpha, else throws std::domain_error.
double ztilde_alpha_moment(const samplers::ParetoParam& noise_law, double beta,
                           double alpha);

// Critical-regime product tail P(eps * Ztilde > x) = x^(-alpha)(1+alpha ln x)
// for standard Pareto signal (x_min = 1) with alpha = alpha_prime * beta.
double product_tail(const samplers::ParetoParam& signal_law,
                    double alpha_prime, double beta, double x);

// Normalizing sequences. kSignalScale solves
//   Gamma(1-beta) * nu(n) * tail_eps(a) = 1          (closed-form inversion),
// kCriticalScale solves
//   Gamma(1-beta) * nu(n) * P(eps Ztilde > b) = 1    (bisection),
// kNoiseScale solves
//   n * tail_Z(c) = 1                                (exact power).
enum class NormalizerKind { kSignalScale, kCriticalScale, kNoiseScale };

struct NormalizerResult {
  double value;
  double residual;  // |defining equation - 1| evaluated at value
  std::uint64_t nu;  // occupancy nu(n) used (0 for kNoiseScale)
};

NormalizerResult solve_normalizer(NormalizerKind kind, std::uint64_t n,
                                  const samplers::ParetoParam& signal_law,
                                  const samplers::ParetoParam& noise_law,
                                  const samplers::ZetaLabelLaw& labels);

}  // namespace karlin::analytic
