#pragma once

#include <cstdint>
#include <vector>

#include "karlin/rng.hpp"

namespace karlin::samplers {

struct SibuyaParam {
  double beta;  // in (0,1)
};

struct ParetoParam {
  double alpha;
  double x_min = 1.0;  // survival (x/x_min)^(-alpha) on [x_min, inf)
};

struct StableParam {
  double beta;  // in (0,1); output Laplace transform exp(-s^beta)
};

// Sibuya pmf beta*Gamma(k-beta) / (Gamma(1-beta)*Gamma(k+1)), in log space.
double sibuya_pmf(double beta, std::uint64_t k);

// ln P(Q > k) for k >= 0; asymptotic gamma-ratio expansion beyond k = 1e5
// where direct lgamma differences lose precision.
double sibuya_log_survival(double beta, std::uint64_t k);

// Sequential-trial sampler using P(Q=k | Q>k-1) = beta/k, switching to exact
// conditional tail inversion past k = 1e4. Values beyond 2^63 saturate
// (probability <= 2^(-63*beta)/Gamma(1-beta)).
std::uint64_t sibuya_sample(const SibuyaParam& param, RngStream& rng);

// Inversion x_min * u^(-1/alpha); u is survival mass.
double pareto_inverse_survival(const ParetoParam& param, double u);
double pareto_sample(const ParetoParam& param, RngStream& rng);

// P(X <= z) = exp(-scale * z^(-alpha)); quantile takes the CDF probability.
double frechet_quantile(double alpha, double scale, double p);
double frechet_sample(double alpha, double scale, RngStream& rng);

// First `count` arrival times of a standard Poisson process (strictly
// increasing cumulative sums of unit exponentials).
std::vector<double> poisson_arrivals(std::size_t count, RngStream& rng);

// N ~ Poisson(lambda).
std::uint64_t poisson_count(double lambda, RngStream& rng);

// Positive beta-stable via Kanter's two-uniform transformation, computed in
// log space. stable_from_uniforms exposes the deterministic core.
double stable_from_uniforms(double beta, double u, double e);
double stable_sample(const StableParam& param, RngStream& rng);

// Test oracle: S as the sum of the jumps of a beta-stable subordinator at
// time 1, jump intensity beta * x^(-beta-1) / Gamma(1-beta) dx truncated at
// jump_floor, with the omitted small-jump mass replaced by its exact mean
// beta * jump_floor^(1-beta) / ((1-beta) * Gamma(1-beta)).
double stable_sample_ppp_sum(const StableParam& param, RngStream& rng,
                             double jump_floor = 1e-5);

// Label law p_k = k^(-1/beta) / zeta(1/beta) on the positive integers.
// Immutable after construction; safe to share across threads read-only.
// Sampling: inversion over a cached prefix CDF (with a guide table) up to
// prefix_cutoff; exact Euler–Maclaurin tail inversion beyond; labels past
// 2^62 are returned as fresh unique tags in [2^62, 2^63) since only label
// identity enters the model (the branch probability itself is exact).
class ZetaLabelLaw {
 public:
  explicit ZetaLabelLaw(double beta, std::uint64_t prefix_cutoff = 1000000);

  double beta() const { return beta_; }
  double exponent() const { return s_; }      // 1/beta
  double normalizer() const { return zeta_; }  // zeta(1/beta)
  std::uint64_t prefix_cutoff() const { return k_max_; }

  double pmf(std::uint64_t k) const;
  double survival(std::uint64_t k) const;  // P(Y > k), k >= 0

  // Sum_{l>k} p_l^a; requires a/beta > 1. Used by tail certificates.
  double tail_power_sum(double a, std::uint64_t k) const;

  // nu(x) = max{k : 1/p_k <= x} = floor((x/zeta)^beta), with an exact
  // boundary check at k and k+1; x below 1/p_1 gives 0.
  std::uint64_t occupancy_count(double x) const;

  std::uint64_t sample(RngStream& rng) const;

  static constexpr std::uint64_t kWideLabelStart = 1ULL << 62;

 private:
  double beta_;
  double s_;
  double zeta_;
  std::uint64_t k_max_;
  double prefix_total_;            // P(Y <= k_max)
  std::vector<double> cum_;        // cum_[i] = P(Y <= i+1)
  std::vector<std::uint32_t> guide_;
};

std::uint64_t zeta_label_sample(const ZetaLabelLaw& law, RngStream& rng);

}  // namespace karlin::samplers
