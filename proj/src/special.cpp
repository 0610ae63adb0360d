#include "karlin/special.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <stdexcept>

namespace karlin::special {

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("log_gamma: domain error, x must be > 0");
  return std::lgamma(x);
}

double power_tail_sum(double s, std::uint64_t K) {
  if (!(s > 1.0)) throw std::invalid_argument("power_tail_sum: need s > 1");
  if (K < 1) throw std::invalid_argument("power_tail_sum: need K >= 1");
  // Sum directly up to a base index so the Euler–Maclaurin expansion is far
  // into its asymptotic regime, then add the remainder at the base.
  const std::uint64_t base = K < 256 ? 256 : K;
  double direct = 0.0;
  for (std::uint64_t k = base; k > K; --k) direct += std::pow(static_cast<double>(k), -s);
  const double N = static_cast<double>(base);
  // Σ_{k>N} k^{-s} = N^{1-s}/(s-1) - N^{-s}/2 ... with Bernoulli corrections.
  const double n_s = std::pow(N, -s);
  double rem = N * n_s / (s - 1.0) - 0.5 * n_s + s * n_s / (12.0 * N) -
               s * (s + 1.0) * (s + 2.0) * n_s / (720.0 * N * N * N);
  return direct + rem;
}

double riemann_zeta_em(double s) {
  if (!(s > 1.0)) throw std::invalid_argument("riemann_zeta_em: need s > 1");
  double head = 0.0;
  for (std::uint64_t k = 256; k >= 1; --k) head += std::pow(static_cast<double>(k), -s);
  return head + power_tail_sum(s, 256);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("regularized_gamma_q: domain error");
  return boost::math::gamma_q(a, x);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace karlin::special
