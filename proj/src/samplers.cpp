#include "karlin/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "karlin/special.hpp"

namespace karlin::samplers {

namespace {

void require_beta(double beta) {
  if (!(beta > 0.0) || !(beta < 1.0)) {
    throw std::invalid_argument("beta must lie in (0,1)");
  }
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

// Switch point between exact lgamma differences and the asymptotic
// gamma-ratio expansion for the Sibuya survival function.
constexpr std::uint64_t kSurvivalAsymptoticFrom = 100000;

// Sequential-trial horizon for sibuya_sample before falling back to
// conditional inversion of the survival function.
constexpr std::uint64_t kSequentialHorizon = 10000;

constexpr std::uint64_t kSibuyaSaturation = 1ULL << 63;

}  // namespace

double sibuya_pmf(double beta, std::uint64_t k) {
  require_beta(beta);
  if (k == 0) throw std::invalid_argument("Sibuya support starts at 1");
  const double kd = static_cast<double>(k);
  // beta * Gamma(k - beta) / (Gamma(1-beta) * Gamma(k+1))
  const double log_pmf = std::log(beta) + special::log_gamma(kd - beta) -
                         special::log_gamma(1.0 - beta) -
                         special::log_gamma(kd + 1.0);
  return std::exp(log_pmf);
}

double sibuya_log_survival(double beta, std::uint64_t k) {
  require_beta(beta);
  if (k == 0) return 0.0;
  const double kd = static_cast<double>(k);
  if (k < kSurvivalAsymptoticFrom) {
    // P(Q > k) = Gamma(k+1-beta) / (Gamma(1-beta) * Gamma(k+1))
    return special::log_gamma(kd + 1.0 - beta) - special::log_gamma(1.0 - beta) -
           special::log_gamma(kd + 1.0);
  }
  // Gamma(k+1-beta)/Gamma(k+1) = k^(-beta) * (1 + c1/k + c2/k^2 + O(k^-3))
  const double c1 = -beta * (1.0 - beta) / 2.0;
  const double c2 = beta * (beta + 1.0) * (1.0 - beta) * (2.0 - 3.0 * beta) / 24.0;
  return -beta * std::log(kd) - special::log_gamma(1.0 - beta) +
         std::log1p(c1 / kd + c2 / (kd * kd));
}

std::uint64_t sibuya_sample(const SibuyaParam& param, RngStream& rng) {
  require_beta(param.beta);
  const double beta = param.beta;
  // P(Q = k | Q > k-1) = beta / k.
  for (std::uint64_t k = 1; k <= kSequentialHorizon; ++k) {
    if (rng.uniform_open() * static_cast<double>(k) <= beta) return k;
  }
  // Conditional inversion: given Q > H, find the smallest k with
  // P(Q > k) <= v * P(Q > H).
  const double log_target =
      std::log(rng.uniform_open()) + sibuya_log_survival(beta, kSequentialHorizon);
  // Leading-order guess from log P(Q > k) ~ -beta ln k - ln Gamma(1-beta).
  const double log_k_guess =
      (-log_target - special::log_gamma(1.0 - beta)) / beta;
  std::uint64_t lo = kSequentialHorizon;  // survival(lo) > target holds
  std::uint64_t hi;
  if (log_k_guess >= 62.0 * std::log(2.0)) {
    hi = kSibuyaSaturation;
  } else {
    hi = std::max<std::uint64_t>(2 * lo, static_cast<std::uint64_t>(
                                             std::exp(log_k_guess) * 2.0));
    hi = std::min(hi, kSibuyaSaturation);
  }
  while (sibuya_log_survival(beta, hi) > log_target) {
    if (hi >= kSibuyaSaturation) return kSibuyaSaturation;  // saturate
    lo = hi;
    hi = (hi > kSibuyaSaturation / 4) ? kSibuyaSaturation : hi * 4;
  }
  while (lo + 1 < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (sibuya_log_survival(beta, mid) <= log_target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double pareto_inverse_survival(const ParetoParam& param, double u) {
  require_positive(param.alpha, "alpha");
  require_positive(param.x_min, "x_min");
  if (!(u > 0.0) || !(u <= 1.0)) {
    throw std::invalid_argument("survival mass must lie in (0,1]");
  }
  return param.x_min * std::pow(u, -1.0 / param.alpha);
}

double pareto_sample(const ParetoParam& param, RngStream& rng) {
  return pareto_inverse_survival(param, rng.uniform_open());
}

double frechet_quantile(double alpha, double scale, double p) {
  require_positive(alpha, "alpha");
  require_positive(scale, "scale");
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("probability must lie in (0,1)");
  }
  // exp(-scale * z^(-alpha)) = p  =>  z = (scale / -ln p)^(1/alpha)
  return std::pow(-scale / std::log(p), 1.0 / alpha);
}

double frechet_sample(double alpha, double scale, RngStream& rng) {
  return frechet_quantile(alpha, scale, rng.uniform_open());
}

std::vector<double> poisson_arrivals(std::size_t count, RngStream& rng) {
  std::vector<double> arrivals(count);
  double t = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    t += rng.exponential();
    arrivals[i] = t;
  }
  return arrivals;
}

std::uint64_t poisson_count(double lambda, RngStream& rng) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be nonnegative and finite");
  }
  if (lambda == 0.0) return 0;
  std::poisson_distribution<std::uint64_t> dist(lambda);
  return dist(rng);
}

double stable_from_uniforms(double beta, double u, double e) {
  require_beta(beta);
  if (!(u > 0.0) || !(u < 1.0) || !(e > 0.0)) {
    throw std::invalid_argument("need u in (0,1) and e > 0");
  }
  // Kanter: S = sin(beta pi u) / sin(pi u)^(1/beta)
  //             * (sin((1-beta) pi u) / e)^((1-beta)/beta),
  // assembled in log space to survive the u -> 0/1 corners.
  const double x = M_PI * u;
  const double log_s = std::log(std::sin(beta * x)) -
                       std::log(std::sin(x)) / beta +
                       (1.0 - beta) / beta *
                           (std::log(std::sin((1.0 - beta) * x)) - std::log(e));
  return std::exp(log_s);
}

double stable_sample(const StableParam& param, RngStream& rng) {
  const double u = rng.uniform_open();
  const double e = rng.exponential();
  return stable_from_uniforms(param.beta, u, e);
}

double stable_sample_ppp_sum(const StableParam& param, RngStream& rng,
                             double jump_floor) {
  require_beta(param.beta);
  require_positive(jump_floor, "jump_floor");
  const double beta = param.beta;
  const double gamma_1mb = std::exp(special::log_gamma(1.0 - beta));
  // Jumps above the floor form a Poisson number with mean
  // jump_floor^(-beta) / Gamma(1-beta), each floor * U^(-1/beta).
  const double mean_jumps = std::pow(jump_floor, -beta) / gamma_1mb;
  const std::uint64_t n_jumps = poisson_count(mean_jumps, rng);
  double sum = 0.0;
  for (std::uint64_t i = 0; i < n_jumps; ++i) {
    sum += jump_floor * std::pow(rng.uniform_open(), -1.0 / beta);
  }
  // Exact mean of the omitted small-jump mass.
  sum += beta * std::pow(jump_floor, 1.0 - beta) / ((1.0 - beta) * gamma_1mb);
  return sum;
}

ZetaLabelLaw::ZetaLabelLaw(double beta, std::uint64_t prefix_cutoff) {
  require_beta(beta);
  if (prefix_cutoff < 1000 || prefix_cutoff > (1ULL << 31)) {
    throw std::invalid_argument("prefix_cutoff out of supported range");
  }
  beta_ = beta;
  s_ = 1.0 / beta;
  k_max_ = prefix_cutoff;

  std::vector<long double> raw(k_max_);
  long double acc = 0.0L;
  for (std::uint64_t k = 1; k <= k_max_; ++k) {
    acc += powl(static_cast<long double>(k), static_cast<long double>(-s_));
    raw[k - 1] = acc;
  }
  const long double tail_raw =
      static_cast<long double>(special::power_tail_sum(s_, k_max_));
  const long double zeta_raw = acc + tail_raw;
  zeta_ = static_cast<double>(zeta_raw);

  // Cross-check the prefix + Euler–Maclaurin normalizer against the
  // library zeta; disagreement means a broken tail formula.
  const double zeta_lib = std::riemann_zeta(s_);
  if (!(std::abs(zeta_ - zeta_lib) <= 1e-8 * zeta_)) {
    throw std::logic_error("zeta normalizer check failed");
  }
  // Consistency of the tail formula across the cached boundary: the
  // remainder past k_max-1 must exceed the remainder past k_max by exactly
  // pmf-mass k_max^(-s).
  const double step = special::power_tail_sum(s_, k_max_ - 1) -
                      special::power_tail_sum(s_, k_max_);
  const double atom = std::pow(static_cast<double>(k_max_), -s_);
  if (!(std::abs(step - atom) <= 1e-9 * atom)) {
    throw std::logic_error("prefix/tail boundary check failed");
  }

  cum_.resize(k_max_);
  for (std::uint64_t k = 0; k < k_max_; ++k) {
    cum_[k] = static_cast<double>(raw[k] / zeta_raw);
  }
  prefix_total_ = cum_.back();
  const double tail_mass = static_cast<double>(tail_raw / zeta_raw);
  if (!(std::abs(prefix_total_ + tail_mass - 1.0) <= 1e-12)) {
    throw std::logic_error("prefix/tail mass does not sum to one");
  }

  const std::size_t guide_size = 4096;
  guide_.resize(guide_size + 1);
  std::size_t pos = 0;
  for (std::size_t j = 0; j <= guide_size; ++j) {
    const double threshold = static_cast<double>(j) / guide_size;
    while (pos < cum_.size() && cum_[pos] < threshold) ++pos;
    guide_[j] = static_cast<std::uint32_t>(pos);
  }
}

double ZetaLabelLaw::pmf(std::uint64_t k) const {
  if (k == 0) throw std::invalid_argument("labels start at 1");
  return std::pow(static_cast<double>(k), -s_) / zeta_;
}

double ZetaLabelLaw::survival(std::uint64_t k) const {
  if (k == 0) return 1.0;
  return special::power_tail_sum(s_, k) / zeta_;
}

double ZetaLabelLaw::tail_power_sum(double a, std::uint64_t k) const {
  if (!(a * s_ > 1.0)) {
    throw std::invalid_argument("tail_power_sum requires a/beta > 1");
  }
  return special::power_tail_sum(a * s_, k) / std::pow(zeta_, a);
}

std::uint64_t ZetaLabelLaw::occupancy_count(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("occupancy threshold must be positive");
  }
  // 1/p_k = zeta * k^s <= x  <=>  k <= (x/zeta)^beta.
  if (x < zeta_) return 0;
  const double guess = std::floor(std::pow(x / zeta_, beta_));
  std::uint64_t k = static_cast<std::uint64_t>(std::max(1.0, guess));
  const long double budget = static_cast<long double>(x);
  const auto fits = [&](std::uint64_t j) {
    return static_cast<long double>(zeta_) *
               powl(static_cast<long double>(j),
                    static_cast<long double>(s_)) <=
           budget;
  };
  while (k > 1 && !fits(k)) --k;
  if (!fits(k)) return 0;
  while (fits(k + 1)) ++k;
  return k;
}

std::uint64_t ZetaLabelLaw::sample(RngStream& rng) const {
  const double u = rng.uniform_open();
  if (u <= prefix_total_) {
    const std::size_t guide_size = guide_.size() - 1;
    std::size_t j = static_cast<std::size_t>(u * guide_size);
    if (j >= guide_size) j = guide_size - 1;
    const auto first = cum_.begin() + guide_[j];
    const auto last = cum_.begin() + std::min<std::size_t>(guide_[j + 1] + 1,
                                                           cum_.size());
    const auto it = std::lower_bound(first, last, u);
    return static_cast<std::uint64_t>(it - cum_.begin()) + 1;
  }
  // Tail inversion: smallest k > k_max with R(k) <= target where
  // R(k) = sum_{l>k} l^(-s) (unnormalized survival).
  const double target = (1.0 - u) * zeta_;
  if (special::power_tail_sum(s_, kWideLabelStart) > target) {
    // Effective label beyond 2^62: only identity matters, so return a
    // fresh tag from [2^62, 2^63). The probability of reaching this
    // branch is exact; collisions are ~2^-62 and harmless.
    return kWideLabelStart | (rng.next_bits() >> 2);
  }
  // R(k) ~ k^(1-s)/(s-1), giving the initial bracket guess.
  const double log_k_guess =
      -std::log((s_ - 1.0) * target) / (s_ - 1.0);
  std::uint64_t lo = k_max_;  // R(lo) > target by the branch condition
  std::uint64_t hi = std::min<std::uint64_t>(
      kWideLabelStart,
      std::max<std::uint64_t>(2 * lo,
                              log_k_guess > 61.0 * std::log(2.0)
                                  ? kWideLabelStart
                                  : static_cast<std::uint64_t>(
                                        std::exp(log_k_guess) * 2.0)));
  while (special::power_tail_sum(s_, hi) > target) {
    lo = hi;
    hi = (hi > kWideLabelStart / 4) ? kWideLabelStart : hi * 4;
  }
  while (lo + 1 < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (special::power_tail_sum(s_, mid) <= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::uint64_t zeta_label_sample(const ZetaLabelLaw& law, RngStream& rng) {
  return law.sample(rng);
}

}  // namespace karlin::samplers
