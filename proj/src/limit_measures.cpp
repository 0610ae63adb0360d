#include "karlin/limit_measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace karlin::limit_measures {

namespace {

// Cell grid over [0,1]^d used to certify a realized floor: every box whose
// sides are all >= m_min^(1/d) contains at least one full cell (cell side
// <= m_min^(1/d)/2), so the minimum over cells of the best atom weight
// lower-bounds the realization's value on every certified box.
class FloorGrid {
 public:
  FloorGrid(std::size_t dim, double m_min) : dim_(dim) {
    const double side_min = std::pow(m_min, 1.0 / static_cast<double>(dim));
    per_dim_ = static_cast<std::size_t>(std::ceil(2.0 / side_min));
    std::size_t cells = 1;
    for (std::size_t d = 0; d < dim; ++d) cells *= per_dim_;
    best_.assign(cells, 0.0);
    unfilled_ = cells;
  }

  void offer(std::span<const double> point, double weight) {
    std::size_t idx = 0;
    for (std::size_t d = 0; d < dim_; ++d) {
      std::size_t c = static_cast<std::size_t>(point[d] *
                                               static_cast<double>(per_dim_));
      if (c >= per_dim_) c = per_dim_ - 1;
      idx = idx * per_dim_ + c;
    }
    double& slot = best_[idx];
    if (slot == 0.0) --unfilled_;
    if (weight > slot) slot = weight;
  }

  bool filled() const { return unfilled_ == 0; }

  double floor_value() const {
    if (unfilled_ > 0) return 0.0;
    return *std::min_element(best_.begin(), best_.end());
  }

 private:
  std::size_t dim_;
  std::size_t per_dim_;
  std::vector<double> best_;
  std::size_t unfilled_;
};

// Number of locations to keep from one cluster so that a certified box
// misses all of them with probability <= 1e-15.
std::uint64_t keep_count(double m_min) {
  if (m_min >= 1.0) return 1;  // the only certified box is the full space
  const double per_atom_log = -std::log1p(-m_min);  // -ln(1-m_min) > 0
  return static_cast<std::uint64_t>(std::ceil(34.5388 / per_atom_log));
}

double keep_miss_probability(double m_min, std::uint64_t kept) {
  if (m_min >= 1.0) return 0.0;
  return std::exp(static_cast<double>(kept) * std::log1p(-m_min));
}

void require_beta(double beta) {
  if (!(beta > 0.0) || !(beta < 1.0)) {
    throw std::invalid_argument("beta must lie in (0,1)");
  }
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument(std::string(what) + " must be positive");
  }
}

void validate_policy(const TruncationPolicy& policy) {
  if (!(policy.m_min > 0.0) || policy.m_min > 1.0) {
    throw std::invalid_argument("m_min must lie in (0,1]");
  }
  if (!(policy.delta > 0.0) || policy.delta >= 1.0) {
    throw std::invalid_argument("delta must lie in (0,1)");
  }
  if (policy.dim < 1) throw std::invalid_argument("dim must be >= 1");
}

[[noreturn]] void atom_budget_exceeded() {
  throw std::length_error(
      "truncation certificate unreachable within the atom budget; "
      "loosen m_min or delta");
}

// Draws the k largest of q i.i.d. scale*Pareto(alpha) values, descending,
// via the exact order-statistics recursion on uniforms (stable for huge q:
// the running log of the j-th largest uniform is accumulated and mapped
// through expm1).
void top_pareto_descending(double alpha, double scale, std::uint64_t q,
                           std::uint64_t k, RngStream& rng,
                           std::vector<double>& out) {
  out.clear();
  double log_g = 0.0;
  for (std::uint64_t j = 0; j < k; ++j) {
    log_g += std::log(rng.uniform_open()) / static_cast<double>(q - j);
    const double u_min = -std::expm1(log_g);  // (j+1)-th smallest uniform
    out.push_back(scale * std::pow(u_min, -1.0 / alpha));
  }
}

}  // namespace

std::string rsm_kind_name(RsmKind kind) {
  switch (kind) {
    case RsmKind::kIs: return "is";
    case RsmKind::kKarlin: return "karlin";
    case RsmKind::kSignal: return "signal";
    case RsmKind::kCritical: return "critical";
    case RsmKind::kNoise: return "noise";
  }
  throw std::logic_error("unknown RSM kind");
}

TruncatedRsm::TruncatedRsm(RsmKind kind, std::size_t dim, double m_min)
    : kind_(kind), dim_(dim), m_min_(m_min) {
  offsets_.push_back(0);
}

void TruncatedRsm::append_atom(double weight,
                               std::span<const double> points_flat) {
  if (points_flat.empty() || points_flat.size() % dim_ != 0) {
    throw std::invalid_argument("atom needs a positive multiple of dim coords");
  }
  weights_.push_back(weight);
  points_.insert(points_.end(), points_flat.begin(), points_flat.end());
  offsets_.push_back(offsets_.back() + points_flat.size() / dim_);
  full_.push_back(0);
}

void TruncatedRsm::append_full_support_atom(double weight) {
  weights_.push_back(weight);
  offsets_.push_back(offsets_.back());
  full_.push_back(1);
}

SignalEnvironment SignalEnvironment::pareto(
    std::uint64_t seed, samplers::ParetoParam signal_law,
    std::shared_ptr<const samplers::ZetaLabelLaw> labels) {
  require_positive(signal_law.alpha, "alpha");
  require_positive(signal_law.x_min, "x_min");
  if (!labels) throw std::invalid_argument("label law not set");
  SignalEnvironment env;
  env.labels_ = std::move(labels);
  env.signal_law_ = signal_law;
  env.seed_ = seed;
  return env;
}

SignalEnvironment SignalEnvironment::constant(
    double value, std::shared_ptr<const samplers::ZetaLabelLaw> labels) {
  require_positive(value, "value");
  if (!labels) throw std::invalid_argument("label law not set");
  SignalEnvironment env;
  env.labels_ = std::move(labels);
  env.constant_ = value;
  return env;
}

SignalEnvironment SignalEnvironment::rescaled(double c) const {
  require_positive(c, "scale factor");
  SignalEnvironment env = *this;
  env.scale_ *= c;
  env.cached_certificate_.reset();
  return env;
}

double SignalEnvironment::eps(std::uint64_t label) const {
  if (constant_) return scale_ * *constant_;
  const double u = hash_uniform_open(seed_, label);
  return scale_ * signal_law_.x_min * std::pow(u, -1.0 / signal_law_.alpha);
}

double SignalEnvironment::signal_alpha() const {
  return constant_ ? std::numeric_limits<double>::infinity()
                   : signal_law_.alpha;
}

double SignalEnvironment::moment_partial(double q, std::uint64_t cutoff) const {
  long double acc = 0.0L;
  for (std::uint64_t k = 1; k <= cutoff; ++k) {
    acc += static_cast<long double>(labels_->pmf(k)) *
           static_cast<long double>(std::pow(eps(k), q));
  }
  return static_cast<double>(acc);
}

SignalEnvironment::MomentCertificate SignalEnvironment::certify_moment(
    double q, double delta, std::uint64_t cutoff) const {
  require_positive(q, "moment exponent");
  if (!(delta > 0.0) || delta >= 1.0) {
    throw std::invalid_argument("delta must lie in (0,1)");
  }
  if (constant_) {
    const double c = scale_ * *constant_;
    // Exact: eps_Y == c, so E eps_Y^q = c^q with no failure probability.
    return {std::pow(c, q), 0.0, q};
  }
  const double alpha = signal_law_.alpha;
  const double beta = labels_->beta();
  if (!(q * beta < alpha)) {
    throw std::domain_error(
        "environment moment cannot be certified: needs q < alpha/beta");
  }
  const double partial = moment_partial(q, cutoff);
  const double c0 = scale_ * signal_law_.x_min;  // eps = c0 * standard Pareto
  const double a = alpha / q;
  double remainder;
  if (a < 1.0) {
    // Heavy summands: split the remainder at its largest term. With
    // W = standard Pareto^q (tail w^(-a)) and S_a = sum_{l>cutoff} p_l^a,
    //   P(sum_{l>cutoff} p_l W_l > 2t) <= t^(-a) S_a (1 + 1/(1-a)).
    const double s_a = labels_->tail_power_sum(a, cutoff);
    const double t =
        std::pow(s_a * (1.0 + 1.0 / (1.0 - a)) / delta, 1.0 / a);
    remainder = std::pow(c0, q) * 2.0 * t;
  } else {
    // Integrable summands: Markov on the remainder mean
    // E sum_{l>cutoff} p_l eps_l^q = survival(cutoff) * c0^q * alpha/(alpha-q).
    const double mean_rem = labels_->survival(cutoff) * std::pow(c0, q) *
                            (alpha / (alpha - q));
    remainder = mean_rem / delta;
  }
  return {partial + remainder, delta, q};
}

SignalEnvironment SignalEnvironment::with_cached_certificate(
    double q, double delta, std::uint64_t cutoff) const {
  SignalEnvironment env = *this;
  env.cached_certificate_ = certify_moment(q, delta, cutoff);
  return env;
}

TruncatedRsm sample_is_rsm(double alpha, const TruncationPolicy& policy,
                           RngStream& rng) {
  require_positive(alpha, "alpha");
  validate_policy(policy);
  TruncatedRsm rsm(RsmKind::kIs, policy.dim, policy.m_min);
  FloorGrid grid(policy.dim, policy.m_min);
  std::vector<double> point(policy.dim);
  double gamma = 0.0;
  for (std::uint64_t l = 0;; ++l) {
    if (l >= policy.max_atoms) atom_budget_exceeded();
    gamma += rng.exponential();
    const double w = std::pow(gamma, -1.0 / alpha);
    for (std::size_t d = 0; d < policy.dim; ++d) point[d] = rng.uniform_open();
    rsm.append_atom(w, point);
    grid.offer(point, w);
    if (grid.filled() && w <= grid.floor_value()) break;
  }
  return rsm;
}

TruncatedRsm sample_karlin_rsm(double alpha, double beta,
                               const TruncationPolicy& policy,
                               RngStream& rng) {
  require_positive(alpha, "alpha");
  require_beta(beta);
  validate_policy(policy);
  TruncatedRsm rsm(RsmKind::kKarlin, policy.dim, policy.m_min);
  FloorGrid grid(policy.dim, policy.m_min);
  const std::uint64_t kept_max = keep_count(policy.m_min);
  const double miss_p = keep_miss_probability(policy.m_min, kept_max);
  const samplers::SibuyaParam cluster_size{beta};
  std::vector<double> points;
  std::vector<double> point(policy.dim);
  double gamma = 0.0;
  std::uint64_t atoms = 0;
  while (true) {
    if (++atoms > policy.max_atoms) atom_budget_exceeded();
    gamma += rng.exponential();
    const double w = std::pow(gamma, -1.0 / alpha);
    const std::uint64_t q = samplers::sibuya_sample(cluster_size, rng);
    if (q <= kept_max) {
      points.clear();
      for (std::uint64_t i = 0; i < q; ++i) {
        for (std::size_t d = 0; d < policy.dim; ++d) {
          point[d] = rng.uniform_open();
        }
        points.insert(points.end(), point.begin(), point.end());
        grid.offer(point, w);
      }
      rsm.append_atom(w, points);
    } else {
      // Populous cluster: every certified box contains one of its points
      // except with probability <= (1-m_min)^kept_max; store it as
      // full-support and let a kept-size location sample feed the floor
      // (a subset of the true locations, so the floor stays conservative).
      rsm.append_full_support_atom(w);
      rsm.add_truncation_error(miss_p);
      for (std::uint64_t i = 0; i < kept_max; ++i) {
        for (std::size_t d = 0; d < policy.dim; ++d) {
          point[d] = rng.uniform_open();
        }
        grid.offer(point, w);
      }
    }
    if (grid.filled() && w <= grid.floor_value()) break;
  }
  return rsm;
}

TruncatedRsm sample_signal_limit_rsm(double alpha, double beta,
                                     const samplers::ParetoParam& noise_law,
                                     const TruncationPolicy& policy,
                                     RngStream& rng) {
  require_positive(alpha, "alpha");
  require_beta(beta);
  require_positive(noise_law.alpha, "noise alpha");
  validate_policy(policy);
  if (policy.dim != 1) {
    throw std::invalid_argument("signal limit sampler supports dim 1 only");
  }
  if (noise_law.x_min != 1.0) {
    throw std::invalid_argument("signal limit sampler assumes standard Pareto noise");
  }
  const double alpha_prime = noise_law.alpha;
  const double r = alpha_prime * beta / alpha;
  if (!(r > 1.0)) {
    throw std::domain_error(
        "signal limit requires alpha_prime * beta > alpha (E Ztilde^alpha finite)");
  }
  TruncatedRsm rsm(RsmKind::kSignal, 1, policy.m_min);
  FloorGrid grid(1, policy.m_min);
  const std::uint64_t kept_max = keep_count(policy.m_min);
  const double miss_p = keep_miss_probability(policy.m_min, kept_max);
  const samplers::SibuyaParam cluster_size{beta};
  std::vector<double> zs;
  std::uint64_t atoms = 0;

  // Emits one cluster whose noise marks are scale * Pareto(alpha_prime),
  // keeping at most kept_max points (the largest marks, exactly).
  const auto emit_cluster = [&](double weight_base, double scale) {
    const std::uint64_t q = samplers::sibuya_sample(cluster_size, rng);
    const bool capped = q > kept_max;
    const std::uint64_t keep = capped ? kept_max : q;
    if (capped) {
      top_pareto_descending(alpha_prime, scale, q, keep, rng, zs);
      rsm.add_truncation_error(miss_p);
    } else {
      zs.clear();
      for (std::uint64_t i = 0; i < q; ++i) {
        zs.push_back(scale *
                     std::pow(rng.uniform_open(), -1.0 / alpha_prime));
      }
    }
    for (const double z : zs) {
      const double u = rng.uniform_open();
      const double w = weight_base * z;
      rsm.append_atom(w, std::span<const double>(&u, 1));
      grid.offer(std::span<const double>(&u, 1), w);
    }
    atoms += keep;
    if (atoms > policy.max_atoms) atom_budget_exceeded();
  };

  // Phase one: materialize whole clusters until the floor is established
  // and Gamma is past floor^(-alpha) (so every later cluster's exceedance
  // threshold is >= 1 and the thinning identity applies).
  double gamma = 0.0;
  while (true) {
    gamma += rng.exponential();
    emit_cluster(std::pow(gamma, -1.0 / alpha), 1.0);
    if (grid.filled()) {
      const double v = grid.floor_value();
      if (gamma >= std::pow(v, -alpha)) break;
    }
  }

  // Phase two: beyond Gamma_L = g, a cluster at Gamma = x matters only if
  // its largest mark exceeds t(x) = v x^(1/alpha), which happens with
  // probability exactly t(x)^(-alpha_prime*beta) (the Sibuya thinning
  // identity). The mattering clusters therefore form a Poisson process
  // with intensity v^(-alpha_prime*beta) x^(-r) dx on (g, inf); sample it
  // exactly and attach the conditional exceedance clusters (Sibuya-many
  // marks distributed as t(x) * Pareto(alpha_prime)). Dropped clusters and
  // dropped sub-threshold marks cannot alter any certified box, so phase
  // two adds no truncation error beyond the kept_max capping.
  const double v = grid.floor_value();
  const double g = gamma;
  const double mean_clusters =
      std::pow(v, -alpha_prime * beta) * std::pow(g, 1.0 - r) / (r - 1.0);
  const std::uint64_t n_clusters = samplers::poisson_count(mean_clusters, rng);
  std::vector<double> positions(n_clusters);
  for (std::uint64_t j = 0; j < n_clusters; ++j) {
    positions[j] = g * std::pow(rng.uniform_open(), -1.0 / (r - 1.0));
  }
  std::sort(positions.begin(), positions.end());
  for (const double x : positions) {
    emit_cluster(std::pow(x, -1.0 / alpha), v * std::pow(x, 1.0 / alpha));
  }
  return rsm;
}

TruncatedRsm sample_critical_limit_rsm(double alpha_prime, double beta,
                                       const TruncationPolicy& policy,
                                       RngStream& rng) {
  require_positive(alpha_prime, "alpha_prime");
  require_beta(beta);
  validate_policy(policy);
  const double s = samplers::stable_sample({beta}, rng);
  const double factor = std::pow(s, 1.0 / alpha_prime);
  TruncatedRsm rsm(RsmKind::kCritical, policy.dim, policy.m_min);
  rsm.set_stable_factor(s);
  FloorGrid grid(policy.dim, policy.m_min);
  std::vector<double> point(policy.dim);
  double gamma = 0.0;
  for (std::uint64_t l = 0;; ++l) {
    if (l >= policy.max_atoms) atom_budget_exceeded();
    gamma += rng.exponential();
    const double w = factor * std::pow(gamma, -1.0 / alpha_prime);
    for (std::size_t d = 0; d < policy.dim; ++d) point[d] = rng.uniform_open();
    rsm.append_atom(w, point);
    grid.offer(point, w);
    if (grid.filled() && w <= grid.floor_value()) break;
  }
  return rsm;
}

TruncatedRsm sample_noise_limit_rsm(double alpha_prime,
                                    const SignalEnvironment& env,
                                    const TruncationPolicy& policy,
                                    RngStream& rng) {
  require_positive(alpha_prime, "alpha_prime");
  validate_policy(policy);
  if (policy.dim != 1) {
    throw std::invalid_argument("noise limit sampler supports dim 1 only");
  }
  const auto& labels = env.labels();

  // Certificate setup. Constant environments stop deterministically; Pareto
  // environments need a certified moment E eps_Y^(alpha'+kappa) to bound
  // the chance that a future atom beats the realized floor.
  double c_const = 0.0;
  double q_exp = 0.0;
  double kappa = 0.0;
  SignalEnvironment::MomentCertificate cert{0.0, 0.0, 0.0};
  if (env.is_constant()) {
    c_const = env.eps(1);
  } else {
    const double alpha = env.signal_alpha();
    const double beta = labels.beta();
    const double headroom = alpha / beta - alpha_prime;
    if (!(headroom > 0.0)) {
      throw std::domain_error(
          "environment moment not certifiable: needs alpha > alpha_prime*beta");
    }
    kappa = 0.5 * headroom;
    q_exp = alpha_prime + kappa;
    if (env.cached_certificate() &&
        env.cached_certificate()->exponent == q_exp) {
      cert = *env.cached_certificate();
    } else {
      cert = env.certify_moment(q_exp, policy.delta / 4.0);
    }
  }

  TruncatedRsm rsm(RsmKind::kNoise, 1, policy.m_min);
  if (env.is_constant()) {
    // The quenched scale sum_l p_l eps^alpha' collapses to c^alpha'; record
    // it on the artifact since it is exact. Random environments leave the
    // field unset (computing their partial moment is the caller's choice).
    rsm.set_env_moment(std::pow(c_const, alpha_prime));
  }
  FloorGrid grid(1, policy.m_min);
  double gamma = 0.0;
  double bound = 0.0;
  for (std::uint64_t l = 0;; ++l) {
    if (l >= policy.max_atoms) atom_budget_exceeded();
    gamma += rng.exponential();
    const std::uint64_t y = labels.sample(rng);
    const double w = env.eps(y) * std::pow(gamma, -1.0 / alpha_prime);
    const double u = rng.uniform_open();
    rsm.append_atom(w, std::span<const double>(&u, 1));
    grid.offer(std::span<const double>(&u, 1), w);
    if (!grid.filled()) continue;
    const double v = grid.floor_value();
    if (env.is_constant()) {
      // Future atoms are exactly c * Gamma^(-1/alpha'): once that is below
      // the floor, none can matter.
      if (c_const * std::pow(gamma, -1.0 / alpha_prime) <= v) {
        bound = 0.0;
        break;
      }
    } else {
      // Markov: P(eps_Y > t) <= m_q t^(-q). Campbell over the remaining
      // Gamma points gives E[# mattering atoms beyond Gamma_L = g]
      //   <= m_q v^(-q) g^(-kappa/alpha') * (alpha'/kappa),
      // valid once the integrand is below 1 at g.
      const double integrand =
          cert.upper_bound *
          std::pow(v * std::pow(gamma, 1.0 / alpha_prime), -q_exp);
      if (integrand <= 1.0) {
        bound = cert.upper_bound * std::pow(v, -q_exp) *
                std::pow(gamma, -kappa / alpha_prime) * (alpha_prime / kappa);
        if (bound <= policy.delta / 2.0) break;
      }
    }
  }
  rsm.add_truncation_error(bound + cert.failure_prob);
  return rsm;
}

std::vector<RsmEvaluation> evaluate(const TruncatedRsm& rsm,
                                    const std::vector<geometry::Box>& boxes) {
  const double side_min =
      std::pow(rsm.m_min(), 1.0 / static_cast<double>(rsm.dim()));
  std::vector<RsmEvaluation> out;
  out.reserve(boxes.size());
  for (const geometry::Box& box : boxes) {
    geometry::validate_box(box);
    if (box.dim() != rsm.dim()) {
      throw std::invalid_argument("box dimension disagrees with realization");
    }
    for (const geometry::Interval& side : box.sides) {
      if (side.length() < side_min - 1e-12) {
        throw std::domain_error(
            "certificate violation: box side below the certified minimum; "
            "regenerate with smaller m_min");
      }
    }
    double best = 0.0;
    for (std::size_t i = 0; i < rsm.atom_count(); ++i) {
      const double w = rsm.weight(i);
      if (w <= best) continue;
      if (rsm.full_support(i)) {
        best = w;
        continue;
      }
      const auto pts = rsm.locations(i);
      const std::size_t d = rsm.dim();
      for (std::size_t p = 0; p * d < pts.size(); ++p) {
        if (box.contains(pts.subspan(p * d, d))) {
          best = w;
          break;
        }
      }
    }
    out.push_back({box, best});
  }
  return out;
}

void write_rsm_json(const TruncatedRsm& rsm, std::ostream& out) {
  nlohmann::ordered_json j;
  j["kind"] = rsm_kind_name(rsm.kind());
  j["dim"] = rsm.dim();
  j["m_min"] = rsm.m_min();
  j["truncation_bound"] = rsm.truncation_bound();
  if (rsm.kind() == RsmKind::kCritical) {
    j["stable_factor"] = rsm.stable_factor();
  }
  if (rsm.kind() == RsmKind::kNoise && rsm.env_moment() > 0.0) {
    j["env_moment"] = rsm.env_moment();
  }
  nlohmann::ordered_json atoms = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < rsm.atom_count(); ++i) {
    nlohmann::ordered_json atom;
    atom["w"] = rsm.weight(i);
    nlohmann::ordered_json locs = nlohmann::ordered_json::array();
    if (rsm.full_support(i)) {
      atom["full_support"] = true;
    } else {
      const auto pts = rsm.locations(i);
      const std::size_t d = rsm.dim();
      for (std::size_t p = 0; p * d < pts.size(); ++p) {
        nlohmann::ordered_json coord = nlohmann::ordered_json::array();
        for (std::size_t k = 0; k < d; ++k) coord.push_back(pts[p * d + k]);
        locs.push_back(std::move(coord));
      }
    }
    atom["locs"] = std::move(locs);
    atoms.push_back(std::move(atom));
  }
  j["atoms"] = std::move(atoms);
  out << j.dump(2) << '\n';
}

}  // namespace karlin::limit_measures
