#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "karlin/geometry.hpp"
#include "karlin/rng.hpp"
#include "karlin/samplers.hpp"

namespace karlin::limit_measures {

enum class RsmKind { kIs, kKarlin, kSignal, kCritical, kNoise };

std::string rsm_kind_name(RsmKind kind);

// Controls the truncation certificate. A realization certifies evaluation
// on boxes whose every side is >= m_min^(1/dim) (for dim 1: measure >=
// m_min); the probability that any omitted atom could change the value on
// such a box is kept <= delta and reported as truncation_bound.
struct TruncationPolicy {
  double m_min = 1e-3;
  double delta = 1e-4;
  std::size_t dim = 1;
  std::uint64_t max_atoms = 10000000;  // safety valve: throw past this
};

// One truncated realization of a random sup-measure: atoms in production
// order (driven by decreasing Gamma_l^(-1/alpha)), each a weight with one
// or more locations. Atoms of very populous clusters are stored as
// full-support markers: their locations are dense enough that every
// certified box contains one up to the certified error, which is folded
// into truncation_bound. Locations are stored flat (dim doubles per point).
class TruncatedRsm {
 public:
  TruncatedRsm(RsmKind kind, std::size_t dim, double m_min);

  RsmKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  double m_min() const { return m_min_; }
  double truncation_bound() const { return truncation_bound_; }
  // CRITICAL only: the single stored stable factor S shared by all atoms.
  double stable_factor() const { return stable_factor_; }
  // NOISE only: partial-sum estimate of the environment moment E eps_Y^q.
  double env_moment() const { return env_moment_; }

  std::size_t atom_count() const { return weights_.size(); }
  double weight(std::size_t i) const { return weights_[i]; }
  bool full_support(std::size_t i) const { return full_[i] != 0; }
  std::size_t location_count(std::size_t i) const {
    return offsets_[i + 1] - offsets_[i];
  }
  std::span<const double> locations(std::size_t i) const {
    return {points_.data() + offsets_[i] * dim_,
            (offsets_[i + 1] - offsets_[i]) * dim_};
  }

  void append_atom(double weight, std::span<const double> points_flat);
  void append_full_support_atom(double weight);
  void add_truncation_error(double p) { truncation_bound_ += p; }
  void set_stable_factor(double s) { stable_factor_ = s; }
  void set_env_moment(double m) { env_moment_ = m; }

 private:
  RsmKind kind_;
  std::size_t dim_;
  double m_min_;
  double truncation_bound_ = 0.0;
  double stable_factor_ = 0.0;
  double env_moment_ = 0.0;
  std::vector<double> weights_;
  std::vector<std::uint64_t> offsets_;  // point-count prefix, size n+1
  std::vector<double> points_;
  std::vector<std::uint8_t> full_;
};

struct RsmEvaluation {
  geometry::Box box;
  double value = 0.0;
};

// Quenched signal environment for the noise-dominance limit: a fixed
// realized map label -> eps (lazily hashed, deterministic in the seed) or a
// constant. Immutable and safe to share across threads.
class SignalEnvironment {
 public:
  static SignalEnvironment pareto(
      std::uint64_t seed, samplers::ParetoParam signal_law,
      std::shared_ptr<const samplers::ZetaLabelLaw> labels);
  static SignalEnvironment constant(
      double value, std::shared_ptr<const samplers::ZetaLabelLaw> labels);

  // Same environment with every eps multiplied by c > 0.
  SignalEnvironment rescaled(double c) const;

  double eps(std::uint64_t label) const;
  const samplers::ZetaLabelLaw& labels() const { return *labels_; }
  std::shared_ptr<const samplers::ZetaLabelLaw> labels_ptr() const {
    return labels_;
  }
  bool is_constant() const { return constant_.has_value(); }
  double signal_alpha() const;  // tail index of eps (inf if constant)
  double scale() const { return scale_; }

  // Sum_{l<=cutoff} p_l eps_l^q, the plug-in moment estimate.
  double moment_partial(double q, std::uint64_t cutoff) const;

  // High-probability upper bound on E eps_Y^q = sum_l p_l eps_l^q for this
  // fixed environment: partial sum plus a remainder bound that fails with
  // probability <= failure_prob (0 for constant environments). Throws if
  // the moment cannot be certified finite (requires q < alpha/beta).
  struct MomentCertificate {
    double upper_bound;
    double failure_prob;
    double exponent;  // the q it certifies
  };
  MomentCertificate certify_moment(double q, double delta,
                                   std::uint64_t cutoff = 10000) const;

  // Returns a copy carrying a precomputed certificate so repeated sampling
  // against the same environment skips the partial-sum work.
  SignalEnvironment with_cached_certificate(double q, double delta,
                                            std::uint64_t cutoff = 10000) const;
  const std::optional<MomentCertificate>& cached_certificate() const {
    return cached_certificate_;
  }

 private:
  SignalEnvironment() = default;

  std::shared_ptr<const samplers::ZetaLabelLaw> labels_;
  samplers::ParetoParam signal_law_{1.0, 1.0};
  std::uint64_t seed_ = 0;
  std::optional<double> constant_;
  double scale_ = 1.0;
  std::optional<MomentCertificate> cached_certificate_;
};

// Independently scattered alpha-Frechet RSM: atoms (Gamma_l^(-1/alpha), U_l).
TruncatedRsm sample_is_rsm(double alpha, const TruncationPolicy& policy,
                           RngStream& rng);

// Karlin RSM: atom l carries weight Gamma_l^(-1/alpha) on Sibuya(beta)-many
// i.i.d. uniform locations.
TruncatedRsm sample_karlin_rsm(double alpha, double beta,
                               const TruncationPolicy& policy, RngStream& rng);

// Signal-dominance limit: per-point weights Gamma_l^(-1/alpha) * Z_{l,i}
// over cluster points, one stored atom per point. Requires
// noise_law.alpha * beta > alpha (finiteness of E Ztilde^alpha), dim 1.
TruncatedRsm sample_signal_limit_rsm(double alpha, double beta,
                                     const samplers::ParetoParam& noise_law,
                                     const TruncationPolicy& policy,
                                     RngStream& rng);

// Critical limit S_beta^(1/alpha') * IS-Frechet: one stable draw S shared
// by all atoms (stored), atoms (S Gamma_l)^... = S^(1/alpha') Gamma_l^(-1/alpha').
TruncatedRsm sample_critical_limit_rsm(double alpha_prime, double beta,
                                       const TruncationPolicy& policy,
                                       RngStream& rng);

// Noise-dominance limit against a fixed environment: atoms
// eps_{Y_l} * Gamma_l^(-1/alpha') with fresh labels Y_l. The certificate
// needs the environment moment E eps_Y^(alpha'+kappa) certified finite;
// practical m_min for this kind is ~0.02 or larger (default policy here is
// the full space). dim 1 only.
TruncatedRsm sample_noise_limit_rsm(double alpha_prime,
                                    const SignalEnvironment& env,
                                    const TruncationPolicy& policy,
                                    RngStream& rng);

// Per-box max over atoms. Boxes must satisfy the realization's certificate
// (each side >= m_min^(1/dim)); violations throw std::domain_error.
std::vector<RsmEvaluation> evaluate(const TruncatedRsm& rsm,
                                    const std::vector<geometry::Box>& boxes);

// JSON export: {kind, dim, m_min, truncation_bound, atoms:[{w, locs:[[..]]}]}.
void write_rsm_json(const TruncatedRsm& rsm, std::ostream& out);

}  // namespace karlin::limit_measures
