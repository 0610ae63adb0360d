#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <unordered_map>
#include <utility>
#include <vector>

#include "karlin/geometry.hpp"
#include "karlin/rng.hpp"
#include "karlin/samplers.hpp"

namespace karlin::process {

// Full parameterization of the perturbed model X_i = eps_{Y_i} * Z_i:
// heavy-tailed signal eps attached to labels Y drawn from the zeta law,
// i.i.d. multiplicative noise Z. The label law is shared read-only across
// replications (it caches a large prefix CDF).
struct ModelParams {
  double alpha;        // signal tail exponent
  double alpha_prime;  // noise tail exponent
  double beta;         // label-law memory parameter, in (0,1)
  samplers::ParetoParam signal_law;
  samplers::ParetoParam noise_law;
  std::shared_ptr<const samplers::ZetaLabelLaw> label_law;

  // Standard-Pareto laws (x_min = 1) with the given exponents.
  static ModelParams standard(double alpha, double alpha_prime, double beta);

  void validate() const;
};

// One simulated path. Observation i (1-based) sits at location i/n in (0,1].
// signal_values holds one entry per distinct visited label: the attached
// eps is drawn on first visit and reused on every revisit.
struct LabeledPath {
  std::uint64_t n = 0;
  std::vector<std::uint64_t> labels;
  std::unordered_map<std::uint64_t, double> signal_values;
  std::vector<double> noise;
  std::vector<double> products;  // products[i] = signal_values[labels[i]] * noise[i]

  double location(std::size_t index0) const {
    return static_cast<double>(index0 + 1) / static_cast<double>(n);
  }
  double signal_at(std::size_t index0) const {
    return signal_values.at(labels[index0]);
  }
};

struct OccupancyStats {
  std::uint64_t distinct_labels = 0;                      // K_n
  std::unordered_map<std::uint64_t, std::uint64_t> visits;  // label -> K_{n,l}
  std::map<std::uint64_t, std::uint64_t> count_histogram;   // k -> J_{n,k}
};

// Paths longer than this are refused (override with env KARLIN_MAX_N).
std::uint64_t max_path_length();

LabeledPath simulate_path(const ModelParams& params, std::uint64_t n,
                          RngStream& rng);

// Exact counts; conservation identities (sum J = K_n, sum k*J = n,
// sum visits = n) are recomputed and enforced before returning.
OccupancyStats occupancy_stats(const LabeledPath& path);

// nu(x) = max{k : 1/p_k <= x} for the path's label law.
std::uint64_t nu(double x, const samplers::ZetaLabelLaw& law);

// Per-box max of products over observations with i/n in the box; boxes must
// be one-dimensional. Empty boxes evaluate to 0.
std::vector<double> empirical_sup_measure(const LabeledPath& path,
                                          const std::vector<geometry::Box>& boxes);

// Top-k observations by product, by attached signal, and by noise; ties
// broken by smaller index. Indices are 1-based to match locations i/n.
struct TopLocations {
  std::vector<std::pair<std::uint64_t, double>> by_product;
  std::vector<std::pair<std::uint64_t, double>> by_signal;
  std::vector<std::pair<std::uint64_t, double>> by_noise;
};

TopLocations top_locations(const LabeledPath& path, std::size_t k);

// CSV with header `i,label,sigma,z,x`.
void write_path_csv(const LabeledPath& path, std::ostream& out);

}  // namespace karlin::process
