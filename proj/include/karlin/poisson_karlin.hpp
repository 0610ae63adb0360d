#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <unordered_map>
#include <vector>

#include "karlin/geometry.hpp"
#include "karlin/process.hpp"
#include "karlin/rng.hpp"

namespace karlin::poisson_karlin {

// Poisson-many marked points on the unit cube: N ~ Poisson(lambda) i.i.d.
// uniform locations, each carrying a label, the label's attached signal
// value, and an independent noise factor. Locations are stored flat,
// point i occupying [i*dim, (i+1)*dim).
struct MarkedPointSet {
  double lambda = 0.0;
  std::uint64_t count = 0;
  std::size_t dim = 1;
  std::vector<double> locations;
  std::vector<std::uint64_t> labels;
  std::unordered_map<std::uint64_t, double> signal_values;
  std::vector<double> noise;

  std::span<const double> location(std::uint64_t i) const {
    return {locations.data() + i * dim, dim};
  }
  double signal_at(std::uint64_t i) const {
    return signal_values.at(labels[i]);
  }
  double product_at(std::uint64_t i) const {
    return signal_at(i) * noise[i];
  }
};

// All points sharing one label, with the label's signal value attached.
struct LabelCluster {
  std::uint64_t label = 0;
  double signal_value = 0.0;
  std::size_t dim = 1;
  std::vector<double> locations;  // flat, same layout as MarkedPointSet

  std::uint64_t size() const {
    return static_cast<std::uint64_t>(locations.size() / dim);
  }
};

MarkedPointSet simulate_marked_points(const process::ModelParams& params,
                                      double lambda, std::size_t dim,
                                      RngStream& rng);

// One cluster per distinct label, sorted by attached signal value
// descending (the size-biased pick used in verification is then front()).
std::vector<LabelCluster> extract_clusters(const MarkedPointSet& points);

// Per-box max of the signal value (or signal * noise when with_noise) over
// points falling in the box; empty boxes evaluate to 0.
std::vector<double> poisson_karlin_sup_measure(
    const MarkedPointSet& points, const std::vector<geometry::Box>& boxes,
    bool with_noise);

// CSV with header `u_1,..,u_d,label,sigma,z,x`.
void write_points_csv(const MarkedPointSet& points, std::ostream& out);

}  // namespace karlin::poisson_karlin
