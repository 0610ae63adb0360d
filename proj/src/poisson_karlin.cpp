#include "karlin/poisson_karlin.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace karlin::poisson_karlin {

MarkedPointSet simulate_marked_points(const process::ModelParams& params,
                                      double lambda, std::size_t dim,
                                      RngStream& rng) {
  params.validate();
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (lambda > static_cast<double>(process::max_path_length())) {
    throw std::length_error("lambda exceeds configured maximum");
  }
  MarkedPointSet points;
  points.lambda = lambda;
  points.dim = dim;
  points.count = samplers::poisson_count(lambda, rng);
  points.locations.resize(points.count * dim);
  points.labels.resize(points.count);
  points.noise.resize(points.count);
  // Fixed draw order per point (location coords, label, eps on first
  // visit, noise) pins the realization to the seed.
  for (std::uint64_t i = 0; i < points.count; ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      points.locations[i * dim + d] = rng.uniform_open();
    }
    const std::uint64_t label = params.label_law->sample(rng);
    auto [it, inserted] = points.signal_values.try_emplace(label, 0.0);
    if (inserted) {
      it->second = samplers::pareto_sample(params.signal_law, rng);
    }
    points.labels[i] = label;
    points.noise[i] = samplers::pareto_sample(params.noise_law, rng);
  }
  return points;
}

std::vector<LabelCluster> extract_clusters(const MarkedPointSet& points) {
  std::unordered_map<std::uint64_t, std::size_t> slot_of_label;
  slot_of_label.reserve(points.signal_values.size() * 2);
  std::vector<LabelCluster> clusters;
  clusters.reserve(points.signal_values.size());
  for (std::uint64_t i = 0; i < points.count; ++i) {
    const std::uint64_t label = points.labels[i];
    auto [it, inserted] = slot_of_label.try_emplace(label, clusters.size());
    if (inserted) {
      clusters.push_back(LabelCluster{label, points.signal_at(i), points.dim, {}});
    }
    LabelCluster& cluster = clusters[it->second];
    const auto loc = points.location(i);
    cluster.locations.insert(cluster.locations.end(), loc.begin(), loc.end());
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const LabelCluster& a, const LabelCluster& b) {
              if (a.signal_value != b.signal_value) {
                return a.signal_value > b.signal_value;
              }
              return a.label < b.label;
            });
  return clusters;
}

std::vector<double> poisson_karlin_sup_measure(
    const MarkedPointSet& points, const std::vector<geometry::Box>& boxes,
    bool with_noise) {
  for (const geometry::Box& box : boxes) {
    geometry::validate_box(box);
    if (box.dim() != points.dim) {
      throw std::invalid_argument("box dimension disagrees with point set");
    }
  }
  std::vector<double> values(boxes.size(), 0.0);
  for (std::uint64_t i = 0; i < points.count; ++i) {
    const double value = with_noise ? points.product_at(i) : points.signal_at(i);
    const auto loc = points.location(i);
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      if (value > values[b] && boxes[b].contains(loc)) values[b] = value;
    }
  }
  return values;
}

void write_points_csv(const MarkedPointSet& points, std::ostream& out) {
  for (std::size_t d = 1; d <= points.dim; ++d) out << "u_" << d << ',';
  out << "label,sigma,z,x\n";
  const auto previous = out.precision(17);
  for (std::uint64_t i = 0; i < points.count; ++i) {
    for (const double coord : points.location(i)) out << coord << ',';
    out << points.labels[i] << ',' << points.signal_at(i) << ','
        << points.noise[i] << ',' << points.product_at(i) << '\n';
  }
  out.precision(previous);
}

}  // namespace karlin::poisson_karlin
