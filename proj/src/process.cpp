#include "karlin/process.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace karlin::process {

ModelParams ModelParams::standard(double alpha, double alpha_prime,
                                  double beta) {
  ModelParams params;
  params.alpha = alpha;
  params.alpha_prime = alpha_prime;
  params.beta = beta;
  params.signal_law = {alpha, 1.0};
  params.noise_law = {alpha_prime, 1.0};
  params.label_law = std::make_shared<samplers::ZetaLabelLaw>(beta);
  params.validate();
  return params;
}

void ModelParams::validate() const {
  if (!(alpha > 0.0) || !(alpha_prime > 0.0)) {
    throw std::invalid_argument("tail exponents must be positive");
  }
  if (!(beta > 0.0) || !(beta < 1.0)) {
    throw std::invalid_argument("beta must lie in (0,1)");
  }
  if (signal_law.alpha != alpha || noise_law.alpha != alpha_prime) {
    throw std::invalid_argument("law exponents disagree with model exponents");
  }
  if (!label_law) throw std::invalid_argument("label law not set");
  if (label_law->beta() != beta) {
    throw std::invalid_argument("label law beta disagrees with model beta");
  }
}

std::uint64_t max_path_length() {
  static const std::uint64_t limit = [] {
    if (const char* env = std::getenv("KARLIN_MAX_N")) {
      const unsigned long long parsed = std::strtoull(env, nullptr, 10);
      if (parsed > 0) return static_cast<std::uint64_t>(parsed);
    }
    return std::uint64_t{100000000};  // 1e8
  }();
  return limit;
}

LabeledPath simulate_path(const ModelParams& params, std::uint64_t n,
                          RngStream& rng) {
  params.validate();
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (n > max_path_length()) {
    throw std::length_error("path length exceeds configured maximum");
  }
  LabeledPath path;
  path.n = n;
  path.labels.resize(n);
  path.noise.resize(n);
  path.products.resize(n);
  // Draw order per observation is fixed (label, eps on first visit, noise)
  // so a seed pins the whole path bit-for-bit.
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t label = params.label_law->sample(rng);
    auto [it, inserted] = path.signal_values.try_emplace(label, 0.0);
    if (inserted) {
      it->second = samplers::pareto_sample(params.signal_law, rng);
    }
    const double z = samplers::pareto_sample(params.noise_law, rng);
    path.labels[i] = label;
    path.noise[i] = z;
    path.products[i] = it->second * z;
  }
  return path;
}

OccupancyStats occupancy_stats(const LabeledPath& path) {
  OccupancyStats stats;
  stats.visits.reserve(path.signal_values.size() * 2);
  for (const std::uint64_t label : path.labels) ++stats.visits[label];
  stats.distinct_labels = stats.visits.size();
  for (const auto& [label, count] : stats.visits) {
    ++stats.count_histogram[count];
  }
  // Conservation identities hold by construction; enforce them anyway so a
  // broken path representation cannot propagate silently.
  std::uint64_t label_total = 0;
  std::uint64_t visit_total = 0;
  std::uint64_t obs_total = 0;
  for (const auto& [count, n_labels] : stats.count_histogram) {
    label_total += n_labels;
    obs_total += count * n_labels;
  }
  for (const auto& [label, count] : stats.visits) visit_total += count;
  if (label_total != stats.distinct_labels || obs_total != path.n ||
      visit_total != path.n) {
    throw std::logic_error("occupancy conservation identities violated");
  }
  return stats;
}

std::uint64_t nu(double x, const samplers::ZetaLabelLaw& law) {
  return law.occupancy_count(x);
}

std::vector<double> empirical_sup_measure(
    const LabeledPath& path, const std::vector<geometry::Box>& boxes) {
  std::vector<double> values;
  values.reserve(boxes.size());
  const double n = static_cast<double>(path.n);
  for (const geometry::Box& box : boxes) {
    geometry::validate_box(box);
    if (box.dim() != 1) {
      throw std::invalid_argument("path sup-measure takes 1-d boxes");
    }
    const geometry::Interval iv = box.sides.front();
    // Observations live at i/n; restrict the scan to the index range that
    // can intersect [lo, hi) and let contains() decide the edges exactly.
    std::uint64_t first = 1;
    if (iv.lo > 0.0) {
      const double lo_idx = std::ceil(iv.lo * n);
      first = lo_idx <= 1.0 ? 1 : static_cast<std::uint64_t>(lo_idx);
      while (first > 1 && iv.contains(static_cast<double>(first - 1) / n)) {
        --first;
      }
    }
    std::uint64_t last = path.n;
    if (iv.hi < 1.0) {
      const double hi_idx = std::floor(iv.hi * n) + 1.0;
      last = hi_idx >= static_cast<double>(path.n)
                 ? path.n
                 : static_cast<std::uint64_t>(hi_idx);
      while (last < path.n && iv.contains(static_cast<double>(last + 1) / n)) {
        ++last;
      }
    }
    double best = 0.0;
    for (std::uint64_t i = first; i <= last; ++i) {
      if (!iv.contains(static_cast<double>(i) / n)) continue;
      best = std::max(best, path.products[i - 1]);
    }
    values.push_back(best);
  }
  return values;
}

namespace {

// Keeps the k largest (index, value) pairs, ordering by value descending
// with ties to the smaller index.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) {}

  void offer(std::uint64_t index, double value) {
    if (entries_.size() == k_ && !better(index, value, entries_.back())) return;
    const std::pair<std::uint64_t, double> entry{index, value};
    auto pos = std::lower_bound(
        entries_.begin(), entries_.end(), entry,
        [this](const auto& a, const auto& b) {
          return better(a.first, a.second, b);
        });
    entries_.insert(pos, entry);
    if (entries_.size() > k_) entries_.pop_back();
  }

  std::vector<std::pair<std::uint64_t, double>> take() && {
    return std::move(entries_);
  }

 private:
  static bool better(std::uint64_t index, double value,
                     const std::pair<std::uint64_t, double>& other) {
    if (value != other.second) return value > other.second;
    return index < other.first;
  }

  std::size_t k_;
  std::vector<std::pair<std::uint64_t, double>> entries_;
};

}  // namespace

TopLocations top_locations(const LabeledPath& path, std::size_t k) {
  if (k == 0 || k > path.n) {
    throw std::invalid_argument("need 1 <= k <= n");
  }
  TopK by_product(k);
  TopK by_signal(k);
  TopK by_noise(k);
  for (std::uint64_t i = 0; i < path.n; ++i) {
    by_product.offer(i + 1, path.products[i]);
    by_signal.offer(i + 1, path.signal_at(i));
    by_noise.offer(i + 1, path.noise[i]);
  }
  return {std::move(by_product).take(), std::move(by_signal).take(),
          std::move(by_noise).take()};
}

void write_path_csv(const LabeledPath& path, std::ostream& out) {
  out << "i,label,sigma,z,x\n";
  const auto previous = out.precision(17);
  for (std::uint64_t i = 0; i < path.n; ++i) {
    out << (i + 1) << ',' << path.labels[i] << ',' << path.signal_at(i) << ','
        << path.noise[i] << ',' << path.products[i] << '\n';
  }
  out.precision(previous);
}

}  // namespace karlin::process
