#pragma once

#include <span>
#include <string>
#include <vector>

namespace karlin::geometry {

// Subinterval [lo, hi) of [0,1]; the upper end is treated as closed when
// hi == 1 so that partitions of [0,1] cover the point 1 exactly once.
struct Interval {
  double lo;
  double hi;

  bool contains(double u) const {
    return u >= lo && (u < hi || (hi == 1.0 && u <= 1.0));
  }
  double length() const { return hi - lo; }
};

// Axis-aligned box in [0,1]^d as one interval per coordinate.
struct Box {
  std::vector<Interval> sides;

  std::size_t dim() const { return sides.size(); }
  bool contains(std::span<const double> point) const;
  double measure() const;  // Lebesgue volume
};

// Throws std::invalid_argument unless lo < hi and both lie in [0,1].
void validate_interval(const Interval& iv);
void validate_box(const Box& box);

Box make_box_1d(double lo, double hi);

// Parses the CLI box-list syntax: comma-separated "lo:hi" pairs, with
// per-dimension groups separated by ';' for dim > 1 (group g supplies
// coordinate g of every box, so all groups must list the same number of
// pairs). Example, two boxes in dim 2: "0:0.5,0.5:1;0:1,0:0.25".
std::vector<Box> parse_boxes(const std::string& text);

std::string format_box(const Box& box);

}  // namespace karlin::geometry
