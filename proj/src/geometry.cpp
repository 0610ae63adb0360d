#include "karlin/geometry.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace karlin::geometry {

bool Box::contains(std::span<const double> point) const {
  if (point.size() != sides.size()) {
    throw std::invalid_argument("point/box dimension mismatch");
  }
  for (std::size_t i = 0; i < sides.size(); ++i) {
    if (!sides[i].contains(point[i])) return false;
  }
  return true;
}

double Box::measure() const {
  double m = 1.0;
  for (const Interval& iv : sides) m *= iv.length();
  return m;
}

void validate_interval(const Interval& iv) {
  if (!(iv.lo >= 0.0) || !(iv.hi <= 1.0) || !(iv.lo < iv.hi)) {
    throw std::invalid_argument("interval must satisfy 0 <= lo < hi <= 1");
  }
}

void validate_box(const Box& box) {
  if (box.sides.empty()) {
    throw std::invalid_argument("box needs at least one dimension");
  }
  for (const Interval& iv : box.sides) validate_interval(iv);
}

Box make_box_1d(double lo, double hi) {
  Box box{{Interval{lo, hi}}};
  validate_box(box);
  return box;
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

Interval parse_interval(const std::string& token) {
  const std::size_t colon = token.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("expected lo:hi, got '" + token + "'");
  }
  std::size_t lo_end = 0;
  std::size_t hi_end = 0;
  const std::string lo_text = token.substr(0, colon);
  const std::string hi_text = token.substr(colon + 1);
  Interval iv{};
  try {
    iv.lo = std::stod(lo_text, &lo_end);
    iv.hi = std::stod(hi_text, &hi_end);
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed interval '" + token + "'");
  }
  if (lo_end != lo_text.size() || hi_end != hi_text.size()) {
    throw std::invalid_argument("malformed interval '" + token + "'");
  }
  validate_interval(iv);
  return iv;
}

}  // namespace

std::vector<Box> parse_boxes(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty box list");
  const std::vector<std::string> groups = split(text, ';');
  std::vector<std::vector<Interval>> per_dim;
  per_dim.reserve(groups.size());
  for (const std::string& group : groups) {
    std::vector<Interval> intervals;
    for (const std::string& token : split(group, ',')) {
      intervals.push_back(parse_interval(token));
    }
    if (!per_dim.empty() && intervals.size() != per_dim.front().size()) {
      throw std::invalid_argument(
          "all dimension groups must list the same number of intervals");
    }
    per_dim.push_back(std::move(intervals));
  }
  const std::size_t n_boxes = per_dim.front().size();
  std::vector<Box> boxes(n_boxes);
  for (std::size_t b = 0; b < n_boxes; ++b) {
    boxes[b].sides.reserve(per_dim.size());
    for (const auto& dim_group : per_dim) {
      boxes[b].sides.push_back(dim_group[b]);
    }
    validate_box(boxes[b]);
  }
  return boxes;
}

std::string format_box(const Box& box) {
  std::ostringstream out;
  for (std::size_t i = 0; i < box.sides.size(); ++i) {
    if (i > 0) out << " x ";
    out << '[' << box.sides[i].lo << ',' << box.sides[i].hi << ')';
  }
  return out.str();
}

}  // namespace karlin::geometry
