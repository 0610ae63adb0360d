#include <array>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "karlin/geometry.hpp"

namespace {

using namespace karlin::geometry;

TEST_CASE("intervals are half-open except at the top of the unit interval") {
  const Interval iv{0.25, 0.5};
  CHECK(iv.contains(0.25));
  CHECK(iv.contains(0.49999));
  CHECK_FALSE(iv.contains(0.5));
  CHECK_FALSE(iv.contains(0.2));
  CHECK(iv.length() == doctest::Approx(0.25));

  const Interval top{0.5, 1.0};
  CHECK(top.contains(1.0));  // closed at 1 so partitions cover it once
  const Interval bottom{0.0, 0.5};
  CHECK_FALSE(bottom.contains(1.0));
  CHECK(bottom.contains(0.0));
}

TEST_CASE("boxes contain points coordinatewise and have product measure") {
  Box box;
  box.sides = {Interval{0.0, 0.5}, Interval{0.25, 1.0}};
  CHECK(box.dim() == 2);
  CHECK(box.measure() == doctest::Approx(0.5 * 0.75));
  const std::array<double, 2> in{0.1, 0.9};
  const std::array<double, 2> out1{0.6, 0.9};
  const std::array<double, 2> out2{0.1, 0.1};
  CHECK(box.contains(in));
  CHECK_FALSE(box.contains(out1));
  CHECK_FALSE(box.contains(out2));
}

TEST_CASE("interval and box validation rejects malformed input") {
  CHECK_THROWS_AS(validate_interval(Interval{0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_interval(Interval{0.7, 0.3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_interval(Interval{-0.1, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_interval(Interval{0.5, 1.1}),
                  std::invalid_argument);
  CHECK_NOTHROW(validate_interval(Interval{0.0, 1.0}));

  Box empty;
  CHECK_THROWS_AS(validate_box(empty), std::invalid_argument);
}

TEST_CASE("make_box_1d builds a validated interval box") {
  const Box b = make_box_1d(0.25, 0.75);
  CHECK(b.dim() == 1);
  CHECK(b.sides[0].lo == 0.25);
  CHECK(b.sides[0].hi == 0.75);
  CHECK_THROWS_AS(make_box_1d(0.75, 0.25), std::invalid_argument);
}

TEST_CASE("parse_boxes reads one-dimensional comma lists") {
  const auto boxes = parse_boxes("0:0.25,0.25:0.75,0:1");
  REQUIRE(boxes.size() == 3);
  for (const auto& b : boxes) CHECK(b.dim() == 1);
  CHECK(boxes[0].sides[0].lo == 0.0);
  CHECK(boxes[0].sides[0].hi == 0.25);
  CHECK(boxes[1].sides[0].lo == 0.25);
  CHECK(boxes[1].sides[0].hi == 0.75);
  CHECK(boxes[2].sides[0].hi == 1.0);
}

TEST_CASE("parse_boxes zips semicolon groups into higher dimensions") {
  // group g supplies coordinate g of every box
  const auto boxes = parse_boxes("0:0.5,0.5:1;0:1,0:0.25");
  REQUIRE(boxes.size() == 2);
  CHECK(boxes[0].dim() == 2);
  CHECK(boxes[0].sides[0].lo == 0.0);
  CHECK(boxes[0].sides[0].hi == 0.5);
  CHECK(boxes[0].sides[1].lo == 0.0);
  CHECK(boxes[0].sides[1].hi == 1.0);
  CHECK(boxes[1].sides[0].lo == 0.5);
  CHECK(boxes[1].sides[1].hi == 0.25);
}

TEST_CASE("parse_boxes rejects malformed syntax") {
  CHECK_THROWS_AS(parse_boxes(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_boxes("0-0.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_boxes("0:0.5,bad"), std::invalid_argument);
  CHECK_THROWS_AS(parse_boxes("0.5:0.2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_boxes("0:1.5"), std::invalid_argument);
  // ragged groups: 2 boxes in dim 0, 1 box in dim 1
  CHECK_THROWS_AS(parse_boxes("0:0.5,0.5:1;0:1"), std::invalid_argument);
}

TEST_CASE("format_box shows every side with interval brackets") {
  const Box b = make_box_1d(0.25, 0.75);
  CHECK(format_box(b) == "[0.25,0.75)");
  const auto boxes = parse_boxes("0:0.5;0:1");
  REQUIRE(boxes.size() == 1);
  CHECK(format_box(boxes[0]) == "[0,0.5) x [0,1)");
}

}  // namespace
