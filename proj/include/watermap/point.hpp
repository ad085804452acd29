// point.hpp
// Basic point-cloud types shared by readers, rasterization and synthesis.

#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>

namespace watermap {

// Unreadable, malformed or inconsistent input (files, masks, scene specs).
// The CLI maps this category to exit status 2.
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One LiDAR return: projected easting/northing and elevation, meters.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct PointCloudBounds {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();
  std::uint64_t point_count = 0;

  void expand(const Point3& p) {
    if (p.x < min_x) min_x = p.x;
    if (p.y < min_y) min_y = p.y;
    if (p.x > max_x) max_x = p.x;
    if (p.y > max_y) max_y = p.y;
    ++point_count;
  }

  bool contains(const Point3& p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
};

}  // namespace watermap
