// xyz_io.hpp
// ASCII XYZ point text: whitespace- or comma-separated x y z per line,
// '#' lines ignored. Extra trailing fields are allowed and skipped.

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <vector>
#include <utility>

#include "watermap/point.hpp"

namespace watermap {

class XyzReader {
 public:
  explicit XyzReader(const std::filesystem::path& path);

  std::optional<Point3> next();

  // Bounds of the points yielded so far. Errors on an empty stream.
  PointCloudBounds bounds() const;

 private:
  std::ifstream file_;
  std::filesystem::path path_;
  PointCloudBounds bounds_;
  std::string line_;
  std::uint64_t line_no_ = 0;
};

std::pair<std::vector<Point3>, PointCloudBounds> read_xyz(const std::filesystem::path& path);

// Six decimal places; round-trips within 1e-6 m.
void write_xyz(const std::filesystem::path& path, std::span<const Point3> points);

}  // namespace watermap
