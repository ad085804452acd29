// las_io.hpp
// Streaming reader for uncompressed LAS 1.2-1.4 point files (formats 0-10)
// and a minimal LAS 1.2 format-0 writer used for fixtures and synthesis.
// Only x/y/z are consumed; all other record fields are parsed past.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "watermap/point.hpp"

namespace watermap {

struct LasHeaderInfo {
  int version_major = 0;
  int version_minor = 0;
  int point_format = 0;
  int record_length = 0;
  std::uint64_t point_count = 0;
  std::uint32_t point_data_offset = 0;
  double scale[3] = {0, 0, 0};
  double offset[3] = {0, 0, 0};
};

class LasReader {
 public:
  // drop_withheld skips points whose withheld classification flag is set.
  explicit LasReader(const std::filesystem::path& path, bool drop_withheld = false);

  // Next point in file order, or nullopt at end of stream.
  std::optional<Point3> next();

  const LasHeaderInfo& header() const { return header_; }

  // Bounds of the points yielded so far. Errors on an empty stream.
  PointCloudBounds bounds() const;

 private:
  std::ifstream file_;
  std::filesystem::path path_;
  LasHeaderInfo header_;
  PointCloudBounds bounds_;
  std::vector<char> record_;
  std::uint64_t next_index_ = 0;
  bool drop_withheld_ = false;
};

// Reads the whole file; convenience over the streaming interface.
std::pair<std::vector<Point3>, PointCloudBounds> read_las(
    const std::filesystem::path& path, bool drop_withheld = false);

// LAS 1.2, point format 0, little-endian. Offsets are floor(min coordinate).
void write_las(const std::filesystem::path& path, std::span<const Point3> points,
               double scale = 0.001);

}  // namespace watermap
