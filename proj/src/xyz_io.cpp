#include "watermap/xyz_io.hpp"

#include <charconv>
#include <cstdio>
#include <vector>

namespace watermap {

XyzReader::XyzReader(const std::filesystem::path& path)
    : file_(path, std::ios::binary), path_(path) {
  if (!file_) throw input_error("cannot open XYZ file: " + path.string());
}

std::optional<Point3> XyzReader::next() {
  while (std::getline(file_, line_)) {
    ++line_no_;
    const char* p = line_.data();
    const char* end = p + line_.size();
    auto skip_sep = [&] {
      while (p < end && (*p == ' ' || *p == '\t' || *p == ',' || *p == '\r')) ++p;
    };
    skip_sep();
    if (p >= end || *p == '#') continue;

    double coord[3];
    for (int i = 0; i < 3; ++i) {
      skip_sep();
      auto [ptr, ec] = std::from_chars(p, end, coord[i]);
      if (ec != std::errc() || ptr == p)
        throw input_error(path_.string() + ": parse error at line " +
                          std::to_string(line_no_));
      p = ptr;
    }
    Point3 pt{coord[0], coord[1], coord[2]};
    bounds_.expand(pt);
    return pt;
  }
  return std::nullopt;
}

PointCloudBounds XyzReader::bounds() const {
  if (bounds_.point_count == 0)
    throw input_error(path_.string() + ": no points, bounds undefined");
  return bounds_;
}

std::pair<std::vector<Point3>, PointCloudBounds> read_xyz(const std::filesystem::path& path) {
  XyzReader reader(path);
  std::vector<Point3> points;
  while (auto p = reader.next()) points.push_back(*p);
  return {std::move(points), reader.bounds()};
}

void write_xyz(const std::filesystem::path& path, std::span<const Point3> points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot create XYZ file: " + path.string());
  std::string buf;
  char line[128];
  for (const Point3& p : points) {
    const int n = std::snprintf(line, sizeof(line), "%.6f %.6f %.6f\n", p.x, p.y, p.z);
    buf.append(line, n);
    if (buf.size() > (1u << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw input_error("XYZ write failed: " + path.string());
}

}  // namespace watermap
