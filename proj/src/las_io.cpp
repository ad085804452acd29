#include "watermap/las_io.hpp"

#include <cmath>
#include <cstring>

namespace watermap {

namespace {

// Minimal record length per point data record format 0..10.
constexpr int kMinRecordLength[11] = {20, 28, 26, 34, 57, 63, 30, 36, 38, 59, 67};

template <typename T>
T read_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));  // little-endian host assumed
  return v;
}

template <typename T>
void write_le(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

bool withheld_flag(const char* rec, int point_format) {
  if (point_format <= 5) {
    // classification byte 15: bit 7 is the withheld flag
    return (static_cast<unsigned char>(rec[15]) & 0x80) != 0;
  }
  // formats 6-10: classification flags byte 15, bit 2
  return (static_cast<unsigned char>(rec[15]) & 0x04) != 0;
}

}  // namespace

LasReader::LasReader(const std::filesystem::path& path, bool drop_withheld)
    : file_(path, std::ios::binary), path_(path), drop_withheld_(drop_withheld) {
  if (!file_) throw input_error("cannot open LAS file: " + path.string());

  char hdr[375];
  file_.read(hdr, 227);
  if (file_.gcount() < 227) throw input_error(path.string() + ": truncated LAS header");
  if (std::memcmp(hdr, "LASF", 4) != 0)
    throw input_error(path.string() + ": not a LAS file (bad signature)");

  header_.version_major = static_cast<unsigned char>(hdr[24]);
  header_.version_minor = static_cast<unsigned char>(hdr[25]);
  if (header_.version_major != 1 || header_.version_minor < 2 || header_.version_minor > 4)
    throw input_error(path.string() + ": unsupported LAS version " +
                      std::to_string(header_.version_major) + "." +
                      std::to_string(header_.version_minor));

  header_.point_data_offset = read_le<std::uint32_t>(hdr + 96);
  const int raw_format = static_cast<unsigned char>(hdr[104]);
  if (raw_format & 0x80)
    throw input_error(path.string() +
                      ": LAZ-compressed input is not supported; decompress to LAS first");
  header_.point_format = raw_format;
  if (header_.point_format > 10)
    throw input_error(path.string() + ": unsupported point data record format " +
                      std::to_string(header_.point_format));

  header_.record_length = read_le<std::uint16_t>(hdr + 105);
  if (header_.record_length < kMinRecordLength[header_.point_format])
    throw input_error(path.string() + ": point record length " +
                      std::to_string(header_.record_length) + " too short for format " +
                      std::to_string(header_.point_format));

  header_.point_count = read_le<std::uint32_t>(hdr + 107);
  for (int i = 0; i < 3; ++i) header_.scale[i] = read_le<double>(hdr + 131 + 8 * i);
  for (int i = 0; i < 3; ++i) header_.offset[i] = read_le<double>(hdr + 155 + 8 * i);

  if (header_.version_minor >= 4) {
    file_.read(hdr + 227, 375 - 227);
    if (file_.gcount() < 375 - 227)
      throw input_error(path.string() + ": truncated LAS 1.4 header");
    const auto count64 = read_le<std::uint64_t>(hdr + 247);
    if (count64 > 0) header_.point_count = count64;
  }

  file_.clear();
  file_.seekg(header_.point_data_offset);
  if (!file_) throw input_error(path.string() + ": cannot seek to point data");
  record_.resize(header_.record_length);
}

std::optional<Point3> LasReader::next() {
  while (next_index_ < header_.point_count) {
    const std::uint64_t index = next_index_++;
    file_.read(record_.data(), static_cast<std::streamsize>(record_.size()));
    if (file_.gcount() != static_cast<std::streamsize>(record_.size()))
      throw input_error(path_.string() + ": truncated point record at index " +
                        std::to_string(index));
    if (drop_withheld_ && withheld_flag(record_.data(), header_.point_format)) continue;
    Point3 p;
    p.x = read_le<std::int32_t>(record_.data() + 0) * header_.scale[0] + header_.offset[0];
    p.y = read_le<std::int32_t>(record_.data() + 4) * header_.scale[1] + header_.offset[1];
    p.z = read_le<std::int32_t>(record_.data() + 8) * header_.scale[2] + header_.offset[2];
    bounds_.expand(p);
    return p;
  }
  return std::nullopt;
}

PointCloudBounds LasReader::bounds() const {
  if (bounds_.point_count == 0)
    throw input_error(path_.string() + ": no points, bounds undefined");
  return bounds_;
}

std::pair<std::vector<Point3>, PointCloudBounds> read_las(
    const std::filesystem::path& path, bool drop_withheld) {
  LasReader reader(path, drop_withheld);
  std::vector<Point3> points;
  if (reader.header().point_count > 0) points.reserve(reader.header().point_count);
  while (auto p = reader.next()) points.push_back(*p);
  return {std::move(points), reader.bounds()};
}

void write_las(const std::filesystem::path& path, std::span<const Point3> points,
               double scale) {
  PointCloudBounds b;
  for (const Point3& p : points) b.expand(p);
  double zmin = points.empty() ? 0.0 : points[0].z;
  double zmax = zmin;
  for (const Point3& p : points) {
    zmin = std::min(zmin, p.z);
    zmax = std::max(zmax, p.z);
  }
  const double off[3] = {points.empty() ? 0.0 : std::floor(b.min_x),
                         points.empty() ? 0.0 : std::floor(b.min_y),
                         points.empty() ? 0.0 : std::floor(zmin)};

  std::string out;
  out.reserve(227 + points.size() * 20);
  out.append("LASF");
  write_le<std::uint16_t>(out, 0);  // file source id
  write_le<std::uint16_t>(out, 0);  // global encoding
  out.append(16, '\0');             // project GUID
  out.push_back(1);                 // version 1.2
  out.push_back(2);
  out.append(32, '\0');  // system identifier
  out.append(32, '\0');  // generating software
  write_le<std::uint16_t>(out, 1);  // day of year
  write_le<std::uint16_t>(out, 2000);
  write_le<std::uint16_t>(out, 227);  // header size
  write_le<std::uint32_t>(out, 227);  // offset to point data
  write_le<std::uint32_t>(out, 0);    // number of VLRs
  out.push_back(0);                   // point format 0
  write_le<std::uint16_t>(out, 20);   // record length
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(points.size()));
  for (int i = 0; i < 5; ++i) write_le<std::uint32_t>(out, 0);  // points by return
  for (double s : {scale, scale, scale}) write_le<double>(out, s);
  for (double o : off) write_le<double>(out, o);
  write_le<double>(out, points.empty() ? 0.0 : b.max_x);
  write_le<double>(out, points.empty() ? 0.0 : b.min_x);
  write_le<double>(out, points.empty() ? 0.0 : b.max_y);
  write_le<double>(out, points.empty() ? 0.0 : b.min_y);
  write_le<double>(out, points.empty() ? 0.0 : zmax);
  write_le<double>(out, points.empty() ? 0.0 : zmin);

  for (const Point3& p : points) {
    write_le<std::int32_t>(out, static_cast<std::int32_t>(std::llround((p.x - off[0]) / scale)));
    write_le<std::int32_t>(out, static_cast<std::int32_t>(std::llround((p.y - off[1]) / scale)));
    write_le<std::int32_t>(out, static_cast<std::int32_t>(std::llround((p.z - off[2]) / scale)));
    write_le<std::uint16_t>(out, 0);  // intensity
    out.push_back(0);                 // return bits
    out.push_back(0);                 // classification
    out.push_back(0);                 // scan angle
    out.push_back(0);                 // user data
    write_le<std::uint16_t>(out, 0);  // point source id
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw input_error("cannot create LAS file: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw input_error("LAS write failed: " + path.string());
}

}  // namespace watermap
