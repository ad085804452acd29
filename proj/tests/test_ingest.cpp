#include <cstring>
#include <random>

#include "doctest.h"
#include "testutil.hpp"
#include "watermap/las_io.hpp"
#include "watermap/xyz_io.hpp"

using namespace watermap;
using testutil::TempDir;

namespace {

// Hand-built LAS fixtures, independent of the project's writer.
struct RawPoint {
  std::int32_t x, y, z;
  std::uint8_t classification = 0;
};

template <typename T>
void put(std::string& s, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  s.append(buf, sizeof(T));
}

std::string las12_fixture(const std::vector<RawPoint>& pts, double scale, double offset,
                          std::uint8_t format_byte = 0) {
  std::string h = "LASF";
  put<std::uint16_t>(h, 0);
  put<std::uint16_t>(h, 0);
  h.append(16, '\0');
  h.push_back(1);
  h.push_back(2);
  h.append(64, '\0');
  put<std::uint16_t>(h, 1);
  put<std::uint16_t>(h, 2024);
  put<std::uint16_t>(h, 227);
  put<std::uint32_t>(h, 227);
  put<std::uint32_t>(h, 0);
  h.push_back(static_cast<char>(format_byte));
  put<std::uint16_t>(h, 20);
  put<std::uint32_t>(h, static_cast<std::uint32_t>(pts.size()));
  for (int i = 0; i < 5; ++i) put<std::uint32_t>(h, 0);
  for (int i = 0; i < 3; ++i) put<double>(h, scale);
  for (int i = 0; i < 3; ++i) put<double>(h, offset);
  for (int i = 0; i < 6; ++i) put<double>(h, 0.0);  // min/max, unused by the reader
  REQUIRE(h.size() == 227);
  for (const RawPoint& p : pts) {
    put<std::int32_t>(h, p.x);
    put<std::int32_t>(h, p.y);
    put<std::int32_t>(h, p.z);
    put<std::uint16_t>(h, 0);
    h.push_back(0);
    h.push_back(static_cast<char>(p.classification));
    h.push_back(0);
    h.push_back(0);
    put<std::uint16_t>(h, 0);
  }
  return h;
}

std::string las14_fixture_fmt6(const std::vector<RawPoint>& pts, double scale,
                               double offset) {
  std::string h = "LASF";
  put<std::uint16_t>(h, 0);
  put<std::uint16_t>(h, 0);
  h.append(16, '\0');
  h.push_back(1);
  h.push_back(4);
  h.append(64, '\0');
  put<std::uint16_t>(h, 1);
  put<std::uint16_t>(h, 2024);
  put<std::uint16_t>(h, 375);
  put<std::uint32_t>(h, 375);
  put<std::uint32_t>(h, 0);
  h.push_back(6);                    // point format 6
  put<std::uint16_t>(h, 30);
  put<std::uint32_t>(h, 0);          // legacy count zeroed for format 6
  for (int i = 0; i < 5; ++i) put<std::uint32_t>(h, 0);
  for (int i = 0; i < 3; ++i) put<double>(h, scale);
  for (int i = 0; i < 3; ++i) put<double>(h, offset);
  for (int i = 0; i < 6; ++i) put<double>(h, 0.0);
  put<std::uint64_t>(h, 0);          // waveform start
  put<std::uint64_t>(h, 0);          // first EVLR
  put<std::uint32_t>(h, 0);          // EVLR count
  put<std::uint64_t>(h, pts.size());
  for (int i = 0; i < 15; ++i) put<std::uint64_t>(h, 0);
  REQUIRE(h.size() == 375);
  for (const RawPoint& p : pts) {
    put<std::int32_t>(h, p.x);
    put<std::int32_t>(h, p.y);
    put<std::int32_t>(h, p.z);
    put<std::uint16_t>(h, 0);        // intensity
    h.push_back(0);                  // returns
    h.push_back(static_cast<char>(p.classification));  // classification flags byte
    h.push_back(0);                  // classification
    h.push_back(0);                  // user data
    put<std::int16_t>(h, 0);         // scan angle
    put<std::uint16_t>(h, 0);        // point source
    put<double>(h, 0.0);             // gps time
  }
  return h;
}

void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream f(p, std::ios::binary);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("las scale and offset arithmetic") {
  TempDir dir("las");
  write_file(dir / "one.las", las12_fixture({{50, 50, 50}}, 0.01, 100.0));
  auto [pts, bounds] = read_las(dir / "one.las");
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].x == doctest::Approx(100.5).epsilon(1e-12));
  CHECK(pts[0].y == doctest::Approx(100.5).epsilon(1e-12));
  CHECK(pts[0].z == doctest::Approx(100.5).epsilon(1e-12));
  CHECK(bounds.point_count == 1);
  CHECK(bounds.min_x == pts[0].x);
  CHECK(bounds.max_x == pts[0].x);
}

TEST_CASE("las empty file yields empty stream and bounds error") {
  TempDir dir("las");
  write_file(dir / "empty.las", las12_fixture({}, 0.01, 0.0));
  LasReader reader(dir / "empty.las");
  CHECK(!reader.next().has_value());
  CHECK_THROWS_AS(reader.bounds(), input_error);
}

TEST_CASE("las write-then-read round trip") {
  TempDir dir("las");
  const std::vector<Point3> pts = {{12.3456, -7.125, 100.001},
                                   {0.0, 0.0, -5.5},
                                   {999.999, 1234.5, 42.0}};
  write_las(dir / "rt.las", pts, 0.001);
  auto [back, bounds] = read_las(dir / "rt.las");
  REQUIRE(back.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    // within half the 1 mm scale quantum
    CHECK(std::fabs(back[i].x - pts[i].x) <= 0.0005 + 1e-9);
    CHECK(std::fabs(back[i].y - pts[i].y) <= 0.0005 + 1e-9);
    CHECK(std::fabs(back[i].z - pts[i].z) <= 0.0005 + 1e-9);
  }
  CHECK(bounds.point_count == 3);
}

TEST_CASE("las 1.4 format 6 with 64-bit count") {
  TempDir dir("las");
  write_file(dir / "v14.las", las14_fixture_fmt6({{1000, 2000, 3000}, {4000, 5000, 6000}},
                                                 0.001, 10.0));
  auto [pts, bounds] = read_las(dir / "v14.las");
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].x == doctest::Approx(11.0).epsilon(1e-12));
  CHECK(pts[1].z == doctest::Approx(16.0).epsilon(1e-12));
  CHECK(bounds.point_count == 2);
}

TEST_CASE("las error paths") {
  TempDir dir("las");

  SUBCASE("bad signature") {
    std::string bytes = las12_fixture({{1, 2, 3}}, 0.01, 0.0);
    bytes[0] = 'X';
    write_file(dir / "bad.las", bytes);
    CHECK_THROWS_WITH_AS(read_las(dir / "bad.las"),
                         doctest::Contains("signature"), input_error);
  }
  SUBCASE("laz compression bit") {
    write_file(dir / "c.las", las12_fixture({{1, 2, 3}}, 0.01, 0.0, 0x80));
    CHECK_THROWS_WITH_AS(read_las(dir / "c.las"), doctest::Contains("LAZ"), input_error);
  }
  SUBCASE("truncated point record") {
    std::string bytes = las12_fixture({{1, 2, 3}, {4, 5, 6}}, 0.01, 0.0);
    bytes.resize(bytes.size() - 10);
    write_file(dir / "t.las", bytes);
    LasReader reader(dir / "t.las");
    CHECK(reader.next().has_value());
    CHECK_THROWS_WITH_AS(reader.next(), doctest::Contains("index 1"), input_error);
  }
}

TEST_CASE("las withheld flag") {
  TempDir dir("las");
  // second point marked withheld (classification bit 7, formats 0-5)
  write_file(dir / "w.las",
             las12_fixture({{100, 0, 0}, {200, 0, 0, 0x80}, {300, 0, 0}}, 0.01, 0.0));
  CHECK(read_las(dir / "w.las").first.size() == 3);  // kept by default
  auto [pts, bounds] = read_las(dir / "w.las", /*drop_withheld=*/true);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].x == doctest::Approx(1.0));
  CHECK(pts[1].x == doctest::Approx(3.0));
  CHECK(bounds.point_count == 2);
}

TEST_CASE("xyz parsing") {
  TempDir dir("xyz");
  SUBCASE("plain line") {
    write_file(dir / "a.xyz", "1.0 2.0 3.0\n");
    auto [pts, bounds] = read_xyz(dir / "a.xyz");
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].x == 1.0);
    CHECK(pts[0].y == 2.0);
    CHECK(pts[0].z == 3.0);
  }
  SUBCASE("comment skip and comma delimiters") {
    write_file(dir / "b.xyz", "# comment\n4,5,6\n");
    auto pts = read_xyz(dir / "b.xyz").first;
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].x == 4.0);
    CHECK(pts[0].y == 5.0);
    CHECK(pts[0].z == 6.0);
  }
  SUBCASE("extra fields ignored") {
    write_file(dir / "c.xyz", "1 2 3 99 classification\n");
    CHECK(read_xyz(dir / "c.xyz").first.size() == 1);
  }
  SUBCASE("non-numeric field reports line number") {
    write_file(dir / "d.xyz", "1 2 3\n1 oops 3\n");
    CHECK_THROWS_WITH_AS(read_xyz(dir / "d.xyz"), doctest::Contains("line 2"),
                         input_error);
  }
}

TEST_CASE("xyz round trip of random points") {
  TempDir dir("xyz");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1000.0, 1000.0);
  std::vector<Point3> pts(100000);
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  write_xyz(dir / "rt.xyz", pts);
  auto [back, bounds] = read_xyz(dir / "rt.xyz");
  REQUIRE(back.size() == pts.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    worst = std::max(worst, std::fabs(back[i].x - pts[i].x));
    worst = std::max(worst, std::fabs(back[i].y - pts[i].y));
    worst = std::max(worst, std::fabs(back[i].z - pts[i].z));
  }
  CHECK(worst <= 1e-6);
  CHECK(bounds.point_count == pts.size());
}

TEST_CASE("bounds contain every yielded point") {
  TempDir dir("xyz");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::vector<Point3> pts(1000);
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  write_xyz(dir / "b.xyz", pts);
  auto [back, bounds] = read_xyz(dir / "b.xyz");
  for (const Point3& p : back) CHECK(bounds.contains(p));
}

}  // TEST_SUITE
