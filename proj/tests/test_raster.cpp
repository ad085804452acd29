#include <random>
#include <sstream>

#include "doctest.h"
#include "testutil.hpp"
#include "watermap/ascii_grid.hpp"
#include "watermap/dsm.hpp"
#include "watermap/reference.hpp"

using namespace watermap;
using testutil::TempDir;

TEST_SUITE("raster") {

TEST_CASE("build_dsm puts both points in one cell") {
  const std::vector<Point3> pts = {{0.1, 0.1, 5.0}, {0.2, 0.3, 7.0}};
  const RasterGrid dsm = build_dsm(pts, 0.5, Aggregator::max);
  CHECK(dsm.georef.n_cols == 1);
  CHECK(dsm.georef.n_rows == 1);
  CHECK(dsm.values[0] == 7.0);
  CHECK(build_dsm(pts, 0.5, Aggregator::min).values[0] == 5.0);
  CHECK(build_dsm(pts, 0.5, Aggregator::mean).values[0] == doctest::Approx(6.0));
}

TEST_CASE("build_dsm singleton point") {
  const std::vector<Point3> pts = {{0.1, 0.1, 5.0}};
  for (Aggregator agg : {Aggregator::min, Aggregator::max, Aggregator::mean}) {
    const RasterGrid dsm = build_dsm(pts, 0.5, agg);
    CHECK(dsm.georef.n_cols == 1);
    CHECK(dsm.georef.n_rows == 1);
    CHECK(dsm.values[0] == 5.0);
  }
}

TEST_CASE("build_dsm extent snaps outward to whole cells") {
  const std::vector<Point3> pts = {{0.7, 0.7, 1.0}, {2.3, 1.1, 2.0}};
  const RasterGrid dsm = build_dsm(pts, 0.5, Aggregator::max);
  CHECK(dsm.georef.x_origin == 0.5);
  CHECK(dsm.georef.y_origin == 0.5);
  CHECK(dsm.georef.n_cols == 4);
  CHECK(dsm.georef.n_rows == 2);
}

TEST_CASE("build_dsm errors") {
  CHECK_THROWS_AS(build_dsm({}, 0.5), input_error);
  const std::vector<Point3> pts = {{0, 0, 0}};
  CHECK_THROWS_AS(build_dsm(pts, 0.0), input_error);
  CHECK_THROWS_AS(build_dsm(pts, -1.0), input_error);
}

TEST_CASE("build_dsm matches the bucket oracle on random points") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> uxy(-20.0, 20.0);
  std::uniform_real_distribution<double> uz(0.0, 50.0);
  std::vector<Point3> pts(10000);
  for (auto& p : pts) p = {uxy(rng), uxy(rng), uz(rng)};

  for (Aggregator agg : {Aggregator::min, Aggregator::max, Aggregator::mean}) {
    const RasterGrid a = build_dsm(pts, 0.5, agg);
    const RasterGrid b = reference::build_dsm(pts, 0.5, agg);
    REQUIRE(a.georef == b.georef);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      if (a.is_nodata(a.values[i])) {
        CHECK(b.is_nodata(b.values[i]));
      } else if (agg == Aggregator::mean) {
        CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-9));
      } else {
        CHECK(a.values[i] == b.values[i]);
      }
    }
  }
}

TEST_CASE("aggregator ordering min <= mean <= max") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<Point3> pts(5000);
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  const RasterGrid lo = build_dsm(pts, 1.0, Aggregator::min);
  const RasterGrid mid = build_dsm(pts, 1.0, Aggregator::mean);
  const RasterGrid hi = build_dsm(pts, 1.0, Aggregator::max);
  for (std::size_t i = 0; i < lo.values.size(); ++i) {
    if (lo.is_nodata(lo.values[i])) continue;
    CHECK(lo.values[i] <= mid.values[i] + 1e-12);
    CHECK(mid.values[i] <= hi.values[i] + 1e-12);
  }
}

TEST_CASE("occupancy") {
  GridGeoref g;
  g.n_rows = 2;
  g.n_cols = 5;
  RasterGrid grid(g);
  SUBCASE("all nodata") {
    const BitMask m = occupancy(grid);
    CHECK(m.popcount() == 0);
  }
  SUBCASE("three filled cells") {
    grid.values[1] = 1.0;
    grid.values[4] = -2.0;
    grid.values[7] = 0.0;
    const BitMask m = occupancy(grid);
    CHECK(m.popcount() == 3);
    CHECK(m.bits[1]);
    CHECK(m.bits[7]);
  }
  SUBCASE("complement identity on random grids") {
    for (int trial = 0; trial < 10; ++trial) {
      const RasterGrid r = testutil::random_grid(20, 30, -5, 5, 0.4, 100 + trial);
      const BitMask m = occupancy(r);
      std::uint64_t nodata = 0;
      for (double v : r.values)
        if (r.is_nodata(v)) ++nodata;
      CHECK(m.popcount() + nodata == r.georef.cells());
    }
  }
}

TEST_CASE("occupancy fraction matches the bucket oracle") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 30.0);
  std::vector<Point3> pts(2000);
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  const RasterGrid dsm = build_dsm(pts, 1.0, Aggregator::max);
  const RasterGrid ref = reference::build_dsm(pts, 1.0, Aggregator::max);
  std::uint64_t ref_occupied = 0;
  for (double v : ref.values)
    if (!ref.is_nodata(v)) ++ref_occupied;
  CHECK(occupancy(dsm).popcount() == ref_occupied);
}

TEST_CASE("ascii grid writes the documented header") {
  GridGeoref g;
  g.n_rows = 1;
  g.n_cols = 1;
  g.cell_size = 1.0;
  RasterGrid grid(g);
  grid.values[0] = 2.5;
  std::ostringstream out;
  write_ascii_grid(grid, out);
  CHECK(out.str() ==
        "ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
        "NODATA_value -9999\n2.5\n");
}

TEST_CASE("ascii grid round trip is lossless") {
  TempDir dir("asc");
  for (int trial = 0; trial < 5; ++trial) {
    RasterGrid g = testutil::random_grid(50, 50, -1000.0, 1000.0, 0.2, 37 + trial);
    g.georef.x_origin = 431552.25;
    g.georef.y_origin = 4399122.75;
    const auto path = dir / ("g" + std::to_string(trial) + ".asc");
    write_ascii_grid(g, path);
    const RasterGrid back = read_ascii_grid(path);
    REQUIRE(back.georef == g.georef);
    CHECK(back.nodata == g.nodata);
    CHECK(back.values == g.values);  // bit-exact via shortest round-trip format
  }
}

TEST_CASE("ascii grid header errors") {
  SUBCASE("missing key is named") {
    std::istringstream in("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
                          "1 2 3 4\n");
    CHECK_THROWS_WITH_AS(read_ascii_grid(in, "t"),
                         doctest::Contains("nodata_value"), input_error);
  }
  SUBCASE("cellsize zero rejected") {
    std::istringstream in("ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 0\n"
                          "NODATA_value -9999\n1\n");
    CHECK_THROWS_WITH_AS(read_ascii_grid(in, "t"), doctest::Contains("cellsize"),
                         input_error);
  }
  SUBCASE("value count mismatch") {
    std::istringstream in("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
                          "NODATA_value -9999\n1 2 3\n");
    CHECK_THROWS_WITH_AS(read_ascii_grid(in, "t"), doctest::Contains("count"),
                         input_error);
  }
  SUBCASE("case-insensitive keys accepted") {
    std::istringstream in("NCOLS 1\nNROWS 1\nXLLCORNER 2\nYLLCORNER 3\nCELLSIZE 1\n"
                          "nodata_VALUE -1\n7\n");
    const RasterGrid g = read_ascii_grid(in, "t");
    CHECK(g.georef.x_origin == 2.0);
    CHECK(g.values[0] == 7.0);
  }
}

TEST_CASE("mask round trip through 0/1 grid") {
  const BitMask m = testutil::random_mask(13, 17, 0.4, 41);
  const BitMask back = mask_from_grid(grid_from_mask(m));
  CHECK(back.bits == m.bits);
  CHECK(back.georef == m.georef);
}

}  // TEST_SUITE
