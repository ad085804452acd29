#include <random>

#include "doctest.h"
#include "testutil.hpp"
#include "watermap/reference.hpp"
#include "watermap/werm.hpp"

using namespace watermap;

namespace {

GridGeoref make_georef(int rows, int cols, double cell = 0.5) {
  GridGeoref g;
  g.n_rows = rows;
  g.n_cols = cols;
  g.cell_size = cell;
  return g;
}

RasterGrid constant_dsm(const GridGeoref& g, double value) {
  RasterGrid dsm(g);
  std::fill(dsm.values.begin(), dsm.values.end(), value);
  return dsm;
}

// Terraces of the given step along columns, plus optional per-cell noise.
RasterGrid terraced_dsm(const GridGeoref& g, double step, double terrace_cols,
                        double noise_sd, std::uint64_t seed) {
  RasterGrid dsm(g);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, noise_sd);
  for (int r = 0; r < g.n_rows; ++r)
    for (int c = 0; c < g.n_cols; ++c)
      dsm.at(r, c) = 100.0 + step * std::floor(c / terrace_cols) +
                     (noise_sd > 0 ? gauss(rng) : 0.0);
  return dsm;
}

BitMask block_mask(const GridGeoref& g, int r0, int c0, int r1, int c1) {
  BitMask m(g);
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) m.set(r, c, true);
  return m;
}

// Canonical relabeling by scan order of first contact, for comparing two
// labelings up to renaming.
std::vector<std::int32_t> canonical(const std::vector<std::int32_t>& labels) {
  std::vector<std::int32_t> out(labels.size(), 0);
  std::vector<std::int32_t> remap;
  std::int32_t next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 0) continue;
    const auto l = static_cast<std::size_t>(labels[i]);
    if (remap.size() < l + 1) remap.resize(l + 1, 0);
    if (remap[l] == 0) remap[l] = ++next;
    out[i] = remap[l];
  }
  return out;
}

}  // namespace

TEST_SUITE("werm") {

TEST_CASE("labeling adjacency definition") {
  const GridGeoref g = make_georef(4, 4);
  const RasterGrid dsm = constant_dsm(g, 1.0);
  BitMask m(g);
  m.set(1, 1, true);
  m.set(2, 2, true);
  WermParams params;
  params.connectivity = 8;
  CHECK(label_segments(m, dsm, params).segments.size() == 1);
  params.connectivity = 4;
  CHECK(label_segments(m, dsm, params).segments.size() == 2);
}

TEST_CASE("labeling of an empty mask") {
  const GridGeoref g = make_georef(5, 5);
  const Labeling lab = label_segments(BitMask(g), constant_dsm(g, 0.0), WermParams{});
  CHECK(lab.segments.empty());
  CHECK(lab.segment_cells.empty());
}

TEST_CASE("labeling matches the BFS flood-fill oracle on random masks") {
  for (int trial = 0; trial < 10; ++trial) {
    const BitMask m = testutil::random_mask(200, 200, 0.35 + 0.04 * trial, 600 + trial);
    const RasterGrid dsm = constant_dsm(m.georef, 3.0);
    for (int conn : {4, 8}) {
      WermParams params;
      params.connectivity = conn;
      const Labeling lab = label_segments(m, dsm, params);
      const auto oracle = reference::label_components(m, conn);
      REQUIRE(canonical(lab.labels) == canonical(oracle));
      // stats: cell counts sum to mask popcount, cells lists agree with labels
      std::uint64_t total = 0;
      for (const WaterSegment& s : lab.segments) {
        total += s.cell_count;
        CHECK(lab.segment_cells[s.id - 1].size() == s.cell_count);
        CHECK(s.area == doctest::Approx(s.cell_count * 0.25));
      }
      CHECK(total == m.popcount());
    }
  }
}

TEST_CASE("segment bbox and elevation stats") {
  const GridGeoref g = make_georef(6, 8);
  RasterGrid dsm = constant_dsm(g, 10.0);
  dsm.at(2, 3) = 12.0;
  dsm.at(3, 4) = dsm.nodata;
  BitMask m = block_mask(g, 2, 3, 3, 5);
  WermParams params;
  params.percentile = 0.5;
  const Labeling lab = label_segments(m, dsm, params);
  REQUIRE(lab.segments.size() == 1);
  const WaterSegment& s = lab.segments[0];
  CHECK(s.cell_count == 6);
  CHECK(s.bbox.row_min == 2);
  CHECK(s.bbox.row_max == 3);
  CHECK(s.bbox.col_min == 3);
  CHECK(s.bbox.col_max == 5);
  // five non-nodata values {10,10,10,10,12}; median by nearest rank is 10
  CHECK(s.elevation == 10.0);
}

TEST_CASE("nearest-rank percentile") {
  SUBCASE("spec example: 10th percentile of 1..10 is 1") {
    std::vector<double> v{10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
    CHECK(segment_elevation(v, 0.10) == 1.0);
  }
  SUBCASE("empty input has no elevation") {
    CHECK(!segment_elevation({}, 0.10).has_value());
  }
  SUBCASE("median of four values is the second") {
    CHECK(segment_elevation({4.0, 1.0, 3.0, 2.0}, 0.5) == 2.0);
  }
  SUBCASE("matches the full-sort oracle on random values") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    std::uniform_real_distribution<double> up(0.01, 0.99);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> v(1000);
      for (double& x : v) x = u(rng);
      const double p = up(rng);
      CHECK(segment_elevation(v, p) == reference::percentile(v, p));
    }
  }
}

TEST_CASE("werm pass merges a flat plateau around a large seed") {
  const GridGeoref g = make_georef(40, 40);
  const RasterGrid dsm = constant_dsm(g, 50.0);
  // 20x25 seed = 500 cells = 125 m^2 at 0.5 m cells; use min_area 100 m^2
  const BitMask seed = block_mask(g, 10, 10, 29, 34);
  WermParams params;
  params.min_area = 100.0;
  const Labeling lab = label_segments(seed, dsm, params);
  const BitMask out = werm_pass(seed, lab, dsm, params);
  CHECK(out.popcount() == g.cells());  // whole constant plateau joins
}

TEST_CASE("werm pass skips segments below the area threshold") {
  const GridGeoref g = make_georef(40, 40);
  const RasterGrid dsm = constant_dsm(g, 50.0);
  const BitMask seed = block_mask(g, 10, 10, 12, 12);  // 9 cells, 2.25 m^2
  WermParams params;                                   // min_area 500 m^2
  const Labeling lab = label_segments(seed, dsm, params);
  const BitMask out = werm_pass(seed, lab, dsm, params);
  CHECK(out.bits == seed.bits);
}

TEST_CASE("werm pass on terraces matches the constrained flood-fill oracle") {
  const GridGeoref g = make_georef(60, 90);
  const RasterGrid dsm = terraced_dsm(g, 0.5, 30.0, 0.0, 0);
  // seed on the middle terrace (columns 30..59, elevation 100.5)
  const BitMask seed = block_mask(g, 20, 35, 40, 55);
  WermParams params;
  params.min_area = 50.0;
  const Labeling lab = label_segments(seed, dsm, params);
  const BitMask out = werm_pass(seed, lab, dsm, params);
  const BitMask oracle = reference::werm_pass(seed, lab, dsm, params);
  REQUIRE(out.bits == oracle.bits);
  // exactly the middle terrace plus the seed
  for (int r = 0; r < g.n_rows; ++r)
    for (int c = 0; c < g.n_cols; ++c)
      CHECK(out.at(r, c) == (c >= 30 && c < 60));
}

TEST_CASE("werm pass matches the oracle on random noisy scenes") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const GridGeoref g = make_georef(80, 80);
    const RasterGrid dsm = terraced_dsm(g, 0.5, 20.0, 0.08, 700 + trial);
    const BitMask seed = testutil::random_mask(80, 80, 0.08, 800 + trial);
    WermParams params;
    params.min_area = 5.0;
    params.connectivity = (trial % 2) ? 4 : 8;
    const Labeling lab = label_segments(seed, dsm, params);
    const BitMask out = werm_pass(seed, lab, dsm, params);
    const BitMask oracle = reference::werm_pass(seed, lab, dsm, params);
    REQUIRE(out.bits == oracle.bits);
    CHECK(testutil::is_subset(seed, out));  // strictly additive
  }
}

TEST_CASE("added cells stay within the elevation slice of their segment") {
  const GridGeoref g = make_georef(50, 50);
  const RasterGrid dsm = terraced_dsm(g, 0.3, 10.0, 0.15, 71);
  const BitMask seed = block_mask(g, 20, 20, 33, 33);  // single eligible segment
  WermParams params;
  params.min_area = 40.0;
  const Labeling lab = label_segments(seed, dsm, params);
  REQUIRE(lab.segments.size() == 1);
  const double w = *lab.segments[0].elevation;
  const BitMask out = werm_pass(seed, lab, dsm, params);
  for (std::size_t i = 0; i < out.bits.size(); ++i) {
    if (!out.bits[i] || seed.bits[i]) continue;
    CHECK(std::fabs(dsm.values[i] - w) <= params.elevation_range);
  }
}

TEST_CASE("nodata seed cells conduct connectivity") {
  const GridGeoref g = make_georef(10, 30);
  RasterGrid dsm(g);  // all nodata
  for (int c = 20; c < 30; ++c)
    for (int r = 0; r < 10; ++r) dsm.at(r, c) = 10.0;  // plateau on the right
  dsm.at(5, 2) = 10.0;  // one valued cell inside the seed
  // seed spans columns 0..19 at row 5, touching the plateau at column 20
  BitMask seed(g);
  for (int c = 0; c < 20; ++c) seed.set(5, c, true);
  WermParams params;
  params.min_area = 1.0;
  const Labeling lab = label_segments(seed, dsm, params);
  REQUIRE(lab.segments.size() == 1);
  CHECK(lab.segments[0].elevation == 10.0);
  const BitMask out = werm_pass(seed, lab, dsm, params);
  CHECK(out.popcount() == seed.popcount() + 100);  // whole plateau merged
}

TEST_CASE("run_werm on empty seeds") {
  const GridGeoref g = make_georef(10, 10);
  const WermResult res = run_werm(BitMask(g), constant_dsm(g, 1.0), WermParams{});
  CHECK(res.water.popcount() == 0);
  CHECK(res.labeling.segments.empty());
}

TEST_CASE("a converged mask is a fixed point") {
  const GridGeoref g = make_georef(50, 50);
  const RasterGrid dsm = terraced_dsm(g, 0.5, 25.0, 0.0, 0);
  const BitMask seed = block_mask(g, 10, 5, 40, 20);
  WermParams params;
  params.min_area = 25.0;
  params.passes = 1;
  const WermResult once = run_werm(seed, dsm, params);
  const BitMask again = werm_pass(once.water, once.labeling, dsm, params);
  CHECK(again.bits == once.water.bits);
  params.passes = 2;
  const WermResult twice = run_werm(seed, dsm, params);
  CHECK(twice.water.bits == once.water.bits);
}

TEST_CASE("lake with dense margin: seeds on the center, merge recovers the margin") {
  // DSM: dense margin returns at the water surface (42); the open-water
  // center keeps only sparse returns (mostly nodata); land at 45 with noise.
  const GridGeoref g = make_georef(60, 60);
  std::mt19937_64 rng(81);
  std::normal_distribution<double> gauss(0.0, 0.2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RasterGrid dsm(g);
  BitMask truth(g);
  const double cx = 15.0, cy = 15.0, radius = 10.0;  // meters, 0.5 m cells
  for (int r = 0; r < g.n_rows; ++r) {
    for (int c = 0; c < g.n_cols; ++c) {
      const double d = std::hypot(g.cell_x(c) - cx, g.cell_y(r) - cy);
      if (d <= radius) {
        truth.set(r, c, true);
        if (d > radius - 2.0)
          dsm.at(r, c) = 42.0;  // dense margin returns
        else if (u(rng) < 0.05)
          dsm.at(r, c) = 42.0 + 0.02 * (2.0 * u(rng) - 1.0);  // sparse hits
      } else {
        dsm.at(r, c) = 45.0 + gauss(rng);
      }
    }
  }
  // seeds: the low-density center, reaching just into the dense margin
  BitMask seed(g);
  for (int r = 0; r < g.n_rows; ++r)
    for (int c = 0; c < g.n_cols; ++c)
      if (std::hypot(g.cell_x(c) - cx, g.cell_y(r) - cy) <= radius - 1.8)
        seed.set(r, c, true);
  WermParams params;
  params.min_area = 50.0;
  const WermResult res = run_werm(seed, dsm, params);
  CHECK(res.water.bits == truth.bits);
}

TEST_CASE("single-pass nesting in ER and MS at fixed elevations") {
  for (int trial = 0; trial < 6; ++trial) {
    const GridGeoref g = make_georef(70, 70);
    const RasterGrid dsm = terraced_dsm(g, 0.25, 14.0, 0.1, 900 + trial);
    const BitMask seed = testutil::random_mask(70, 70, 0.1, 950 + trial);
    WermParams params;
    params.min_area = 10.0;
    const Labeling lab = label_segments(seed, dsm, params);

    params.elevation_range = 0.05;
    const BitMask er1 = werm_pass(seed, lab, dsm, params);
    params.elevation_range = 0.10;
    const BitMask er2 = werm_pass(seed, lab, dsm, params);
    params.elevation_range = 0.15;
    const BitMask er3 = werm_pass(seed, lab, dsm, params);
    CHECK(testutil::is_subset(er1, er2));
    CHECK(testutil::is_subset(er2, er3));

    params.elevation_range = 0.10;
    params.min_area = 250.0;
    const BitMask ms_high = werm_pass(seed, lab, dsm, params);
    params.min_area = 125.0;
    const BitMask ms_mid = werm_pass(seed, lab, dsm, params);
    params.min_area = 25.0;
    const BitMask ms_low = werm_pass(seed, lab, dsm, params);
    CHECK(testutil::is_subset(ms_high, ms_mid));
    CHECK(testutil::is_subset(ms_mid, ms_low));
  }
}

TEST_CASE("pass monotonicity") {
  const GridGeoref g = make_georef(60, 60);
  const RasterGrid dsm = terraced_dsm(g, 0.2, 12.0, 0.12, 99);
  const BitMask seed = testutil::random_mask(60, 60, 0.12, 101);
  WermParams params;
  params.min_area = 8.0;
  BitMask mask = seed;
  for (int pass = 0; pass < 3; ++pass) {
    const Labeling lab = label_segments(mask, dsm, params);
    const BitMask next = werm_pass(mask, lab, dsm, params);
    CHECK(testutil::is_subset(mask, next));
    mask = next;
  }
}

TEST_CASE("parameter validation") {
  WermParams params;
  params.elevation_range = 0.0;
  CHECK_THROWS_AS(params.validate(), input_error);
  params = WermParams{};
  params.percentile = 1.0;
  CHECK_THROWS_AS(params.validate(), input_error);
  params = WermParams{};
  params.connectivity = 6;
  CHECK_THROWS_AS(params.validate(), input_error);
  params = WermParams{};
  params.passes = 0;
  CHECK_THROWS_AS(params.validate(), input_error);
}

}  // TEST_SUITE
