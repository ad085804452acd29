#include "watermap/seed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "watermap/binomial.hpp"

namespace watermap {

void SeedParams::validate() const {
  if (window_side < 3 || window_side % 2 == 0)
    throw input_error("seed: window_side must be odd and >= 3");
  if (!(z_score > 0.0)) throw input_error("seed: z_score must be > 0");
  if (building_buffer_radius < 0.0)
    throw input_error("seed: building_buffer_radius must be >= 0");
}

DensityStats density_stats(const BitMask& occ, const SeedParams& params) {
  params.validate();
  const int rows = occ.georef.n_rows;
  const int cols = occ.georef.n_cols;

  std::uint64_t pop = 0;
  int r_min = rows, r_max = -1, c_min = cols, c_max = -1;
  for (int r = 0; r < rows; ++r) {
    const std::uint8_t* row = occ.bits.data() + occ.idx(r, 0);
    for (int c = 0; c < cols; ++c) {
      if (!row[c]) continue;
      ++pop;
      if (r < r_min) r_min = r;
      if (r > r_max) r_max = r;
      if (c < c_min) c_min = c;
      if (c > c_max) c_max = c;
    }
  }
  if (pop == 0) throw input_error("density_stats: empty scene (no occupied cells)");

  const std::uint64_t denom =
      params.hull_extent
          ? static_cast<std::uint64_t>(r_max - r_min + 1) * (c_max - c_min + 1)
          : occ.georef.cells();

  DensityStats stats;
  stats.p_global = static_cast<double>(pop) / static_cast<double>(denom);
  stats.p_test = params.density_halving ? stats.p_global / 2.0 : stats.p_global;
  stats.threshold_real =
      normal_lower_bound(params.window_side * params.window_side, stats.p_test, params.z_score);
  return stats;
}

BitMask classify_seeds(const BitMask& occ, const DensityStats& stats,
                       const SeedParams& params) {
  params.validate();
  const int rows = occ.georef.n_rows;
  const int cols = occ.georef.n_cols;
  const int half = params.window_side / 2;
  const double p = stats.p_test;

  // Summed-area table of the occupancy bits; (rows+1) x (cols+1), zero edge.
  const std::size_t stride = static_cast<std::size_t>(cols) + 1;
  std::vector<std::uint32_t> sat((static_cast<std::size_t>(rows) + 1) * stride, 0);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    const std::uint8_t* src = occ.bits.data() + occ.idx(r, 0);
    std::uint32_t* dst = sat.data() + (static_cast<std::size_t>(r) + 1) * stride;
    std::uint32_t run = 0;
    for (int c = 0; c < cols; ++c) {
      run += src[c];
      dst[c + 1] = run;
    }
  }
#pragma omp parallel
  {
    // Column-chunk accumulation down the rows; chunks are disjoint.
#ifdef _OPENMP
    const int nt = omp_get_num_threads();
    const int tid = omp_get_thread_num();
#else
    const int nt = 1, tid = 0;
#endif
    const std::size_t per = (stride + nt - 1) / nt;
    const std::size_t c_lo = std::min(stride, tid * per);
    const std::size_t c_hi = std::min(stride, c_lo + per);
    for (int r = 1; r <= rows; ++r) {
      std::uint32_t* cur = sat.data() + static_cast<std::size_t>(r) * stride;
      const std::uint32_t* prev = cur - stride;
      for (std::size_t c = c_lo; c < c_hi; ++c) cur[c] += prev[c];
    }
  }

  // Decision thresholds per effective (clipped) window size.
  const int n_full = params.window_side * params.window_side;
  std::vector<double> normal_bound;
  std::vector<int> exact_quantile;
  if (!params.exact_binomial) {
    normal_bound.assign(n_full + 1, 0.0);
    for (int hh = 1; hh <= params.window_side; ++hh)
      for (int ww = 1; ww <= params.window_side; ++ww)
        normal_bound[hh * ww] = normal_lower_bound(hh * ww, p, params.z_score);
  } else {
    const double alpha = std_normal_cdf(-params.z_score);
    exact_quantile.assign(n_full + 1, 0);
    for (int hh = 1; hh <= params.window_side; ++hh)
      for (int ww = 1; ww <= params.window_side; ++ww)
        exact_quantile[hh * ww] = binomial_lower_quantile(hh * ww, p, alpha);
  }

  BitMask water(occ.georef);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    const int r0 = std::max(0, r - half);
    const int r1 = std::min(rows - 1, r + half);
    const std::uint32_t* top = sat.data() + static_cast<std::size_t>(r0) * stride;
    const std::uint32_t* bot = sat.data() + (static_cast<std::size_t>(r1) + 1) * stride;
    std::uint8_t* out = water.bits.data() + water.idx(r, 0);
    for (int c = 0; c < cols; ++c) {
      const int c0 = std::max(0, c - half);
      const int c1 = std::min(cols - 1, c + half);
      const std::uint32_t count = bot[c1 + 1] - bot[c0] - top[c1 + 1] + top[c0];
      const int n_w = (r1 - r0 + 1) * (c1 - c0 + 1);
      const bool is_water = params.exact_binomial
                                ? static_cast<int>(count) <= exact_quantile[n_w]
                                : count < normal_bound[n_w];
      out[c] = is_water ? 1 : 0;
    }
  }
  return water;
}

namespace {

constexpr double kFar = 1e30;

// Lower envelope of parabolas over the finite sites of f:
// d[q] = min_i ((q - i)^2 + f[i]). Cells without a finite site stay kFar.
void dt1d(const double* f, int n, double* d, int* v, double* z, int* sites) {
  int m = 0;
  for (int q = 0; q < n; ++q)
    if (f[q] < kFar) sites[m++] = q;
  if (m == 0) {
    std::fill(d, d + n, kFar);
    return;
  }
  int k = 0;
  v[0] = sites[0];
  z[0] = -kFar;
  z[1] = kFar;
  for (int si = 1; si < m; ++si) {
    const int q = sites[si];
    const double fq = f[q] + static_cast<double>(q) * q;
    double s;
    for (;;) {
      const int i = v[k];
      s = (fq - (f[i] + static_cast<double>(i) * i)) / (2.0 * (q - i));
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kFar;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

BitMask apply_building_buffer(const BitMask& seeds, const BitMask& buildings,
                              double radius) {
  require_same_georef(seeds.georef, buildings.georef, "apply_building_buffer");
  if (radius < 0.0) throw input_error("apply_building_buffer: radius must be >= 0");

  bool any = false;
  for (std::uint8_t b : buildings.bits)
    if (b) { any = true; break; }
  if (!any) return seeds;

  const int rows = seeds.georef.n_rows;
  const int cols = seeds.georef.n_cols;
  const std::size_t n = seeds.georef.cells();

  // Two-phase exact squared Euclidean distance transform, in cell units.
  std::vector<double> dist2(n);
#pragma omp parallel for schedule(static)
  for (int c = 0; c < cols; ++c) {
    // Nearest building row within the column, two linear sweeps.
    double d = kFar;
    for (int r = 0; r < rows; ++r) {
      d = buildings.bits[buildings.idx(r, c)] ? 0.0 : (d >= kFar ? kFar : d + 1.0);
      dist2[seeds.idx(r, c)] = d;
    }
    d = kFar;
    for (int r = rows - 1; r >= 0; --r) {
      const std::size_t i = seeds.idx(r, c);
      d = buildings.bits[i] ? 0.0 : (d >= kFar ? kFar : d + 1.0);
      if (d < dist2[i]) dist2[i] = d;
      const double g = dist2[i];
      dist2[i] = g >= kFar ? kFar : g * g;
    }
  }
#pragma omp parallel
  {
    std::vector<double> row_d(cols);
    std::vector<int> v(cols), sites(cols);
    std::vector<double> z(cols + 1);
#pragma omp for schedule(static)
    for (int r = 0; r < rows; ++r) {
      double* f = dist2.data() + seeds.idx(r, 0);
      dt1d(f, cols, row_d.data(), v.data(), z.data(), sites.data());
      std::copy(row_d.begin(), row_d.end(), f);
    }
  }

  const double cell = seeds.georef.cell_size;
  const double limit2 = radius * radius;
  BitMask out(seeds.georef);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    const bool buffered = dist2[i] < kFar && dist2[i] * cell * cell <= limit2;
    out.bits[i] = (seeds.bits[i] && !buffered) ? 1 : 0;
  }
  return out;
}

}  // namespace watermap
