#include "watermap/ndwi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace watermap {

RasterGrid ndwi(const RasterGrid& green, const RasterGrid& nir) {
  require_same_georef(green.georef, nir.georef, "ndwi");
  RasterGrid out(green.georef, kDefaultNodata);
  const std::size_t n = out.values.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    const double g = green.values[i];
    const double r = nir.values[i];
    if (green.is_nodata(g) || nir.is_nodata(r)) continue;
    const double denom = g + r;
    if (denom == 0.0) continue;
    out.values[i] = (g - r) / denom;
  }
  return out;
}

BitMask threshold_map(const RasterGrid& index, double t) {
  BitMask out(index.georef);
  const std::size_t n = index.values.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    const double v = index.values[i];
    out.bits[i] = (!index.is_nodata(v) && v >= t) ? 1 : 0;
  }
  return out;
}

namespace {

struct BinnedCounts {
  // water_at[i] / land_at[i]: valid cells whose largest passing threshold
  // index is i, split by truth class.
  std::vector<std::uint64_t> water_at, land_at;
  std::uint64_t never_water = 0, never_land = 0;  // nodata or below all thresholds
  std::uint64_t valid = 0;                        // non-nodata index cells
  std::uint64_t total = 0;

  explicit BinnedCounts(int steps) : water_at(steps, 0), land_at(steps, 0) {}

  void merge(const BinnedCounts& o) {
    for (std::size_t i = 0; i < water_at.size(); ++i) {
      water_at[i] += o.water_at[i];
      land_at[i] += o.land_at[i];
    }
    never_water += o.never_water;
    never_land += o.never_land;
    valid += o.valid;
    total += o.total;
  }
};

// Index of the largest threshold t_i with v >= t_i, or -1. The bin estimate
// is nudged until it agrees exactly with direct comparison against at(i).
int bin_of(double v, const ThresholdSearch& search) {
  const double dt = (search.t_max - search.t_min) / (search.steps - 1);
  int i = static_cast<int>(std::floor((v - search.t_min) / dt));
  i = std::clamp(i, -1, search.steps - 1);
  while (i + 1 < search.steps && v >= search.at(i + 1)) ++i;
  while (i >= 0 && v < search.at(i)) --i;
  return i;
}

void bin_cells(BinnedCounts& bc, const RasterGrid& index, const BitMask& truth,
               const ThresholdSearch& search, const CellRect& rect) {
  for (int r = rect.row_min; r <= rect.row_max; ++r) {
    for (int c = rect.col_min; c <= rect.col_max; ++c) {
      const std::size_t i = index.idx(r, c);
      ++bc.total;
      const double v = index.values[i];
      const bool is_water = truth.bits[i] != 0;
      if (index.is_nodata(v)) {
        ++(is_water ? bc.never_water : bc.never_land);
        continue;
      }
      ++bc.valid;
      const int bin = bin_of(v, search);
      if (bin < 0)
        ++(is_water ? bc.never_water : bc.never_land);
      else
        ++(is_water ? bc.water_at : bc.land_at)[bin];
    }
  }
}

// Best threshold by overall accuracy; ties toward the larger threshold.
ThresholdResult best_threshold(const BinnedCounts& bc, const ThresholdSearch& search) {
  const std::uint64_t truth_water =
      bc.never_water +
      std::accumulate(bc.water_at.begin(), bc.water_at.end(), std::uint64_t{0});
  std::uint64_t pred_w = 0, pred_l = 0;  // water predictions at index i, by truth
  std::uint64_t best_correct = 0;
  int best_i = -1;
  for (int i = search.steps - 1; i >= 0; --i) {
    pred_w += bc.water_at[i];
    pred_l += bc.land_at[i];
    const std::uint64_t tp = pred_w;
    const std::uint64_t fp = pred_l;
    const std::uint64_t fn = truth_water - tp;
    const std::uint64_t tn = bc.total - tp - fp - fn;
    if (best_i < 0 || tp + tn > best_correct) {
      best_correct = tp + tn;
      best_i = i;
    }
  }
  return ThresholdResult{search.at(best_i),
                         static_cast<double>(best_correct) / static_cast<double>(bc.total)};
}

}  // namespace

ThresholdResult optimal_threshold(const RasterGrid& index, const BitMask& truth,
                                  const ThresholdSearch& search) {
  search.validate();
  require_same_georef(index.georef, truth.georef, "optimal_threshold");

  const int rows = index.georef.n_rows;
  const int cols = index.georef.n_cols;

  BinnedCounts bc(search.steps);
#pragma omp parallel
  {
    BinnedCounts local(search.steps);
#pragma omp for schedule(static) nowait
    for (int r = 0; r < rows; ++r)
      bin_cells(local, index, truth, search, CellRect{r, 0, r, cols - 1});
#pragma omp critical
    bc.merge(local);
  }

  if (bc.valid == 0) throw input_error("optimal_threshold: index raster is all nodata");
  return best_threshold(bc, search);
}

BitMask local_optimal_map(const RasterGrid& index, const BitMask& truth,
                          const Tiling& tiling, const ThresholdSearch& search,
                          std::vector<ThresholdResult>* per_tile) {
  search.validate();
  tiling.validate(index.georef);
  require_same_georef(index.georef, truth.georef, "local_optimal_map");

  BitMask out(index.georef);
  std::vector<ThresholdResult> results(tiling.count());

#pragma omp parallel for schedule(dynamic)
  for (int tile = 0; tile < tiling.count(); ++tile) {
    const CellRect rect = tiling.rect(index.georef, tile);
    BinnedCounts bc(search.steps);
    bin_cells(bc, index, truth, search, rect);

    ThresholdResult res;
    if (bc.valid == 0) {
      // All-nodata tile: all-non-water map; record an out-of-range threshold.
      res.threshold = search.t_max + 1.0;
      res.overall_accuracy =
          static_cast<double>(bc.never_land) / static_cast<double>(bc.total);
    } else {
      res = best_threshold(bc, search);
      for (int r = rect.row_min; r <= rect.row_max; ++r) {
        for (int c = rect.col_min; c <= rect.col_max; ++c) {
          const std::size_t i = index.idx(r, c);
          const double v = index.values[i];
          out.bits[i] = (!index.is_nodata(v) && v >= res.threshold) ? 1 : 0;
        }
      }
    }
    results[tile] = res;
  }

  if (per_tile) *per_tile = std::move(results);
  return out;
}

}  // namespace watermap
