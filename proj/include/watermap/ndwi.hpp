// ndwi.hpp
// NDWI baseline: (G - NIR) / (G + NIR) water index and optimal-threshold
// mapping, globally or per tile, tuned against a truth mask.

#pragma once

#include "watermap/tiling.hpp"

namespace watermap {

struct ThresholdSearch {
  double t_min = -1.0;
  double t_max = 1.0;
  int steps = 201;

  void validate() const {
    if (!(t_min < t_max)) throw input_error("threshold search: t_min must be < t_max");
    if (steps < 2) throw input_error("threshold search: steps must be >= 2");
  }
  double at(int i) const { return t_min + i * (t_max - t_min) / (steps - 1); }
};

// Cell-wise water index; nodata where either band is nodata or G + NIR = 0.
RasterGrid ndwi(const RasterGrid& green, const RasterGrid& nir);

// Water iff value >= t and not nodata.
BitMask threshold_map(const RasterGrid& index, double t);

struct ThresholdResult {
  double threshold = 0.0;
  double overall_accuracy = 0.0;
};

// Exhaustive scan of the uniform threshold grid, maximizing overall accuracy
// against the truth mask; ties break toward the larger threshold.
ThresholdResult optimal_threshold(const RasterGrid& index, const BitMask& truth,
                                  const ThresholdSearch& search = {});

// Per-tile optimal thresholds stitched into one mask. Tiles with no valid
// index cells map to all-non-water. Optionally reports each tile's choice;
// all-nodata tiles report threshold above t_max with accuracy over the tile.
BitMask local_optimal_map(const RasterGrid& index, const BitMask& truth,
                          const Tiling& tiling, const ThresholdSearch& search = {},
                          std::vector<ThresholdResult>* per_tile = nullptr);

}  // namespace watermap
