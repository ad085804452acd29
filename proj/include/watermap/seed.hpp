// seed.hpp
// Initial water pixel classification. A cell is a water seed when its
// sliding-window occupancy count falls below the lower confidence bound of
// the binomial count distribution B(N, P/2) expected over land.

#pragma once

#include "watermap/raster.hpp"

namespace watermap {

struct SeedParams {
  int window_side = 9;         // odd, >= 3
  double z_score = 2.0;        // confidence level Z
  bool density_halving = true; // test against P/2 instead of P
  double building_buffer_radius = 10.0;  // meters, used only with a building mask
  bool exact_binomial = false; // exact quantile instead of the normal bound
  bool hull_extent = false;    // density denominator over the occupied data hull

  void validate() const;
};

struct DensityStats {
  double p_global = 0.0;      // average occupancy P over the chosen extent
  double p_test = 0.0;        // P/2 when halving, else P
  double threshold_real = 0.0;  // lower bound for a full window_side^2 window
};

// Average occupancy and the full-window decision threshold. Errors with
// "empty scene" when no cell is occupied.
DensityStats density_stats(const BitMask& occ, const SeedParams& params);

// Border windows are clipped to the grid and tested against the bound for
// their effective size. Decisions use strict '<' against the real-valued
// normal bound, or '<=' against the exact binomial quantile.
BitMask classify_seeds(const BitMask& occ, const DensityStats& stats,
                       const SeedParams& params);

// Clears seed bits within the given Euclidean distance of any building cell
// center. Radius in meters.
BitMask apply_building_buffer(const BitMask& seeds, const BitMask& buildings,
                              double radius);

}  // namespace watermap
