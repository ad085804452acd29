// reference.hpp
// Serial reference implementations kept for testing and benchmarking. These
// take the straightforward route (direct window scans, flood fills, full
// sorts, per-threshold rescans) independently of the optimized kernels in
// the main library, and are linked only by the test and bench targets.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "watermap/dsm.hpp"
#include "watermap/eval.hpp"
#include "watermap/ndwi.hpp"
#include "watermap/seed.hpp"
#include "watermap/werm.hpp"

namespace watermap::reference {

// Hash-bucket DSM: one bucket per cell, aggregated after collecting all z.
RasterGrid build_dsm(std::span<const Point3> points, double cell_size,
                     Aggregator aggregator, double nodata_value = kDefaultNodata);

// Direct sliding-window count per cell, bound recomputed per window.
BitMask classify_seeds(const BitMask& occ, const DensityStats& stats,
                       const SeedParams& params);

// All-pairs distance test against every building cell.
BitMask apply_building_buffer(const BitMask& seeds, const BitMask& buildings,
                              double radius);

// Binomial CDF by the multiplicative pmf recurrence.
double binomial_cdf(int k, int n, double p);
int binomial_lower_quantile(int n, double p, double alpha);

// BFS flood-fill labeling; labels in scan order of first contact.
std::vector<std::int32_t> label_components(const BitMask& mask, int connectivity);

// Full-sort nearest-rank percentile.
std::optional<double> percentile(std::vector<double> values, double p);

// Constrained flood fill: grows each eligible segment from its cells across
// neighbors that are segment cells or DSM cells within +-ER of the segment
// elevation; the union with the input mask is the pass result.
BitMask werm_pass(const BitMask& water, const Labeling& labeling,
                  const RasterGrid& dsm, const WermParams& params);

// Evaluates every threshold of the search grid by rescanning the raster.
ThresholdResult optimal_threshold(const RasterGrid& index, const BitMask& truth,
                                  const ThresholdSearch& search);

// Cell-by-cell confusion counting.
EvalReport confusion(const BitMask& pred, const BitMask& truth,
                     const BitMask* valid = nullptr);

}  // namespace watermap::reference
