// werm.hpp
// Water elevation-based region merging. Seed segments whose area passes the
// eligibility threshold are extended to every region of the DSM lying within
// +-elevation_range of the segment's representative elevation and connected
// to it; the merge is strictly additive and runs for a fixed pass count.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "watermap/raster.hpp"

namespace watermap {

struct WermParams {
  double elevation_range = 0.10;  // ER: +- meters around the segment elevation
  double min_area = 500.0;        // MS: m^2 a segment needs to be extended
  double percentile = 0.10;       // representative-elevation percentile
  int passes = 2;
  int connectivity = 8;           // 4 or 8

  void validate() const;
};

struct CellRect {
  int row_min = 0;
  int col_min = 0;
  int row_max = -1;  // inclusive; empty when row_max < row_min
  int col_max = -1;
};

struct WaterSegment {
  int id = 0;                  // positive label, assigned in scan order
  std::uint64_t cell_count = 0;
  double area = 0.0;           // cell_count * cell_size^2
  std::optional<double> elevation;  // empty when no segment cell has a DSM value
  CellRect bbox;
};

struct Labeling {
  GridGeoref georef;
  std::vector<std::int32_t> labels;  // 0 background, 1..K segment ids
  std::vector<WaterSegment> segments;  // segments[i].id == i + 1
  std::vector<std::vector<std::uint32_t>> segment_cells;  // linear cell indices
};

// Connected components of the mask with segment stats taken against the DSM.
Labeling label_segments(const BitMask& mask, const RasterGrid& dsm,
                        const WermParams& params);

// Nearest-rank percentile over the non-nodata values; nullopt when none.
// k = ceil(percentile * m), 1-indexed over the sorted values.
std::optional<double> segment_elevation(std::vector<double> values, double percentile);

// One merge pass. Output is always a superset of the input mask.
BitMask werm_pass(const BitMask& water, const Labeling& labeling,
                  const RasterGrid& dsm, const WermParams& params);

struct WermResult {
  BitMask water;
  Labeling labeling;  // labeling of the final mask, final elevations
};

WermResult run_werm(const BitMask& seeds, const RasterGrid& dsm, const WermParams& params);

}  // namespace watermap
