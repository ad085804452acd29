// products.hpp
// Final artifacts: per-water-body elevation raster, hydro-flattened DEM and
// the line-delimited segment report.

#pragma once

#include <filesystem>
#include <iosfwd>

#include "watermap/werm.hpp"

namespace watermap {

// Each water cell carries its segment's elevation; everything else nodata.
RasterGrid water_elevation_raster(const Labeling& labeling,
                                  double nodata_value = kDefaultNodata);

// Copy of the DSM with every water cell (including nodata water cells)
// replaced by its segment elevation; land cells are untouched.
RasterGrid hydro_flatten(const RasterGrid& dsm, const Labeling& labeling);

// One JSON object per line, keys in fixed order, sorted by descending area
// (ties by ascending id). Bbox carries both cell indices and world extents.
void write_segment_report(const Labeling& labeling, std::ostream& out);
void write_segment_report(const Labeling& labeling, const std::filesystem::path& path);

// Inverse of write_segment_report (world extents are recomputed, not stored).
std::vector<WaterSegment> read_segment_report(std::istream& in);
std::vector<WaterSegment> read_segment_report(const std::filesystem::path& path);

}  // namespace watermap
