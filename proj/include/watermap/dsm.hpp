// dsm.hpp
// Digital surface model construction: bins a point cloud into a regular grid
// and reduces per-cell elevations with min/max/mean.

#pragma once

#include <span>
#include <string>

#include "watermap/point.hpp"
#include "watermap/raster.hpp"

namespace watermap {

enum class Aggregator { min, max, mean };

Aggregator aggregator_from_string(const std::string& name);
const char* to_string(Aggregator a);

// Grid extent is the point bounding box snapped outward to multiples of
// cell_size; cells with no points hold nodata. Errors on an empty stream.
RasterGrid build_dsm(std::span<const Point3> points, double cell_size,
                     Aggregator aggregator = Aggregator::max,
                     double nodata_value = kDefaultNodata);

// Bit set exactly where the DSM cell holds a value.
BitMask occupancy(const RasterGrid& dsm);

}  // namespace watermap
