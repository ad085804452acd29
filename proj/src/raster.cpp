#include "watermap/raster.hpp"

namespace watermap {

BitMask mask_from_grid(const RasterGrid& grid) {
  BitMask mask(grid.georef);
  const std::size_t n = grid.values.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    const double v = grid.values[i];
    mask.bits[i] = (!grid.is_nodata(v) && v > 0.0) ? 1 : 0;
  }
  return mask;
}

RasterGrid grid_from_mask(const BitMask& mask, double nodata_value) {
  RasterGrid grid(mask.georef, nodata_value);
  const std::size_t n = mask.bits.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
    grid.values[i] = mask.bits[i] ? 1.0 : 0.0;
  return grid;
}

}  // namespace watermap
