// raster.hpp
// Georeferenced grid model: elevation rasters and boolean masks.
// Rows are stored north-first (row 0 is the northernmost row), matching the
// ESRI ASCII grid layout; the georef origin is the lower-left corner.

#pragma once

#include <cstdint>
#include <vector>

#include "watermap/point.hpp"

namespace watermap {

inline constexpr double kDefaultNodata = -9999.0;

struct GridGeoref {
  double x_origin = 0.0;  // lower-left corner, meters
  double y_origin = 0.0;
  double cell_size = 1.0;
  int n_cols = 1;
  int n_rows = 1;

  bool operator==(const GridGeoref&) const = default;

  std::size_t cells() const { return static_cast<std::size_t>(n_cols) * n_rows; }

  // Cell-center world coordinates.
  double cell_x(int col) const { return x_origin + (col + 0.5) * cell_size; }
  double cell_y(int row) const { return y_origin + (n_rows - row - 0.5) * cell_size; }

  // World coordinate -> cell index, clamped to the grid. Points on the
  // east/north outer edge fall into the last column/row.
  int col_of(double x) const {
    int c = static_cast<int>((x - x_origin) / cell_size);
    if (c < 0) c = 0;
    if (c >= n_cols) c = n_cols - 1;
    return c;
  }
  int row_of(double y) const {
    int r_from_south = static_cast<int>((y - y_origin) / cell_size);
    int r = n_rows - 1 - r_from_south;
    if (r < 0) r = 0;
    if (r >= n_rows) r = n_rows - 1;
    return r;
  }

  void validate() const {
    if (cell_size <= 0.0) throw input_error("grid cell_size must be > 0");
    if (n_cols < 1 || n_rows < 1) throw input_error("grid must have at least one cell");
  }
};

struct RasterGrid {
  GridGeoref georef;
  double nodata = kDefaultNodata;
  std::vector<double> values;  // row-major, row 0 = north

  RasterGrid() = default;
  RasterGrid(GridGeoref g, double nodata_value = kDefaultNodata)
      : georef(g), nodata(nodata_value), values(g.cells(), nodata_value) {}

  double& at(int row, int col) { return values[idx(row, col)]; }
  double at(int row, int col) const { return values[idx(row, col)]; }
  std::size_t idx(int row, int col) const {
    return static_cast<std::size_t>(row) * georef.n_cols + col;
  }
  bool is_nodata(double v) const { return v == nodata; }
  bool empty_at(int row, int col) const { return is_nodata(at(row, col)); }
};

struct BitMask {
  GridGeoref georef;
  std::vector<std::uint8_t> bits;  // 0 or 1, row-major, row 0 = north

  BitMask() = default;
  explicit BitMask(GridGeoref g, bool fill = false)
      : georef(g), bits(g.cells(), fill ? 1 : 0) {}

  bool at(int row, int col) const { return bits[idx(row, col)] != 0; }
  void set(int row, int col, bool v) { bits[idx(row, col)] = v ? 1 : 0; }
  std::size_t idx(int row, int col) const {
    return static_cast<std::size_t>(row) * georef.n_cols + col;
  }

  std::uint64_t popcount() const {
    std::uint64_t n = 0;
    for (std::uint8_t b : bits) n += b;
    return n;
  }
};

inline void require_same_georef(const GridGeoref& a, const GridGeoref& b, const char* what) {
  if (!(a == b)) throw input_error(std::string(what) + ": georef mismatch");
}

// True (water / building / valid) where the grid holds a value > 0 that is
// not the nodata sentinel.
BitMask mask_from_grid(const RasterGrid& grid);

// 1/0 raster for serialization of masks.
RasterGrid grid_from_mask(const BitMask& mask, double nodata_value = kDefaultNodata);

}  // namespace watermap
