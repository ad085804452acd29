// tiling.hpp
// Near-equal partition of a grid into tiles; remainder cells go to the last
// tile row/column. Tile ids are row-major over the tile grid.

#pragma once

#include "watermap/raster.hpp"
#include "watermap/werm.hpp"

namespace watermap {

struct Tiling {
  int n_tiles_x = 1;
  int n_tiles_y = 1;

  int count() const { return n_tiles_x * n_tiles_y; }

  void validate(const GridGeoref& g) const {
    if (n_tiles_x < 1 || n_tiles_y < 1) throw input_error("tiling: tile counts must be >= 1");
    if (n_tiles_x > g.n_cols || n_tiles_y > g.n_rows)
      throw input_error("tiling: more tiles than cells");
  }

  CellRect rect(const GridGeoref& g, int tile_id) const {
    const int tx = tile_id % n_tiles_x;
    const int ty = tile_id / n_tiles_x;
    const int w = g.n_cols / n_tiles_x;
    const int h = g.n_rows / n_tiles_y;
    CellRect r;
    r.col_min = tx * w;
    r.col_max = (tx == n_tiles_x - 1) ? g.n_cols - 1 : (tx + 1) * w - 1;
    r.row_min = ty * h;
    r.row_max = (ty == n_tiles_y - 1) ? g.n_rows - 1 : (ty + 1) * h - 1;
    return r;
  }
};

}  // namespace watermap
