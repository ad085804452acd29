// ascii_grid.hpp
// ESRI ASCII grid (.asc) reader/writer. This is the interchange format for
// every raster product, truth mask, building mask and NDWI band input.

#pragma once

#include <filesystem>
#include <iosfwd>

#include "watermap/raster.hpp"

namespace watermap {

RasterGrid read_ascii_grid(const std::filesystem::path& path);
RasterGrid read_ascii_grid(std::istream& in, const std::string& name);

// precision 0 writes the shortest representation that parses back to the
// exact same double; otherwise the given number of significant digits.
void write_ascii_grid(const RasterGrid& grid, const std::filesystem::path& path,
                      int precision = 0);
void write_ascii_grid(const RasterGrid& grid, std::ostream& out, int precision = 0);

}  // namespace watermap
