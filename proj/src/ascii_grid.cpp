#include "watermap/ascii_grid.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace watermap {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool parse_double(std::string_view tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

void format_value(double v, int precision, std::string& out) {
  char buf[64];
  std::to_chars_result res;
  if (precision > 0)
    res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, precision);
  else
    res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

RasterGrid read_ascii_grid(std::istream& in, const std::string& name) {
  // Header: six key/value lines in any case; all are required.
  double ncols = 0, nrows = 0, xll = 0, yll = 0, cellsize = 0, nodata = 0;
  struct Key {
    const char* name;
    double* slot;
    bool seen;
  } keys[] = {
      {"ncols", &ncols, false},     {"nrows", &nrows, false},
      {"xllcorner", &xll, false},   {"yllcorner", &yll, false},
      {"cellsize", &cellsize, false}, {"nodata_value", &nodata, false},
  };

  std::string tok;
  for (int i = 0; i < 6; ++i) {
    if (!(in >> tok)) throw input_error(name + ": truncated header");
    const std::string key = lower(tok);
    auto it = std::find_if(std::begin(keys), std::end(keys),
                           [&](const Key& k) { return key == k.name; });
    if (it == std::end(keys)) {
      // Report the first canonical key that has not appeared yet.
      for (const Key& k : keys)
        if (!k.seen) throw input_error(name + ": missing header key: " + k.name);
      throw input_error(name + ": unexpected header token: " + tok);
    }
    if (!(in >> tok) || !parse_double(tok, *it->slot))
      throw input_error(name + ": bad value for header key " + it->name);
    it->seen = true;
  }
  for (const Key& k : keys)
    if (!k.seen) throw input_error(name + ": missing header key: " + std::string(k.name));

  if (cellsize <= 0.0) throw input_error(name + ": cellsize must be > 0");
  if (ncols < 1 || nrows < 1 || ncols != std::floor(ncols) || nrows != std::floor(nrows))
    throw input_error(name + ": ncols/nrows must be positive integers");

  GridGeoref g;
  g.n_cols = static_cast<int>(ncols);
  g.n_rows = static_cast<int>(nrows);
  g.x_origin = xll;
  g.y_origin = yll;
  g.cell_size = cellsize;

  RasterGrid grid(g, nodata);
  const std::size_t expect = g.cells();

  // Bulk-read the remaining values.
  std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t count = 0;
  const char* p = rest.data();
  const char* end = p + rest.size();
  while (p < end) {
    while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
    if (p >= end) break;
    if (count >= expect)
      throw input_error(name + ": value count exceeds ncols*nrows");
    double v;
    auto [ptr, ec] = std::from_chars(p, end, v);
    if (ec != std::errc() || ptr == p)
      throw input_error(name + ": malformed value at index " + std::to_string(count));
    grid.values[count++] = v;
    p = ptr;
  }
  if (count != expect)
    throw input_error(name + ": value count " + std::to_string(count) +
                      " does not match ncols*nrows " + std::to_string(expect));
  return grid;
}

RasterGrid read_ascii_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open raster file: " + path.string());
  return read_ascii_grid(in, path.filename().string());
}

void write_ascii_grid(const RasterGrid& grid, std::ostream& out, int precision) {
  grid.georef.validate();
  std::string line;
  line.reserve(static_cast<std::size_t>(grid.georef.n_cols) * 16);

  line = "ncols " + std::to_string(grid.georef.n_cols) + "\n" +
         "nrows " + std::to_string(grid.georef.n_rows) + "\n";
  line += "xllcorner ";
  format_value(grid.georef.x_origin, precision, line);
  line += "\nyllcorner ";
  format_value(grid.georef.y_origin, precision, line);
  line += "\ncellsize ";
  format_value(grid.georef.cell_size, precision, line);
  line += "\nNODATA_value ";
  format_value(grid.nodata, precision, line);
  line += "\n";
  out.write(line.data(), static_cast<std::streamsize>(line.size()));

  for (int r = 0; r < grid.georef.n_rows; ++r) {
    line.clear();
    const double* row = grid.values.data() + grid.idx(r, 0);
    for (int c = 0; c < grid.georef.n_cols; ++c) {
      if (c) line.push_back(' ');
      format_value(row[c], precision, line);
    }
    line.push_back('\n');
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
  if (!out) throw input_error("raster write failed");
}

void write_ascii_grid(const RasterGrid& grid, const std::filesystem::path& path,
                      int precision) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot create raster file: " + path.string());
  write_ascii_grid(grid, out, precision);
}

}  // namespace watermap
