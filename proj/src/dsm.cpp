#include "watermap/dsm.hpp"

#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace watermap {

Aggregator aggregator_from_string(const std::string& name) {
  if (name == "min") return Aggregator::min;
  if (name == "max") return Aggregator::max;
  if (name == "mean") return Aggregator::mean;
  throw input_error("unknown aggregator: " + name);
}

const char* to_string(Aggregator a) {
  switch (a) {
    case Aggregator::min: return "min";
    case Aggregator::max: return "max";
    default: return "mean";
  }
}

RasterGrid build_dsm(std::span<const Point3> points, double cell_size,
                     Aggregator aggregator, double nodata_value) {
  if (points.empty()) throw input_error("build_dsm: empty point stream");
  if (cell_size <= 0.0) throw input_error("build_dsm: cell_size must be > 0");

  PointCloudBounds b;
  for (const Point3& p : points) b.expand(p);

  GridGeoref g;
  g.cell_size = cell_size;
  g.x_origin = std::floor(b.min_x / cell_size) * cell_size;
  g.y_origin = std::floor(b.min_y / cell_size) * cell_size;
  g.n_cols = std::max(1, static_cast<int>(std::ceil((b.max_x - g.x_origin) / cell_size)));
  g.n_rows = std::max(1, static_cast<int>(std::ceil((b.max_y - g.y_origin) / cell_size)));

  RasterGrid dsm(g, nodata_value);
  const std::size_t n_cells = g.cells();
  std::vector<std::uint32_t> counts(n_cells, 0);
  std::vector<double> acc(n_cells,
                          aggregator == Aggregator::min
                              ? std::numeric_limits<double>::infinity()
                              : (aggregator == Aggregator::max
                                     ? -std::numeric_limits<double>::infinity()
                                     : 0.0));

  // Each thread owns a band of rows and scans the full point span, binning
  // only the points that fall in its band. Per-cell accumulation therefore
  // happens in file order for every thread count, which keeps mean sums
  // bitwise reproducible.
#pragma omp parallel
  {
#ifdef _OPENMP
    const int nt = omp_get_num_threads();
    const int tid = omp_get_thread_num();
#else
    const int nt = 1, tid = 0;
#endif
    const int rows_per = (g.n_rows + nt - 1) / nt;
    const int r_lo = tid * rows_per;
    const int r_hi = std::min(g.n_rows, r_lo + rows_per);
    if (r_lo < r_hi) {
      for (const Point3& p : points) {
        const int row = g.row_of(p.y);
        if (row < r_lo || row >= r_hi) continue;
        const std::size_t i = dsm.idx(row, g.col_of(p.x));
        switch (aggregator) {
          case Aggregator::min:
            if (p.z < acc[i]) acc[i] = p.z;
            break;
          case Aggregator::max:
            if (p.z > acc[i]) acc[i] = p.z;
            break;
          case Aggregator::mean:
            acc[i] += p.z;
            break;
        }
        ++counts[i];
      }
    }
  }

#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n_cells); ++i) {
    if (counts[i] == 0) continue;
    dsm.values[i] = aggregator == Aggregator::mean ? acc[i] / counts[i] : acc[i];
  }
  return dsm;
}

BitMask occupancy(const RasterGrid& dsm) {
  BitMask mask(dsm.georef);
  const std::size_t n = dsm.values.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
    mask.bits[i] = dsm.is_nodata(dsm.values[i]) ? 0 : 1;
  return mask;
}

}  // namespace watermap
