#include "watermap/reference.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

namespace watermap::reference {

RasterGrid build_dsm(std::span<const Point3> points, double cell_size,
                     Aggregator aggregator, double nodata_value) {
  if (points.empty()) throw input_error("reference build_dsm: empty point stream");

  PointCloudBounds b;
  for (const Point3& p : points) b.expand(p);
  GridGeoref g;
  g.cell_size = cell_size;
  g.x_origin = std::floor(b.min_x / cell_size) * cell_size;
  g.y_origin = std::floor(b.min_y / cell_size) * cell_size;
  g.n_cols = std::max(1, static_cast<int>(std::ceil((b.max_x - g.x_origin) / cell_size)));
  g.n_rows = std::max(1, static_cast<int>(std::ceil((b.max_y - g.y_origin) / cell_size)));

  std::unordered_map<std::size_t, std::vector<double>> buckets;
  RasterGrid dsm(g, nodata_value);
  for (const Point3& p : points)
    buckets[dsm.idx(g.row_of(p.y), g.col_of(p.x))].push_back(p.z);

  for (const auto& [cell, zs] : buckets) {
    double v;
    switch (aggregator) {
      case Aggregator::min:
        v = *std::min_element(zs.begin(), zs.end());
        break;
      case Aggregator::max:
        v = *std::max_element(zs.begin(), zs.end());
        break;
      default: {
        double sum = 0.0;
        for (double z : zs) sum += z;
        v = sum / static_cast<double>(zs.size());
        break;
      }
    }
    dsm.values[cell] = v;
  }
  return dsm;
}

BitMask classify_seeds(const BitMask& occ, const DensityStats& stats,
                       const SeedParams& params) {
  const int rows = occ.georef.n_rows;
  const int cols = occ.georef.n_cols;
  const int half = params.window_side / 2;
  const double p = stats.p_test;
  const double alpha = 0.5 * std::erfc(params.z_score / std::sqrt(2.0));

  BitMask water(occ.georef);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      int count = 0;
      int n_w = 0;
      for (int rr = std::max(0, r - half); rr <= std::min(rows - 1, r + half); ++rr) {
        for (int cc = std::max(0, c - half); cc <= std::min(cols - 1, c + half); ++cc) {
          ++n_w;
          count += occ.bits[occ.idx(rr, cc)];
        }
      }
      bool is_water;
      if (params.exact_binomial) {
        is_water = count <= binomial_lower_quantile(n_w, p, alpha);
      } else {
        const double bound = n_w * p - params.z_score * std::sqrt(n_w * p * (1.0 - p));
        is_water = count < bound;
      }
      water.set(r, c, is_water);
    }
  }
  return water;
}

BitMask apply_building_buffer(const BitMask& seeds, const BitMask& buildings,
                              double radius) {
  require_same_georef(seeds.georef, buildings.georef, "reference apply_building_buffer");
  const int rows = seeds.georef.n_rows;
  const int cols = seeds.georef.n_cols;
  const double cell = seeds.georef.cell_size;

  std::vector<std::pair<int, int>> sites;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (buildings.at(r, c)) sites.emplace_back(r, c);

  BitMask out(seeds.georef);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!seeds.at(r, c)) continue;
      bool buffered = false;
      for (const auto& [br, bc] : sites) {
        const double dx = (c - bc) * cell;
        const double dy = (r - br) * cell;
        if (dx * dx + dy * dy <= radius * radius) {
          buffered = true;
          break;
        }
      }
      out.set(r, c, !buffered);
    }
  }
  return out;
}

double binomial_cdf(int k, int n, double p) {
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  // pmf recurrence: pmf(j+1) = pmf(j) * (n-j)/(j+1) * p/(1-p)
  const double odds = p / (1.0 - p);
  double pmf = std::pow(1.0 - p, n);
  double cdf = pmf;
  for (int j = 0; j < k; ++j) {
    pmf *= static_cast<double>(n - j) / static_cast<double>(j + 1) * odds;
    cdf += pmf;
  }
  return cdf;
}

int binomial_lower_quantile(int n, double p, double alpha) {
  int best = -1;
  for (int k = 0; k <= n; ++k) {
    if (binomial_cdf(k, n, p) <= alpha)
      best = k;
    else
      break;
  }
  return best;
}

std::vector<std::int32_t> label_components(const BitMask& mask, int connectivity) {
  const int rows = mask.georef.n_rows;
  const int cols = mask.georef.n_cols;
  std::vector<std::int32_t> labels(mask.georef.cells(), 0);
  std::int32_t next = 0;
  std::deque<std::pair<int, int>> queue;
  for (int r0 = 0; r0 < rows; ++r0) {
    for (int c0 = 0; c0 < cols; ++c0) {
      if (!mask.at(r0, c0) || labels[mask.idx(r0, c0)] != 0) continue;
      ++next;
      labels[mask.idx(r0, c0)] = next;
      queue.emplace_back(r0, c0);
      while (!queue.empty()) {
        const auto [r, c] = queue.front();
        queue.pop_front();
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            if (connectivity == 4 && dr != 0 && dc != 0) continue;
            const int rr = r + dr, cc = c + dc;
            if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
            const std::size_t j = mask.idx(rr, cc);
            if (!mask.bits[j] || labels[j] != 0) continue;
            labels[j] = next;
            queue.emplace_back(rr, cc);
          }
        }
      }
    }
  }
  return labels;
}

std::optional<double> percentile(std::vector<double> values, double p) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const double raw = p * static_cast<double>(values.size());
  auto k = static_cast<std::size_t>(std::ceil(raw - (raw * 1e-12 + 1e-9)));
  k = std::clamp<std::size_t>(k, 1, values.size());
  return values[k - 1];
}

BitMask werm_pass(const BitMask& water, const Labeling& labeling,
                  const RasterGrid& dsm, const WermParams& params) {
  const int rows = water.georef.n_rows;
  const int cols = water.georef.n_cols;
  const double cell_area = water.georef.cell_size * water.georef.cell_size;

  BitMask out = water;
  for (const WaterSegment& seg : labeling.segments) {
    const double raw = params.min_area / cell_area;
    const auto min_cells =
        static_cast<std::uint64_t>(std::ceil(raw - (raw * 1e-12 + 1e-9)));
    if (seg.cell_count < min_cells || !seg.elevation) continue;
    const double w = *seg.elevation;

    std::vector<std::uint8_t> visited(water.georef.cells(), 0);
    std::deque<std::pair<int, int>> queue;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        if (labeling.labels[water.idx(r, c)] == seg.id) {
          visited[water.idx(r, c)] = 1;
          queue.emplace_back(r, c);
        }
    while (!queue.empty()) {
      const auto [r, c] = queue.front();
      queue.pop_front();
      out.set(r, c, true);
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          if (params.connectivity == 4 && dr != 0 && dc != 0) continue;
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
          const std::size_t j = water.idx(rr, cc);
          if (visited[j]) continue;
          const double v = dsm.values[j];
          if (dsm.is_nodata(v) || std::fabs(v - w) > params.elevation_range) continue;
          visited[j] = 1;
          queue.emplace_back(rr, cc);
        }
      }
    }
  }
  return out;
}

ThresholdResult optimal_threshold(const RasterGrid& index, const BitMask& truth,
                                  const ThresholdSearch& search) {
  const std::size_t n = index.values.size();
  bool any_valid = false;
  for (double v : index.values)
    if (!index.is_nodata(v)) { any_valid = true; break; }
  if (!any_valid) throw input_error("reference optimal_threshold: all nodata");

  ThresholdResult best{0.0, -1.0};
  for (int i = 0; i < search.steps; ++i) {
    const double t = search.at(i);
    std::uint64_t correct = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = index.values[j];
      const bool pred = !index.is_nodata(v) && v >= t;
      if (pred == (truth.bits[j] != 0)) ++correct;
    }
    const double oa = static_cast<double>(correct) / static_cast<double>(n);
    if (oa >= best.overall_accuracy) {  // ties toward the larger threshold
      best.overall_accuracy = oa;
      best.threshold = t;
    }
  }
  return best;
}

EvalReport confusion(const BitMask& pred, const BitMask& truth, const BitMask* valid) {
  EvalReport rep;
  for (std::size_t i = 0; i < pred.bits.size(); ++i) {
    if (valid && !valid->bits[i]) continue;
    const bool p = pred.bits[i] != 0;
    const bool t = truth.bits[i] != 0;
    if (p && t)
      ++rep.tp;
    else if (p)
      ++rep.fp;
    else if (t)
      ++rep.fn;
    else
      ++rep.tn;
  }
  return rep;
}

}  // namespace watermap::reference
