#include "watermap/werm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace watermap {

void WermParams::validate() const {
  if (!(elevation_range > 0.0)) throw input_error("werm: elevation_range must be > 0");
  if (min_area < 0.0) throw input_error("werm: min_area must be >= 0");
  if (!(percentile > 0.0 && percentile < 1.0))
    throw input_error("werm: percentile must be in (0, 1)");
  if (passes < 1) throw input_error("werm: passes must be >= 1");
  if (connectivity != 4 && connectivity != 8)
    throw input_error("werm: connectivity must be 4 or 8");
}

std::optional<double> segment_elevation(std::vector<double> values, double percentile) {
  if (values.empty()) return std::nullopt;
  const double m = static_cast<double>(values.size());
  // Guard against the product landing an ulp above the intended integer
  // (e.g. 0.1 * 10); nearest-rank k = ceil(percentile * m), 1-indexed.
  const double raw = percentile * m;
  auto k = static_cast<std::size_t>(std::ceil(raw - (raw * 1e-12 + 1e-9)));
  k = std::clamp<std::size_t>(k, 1, values.size());
  std::nth_element(values.begin(), values.begin() + (k - 1), values.end());
  return values[k - 1];
}

namespace {

std::int32_t uf_find(std::vector<std::int32_t>& parent, std::int32_t a) {
  while (parent[a] != a) {
    parent[a] = parent[parent[a]];
    a = parent[a];
  }
  return a;
}

void uf_union(std::vector<std::int32_t>& parent, std::int32_t a, std::int32_t b) {
  a = uf_find(parent, a);
  b = uf_find(parent, b);
  if (a != b) parent[std::max(a, b)] = std::min(a, b);
}

// Number of cells a segment needs before it is extended.
std::uint64_t min_cell_count(double min_area, double cell_size) {
  const double raw = min_area / (cell_size * cell_size);
  return static_cast<std::uint64_t>(std::ceil(raw - (raw * 1e-12 + 1e-9)));
}

}  // namespace

Labeling label_segments(const BitMask& mask, const RasterGrid& dsm,
                        const WermParams& params) {
  params.validate();
  require_same_georef(mask.georef, dsm.georef, "label_segments");
  const int rows = mask.georef.n_rows;
  const int cols = mask.georef.n_cols;

  Labeling out;
  out.georef = mask.georef;
  out.labels.assign(mask.georef.cells(), 0);

  // First pass: provisional labels, merging across already-scanned neighbors.
  std::vector<std::int32_t> parent;
  parent.reserve(1024);
  const bool diag = params.connectivity == 8;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t i = mask.idx(r, c);
      if (!mask.bits[i]) continue;
      std::int32_t best = 0;
      auto consider = [&](int rr, int cc) {
        if (rr < 0 || cc < 0 || cc >= cols) return;
        const std::int32_t l = out.labels[mask.idx(rr, cc)];
        if (l == 0) return;
        if (best == 0) {
          best = l;
        } else if (l != best) {
          uf_union(parent, best - 1, l - 1);
          best = std::min(best, l);
        }
      };
      consider(r, c - 1);
      consider(r - 1, c);
      if (diag) {
        consider(r - 1, c - 1);
        consider(r - 1, c + 1);
      }
      if (best == 0) {
        parent.push_back(static_cast<std::int32_t>(parent.size()));
        best = static_cast<std::int32_t>(parent.size());
      }
      out.labels[i] = best;
    }
  }

  // Second pass: flatten roots and renumber in scan order of first contact.
  std::vector<std::int32_t> remap(parent.size(), 0);
  std::int32_t next = 0;
  std::vector<std::vector<double>> seg_values;
  const std::size_t n = mask.georef.cells();
  for (std::size_t i = 0; i < n; ++i) {
    std::int32_t l = out.labels[i];
    if (l == 0) continue;
    const std::int32_t root = uf_find(parent, l - 1);
    if (remap[root] == 0) {
      remap[root] = ++next;
      out.segments.push_back(WaterSegment{next, 0, 0.0, std::nullopt,
                                          CellRect{rows, cols, -1, -1}});
      out.segment_cells.emplace_back();
      seg_values.emplace_back();
    }
    const std::int32_t id = remap[root];
    out.labels[i] = id;
    WaterSegment& seg = out.segments[id - 1];
    ++seg.cell_count;
    const int r = static_cast<int>(i / cols);
    const int c = static_cast<int>(i % cols);
    seg.bbox.row_min = std::min(seg.bbox.row_min, r);
    seg.bbox.row_max = std::max(seg.bbox.row_max, r);
    seg.bbox.col_min = std::min(seg.bbox.col_min, c);
    seg.bbox.col_max = std::max(seg.bbox.col_max, c);
    out.segment_cells[id - 1].push_back(static_cast<std::uint32_t>(i));
    if (!dsm.is_nodata(dsm.values[i])) seg_values[id - 1].push_back(dsm.values[i]);
  }

  const double cell_area = mask.georef.cell_size * mask.georef.cell_size;
  for (WaterSegment& seg : out.segments) {
    seg.area = static_cast<double>(seg.cell_count) * cell_area;
    seg.elevation = segment_elevation(std::move(seg_values[seg.id - 1]), params.percentile);
  }
  return out;
}

BitMask werm_pass(const BitMask& water, const Labeling& labeling,
                  const RasterGrid& dsm, const WermParams& params) {
  params.validate();
  require_same_georef(water.georef, dsm.georef, "werm_pass");
  require_same_georef(water.georef, labeling.georef, "werm_pass");

  const int rows = water.georef.n_rows;
  const int cols = water.georef.n_cols;
  const std::uint64_t min_cells = min_cell_count(params.min_area, water.georef.cell_size);
  const double er = params.elevation_range;

  std::vector<int> eligible;
  for (const WaterSegment& seg : labeling.segments)
    if (seg.cell_count >= min_cells && seg.elevation.has_value())
      eligible.push_back(seg.id);

  BitMask out = water;
  if (eligible.empty()) return out;

  // Reachable set per eligible segment: grow from the segment cells across
  // DSM cells within +-ER of the segment elevation. Segment cells conduct
  // even without a DSM value (open-water centers have no returns). The sets
  // are independent, so the union below is the same for any thread count.
  std::vector<std::vector<std::uint32_t>> reached(eligible.size());
#pragma omp parallel
  {
    std::vector<std::uint8_t> visited(water.georef.cells(), 0);
    std::vector<std::uint32_t> stack;
#pragma omp for schedule(dynamic)
    for (std::int64_t e = 0; e < static_cast<std::int64_t>(eligible.size()); ++e) {
      const WaterSegment& seg = labeling.segments[eligible[e] - 1];
      const double w = *seg.elevation;
      stack.clear();
      for (std::uint32_t i : labeling.segment_cells[seg.id - 1]) {
        visited[i] = 1;
        stack.push_back(i);
      }
      std::size_t head = 0;
      while (head < stack.size()) {
        const std::uint32_t i = stack[head++];
        const int r = static_cast<int>(i / cols);
        const int c = static_cast<int>(i % cols);
        const int r0 = std::max(0, r - 1), r1 = std::min(rows - 1, r + 1);
        const int c0 = std::max(0, c - 1), c1 = std::min(cols - 1, c + 1);
        for (int rr = r0; rr <= r1; ++rr) {
          for (int cc = c0; cc <= c1; ++cc) {
            if (params.connectivity == 4 && rr != r && cc != c) continue;
            const auto j = static_cast<std::uint32_t>(water.idx(rr, cc));
            if (visited[j]) continue;
            const double v = dsm.values[j];
            if (dsm.is_nodata(v) || std::fabs(v - w) > er) continue;
            visited[j] = 1;
            stack.push_back(j);
          }
        }
      }
      for (std::uint32_t i : stack) visited[i] = 0;
      reached[e] = stack;
    }
  }

  for (const auto& cells : reached)
    for (std::uint32_t i : cells) out.bits[i] = 1;
  return out;
}

WermResult run_werm(const BitMask& seeds, const RasterGrid& dsm, const WermParams& params) {
  params.validate();
  BitMask mask = seeds;
  for (int pass = 0; pass < params.passes; ++pass) {
    Labeling labeling = label_segments(mask, dsm, params);
    if (labeling.segments.empty()) break;
    mask = werm_pass(mask, labeling, dsm, params);
  }
  Labeling final_labeling = label_segments(mask, dsm, params);
  return WermResult{std::move(mask), std::move(final_labeling)};
}

}  // namespace watermap
