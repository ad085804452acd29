#include "watermap/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace watermap {

namespace {

void count_rect(EvalReport& rep, const BitMask& pred, const BitMask& truth,
                const BitMask* valid, const CellRect& rect) {
  for (int r = rect.row_min; r <= rect.row_max; ++r) {
    for (int c = rect.col_min; c <= rect.col_max; ++c) {
      const std::size_t i = pred.idx(r, c);
      if (valid && !valid->bits[i]) continue;
      const bool p = pred.bits[i] != 0;
      const bool t = truth.bits[i] != 0;
      if (p && t)
        ++rep.tp;
      else if (p && !t)
        ++rep.fp;
      else if (!p && t)
        ++rep.fn;
      else
        ++rep.tn;
    }
  }
}

}  // namespace

EvalReport confusion(const BitMask& pred, const BitMask& truth, const BitMask* valid) {
  require_same_georef(pred.georef, truth.georef, "confusion");
  if (valid) require_same_georef(pred.georef, valid->georef, "confusion (valid mask)");

  const int rows = pred.georef.n_rows;
  const int cols = pred.georef.n_cols;
  EvalReport rep;
#pragma omp parallel
  {
    EvalReport local;
#pragma omp for schedule(static) nowait
    for (int r = 0; r < rows; ++r)
      count_rect(local, pred, truth, valid, CellRect{r, 0, r, cols - 1});
#pragma omp critical
    rep += local;
  }
  return rep;
}

TileEvalResult tile_eval(const BitMask& pred, const BitMask& truth, const Tiling& tiling,
                         std::span<const int> exclude, const BitMask* valid) {
  require_same_georef(pred.georef, truth.georef, "tile_eval");
  if (valid) require_same_georef(pred.georef, valid->georef, "tile_eval (valid mask)");
  tiling.validate(pred.georef);

  TileEvalResult result;
  result.tiling = tiling;
  result.tiles.resize(tiling.count());

  std::set<int> excluded;
  for (int id : exclude) {
    if (id < 0 || id >= tiling.count())
      throw input_error("tile_eval: excluded tile id " + std::to_string(id) +
                        " out of range");
    excluded.insert(id);
  }
  result.excluded.assign(excluded.begin(), excluded.end());

#pragma omp parallel for schedule(dynamic)
  for (int tile = 0; tile < tiling.count(); ++tile) {
    EvalReport rep;
    count_rect(rep, pred, truth, valid, tiling.rect(pred.georef, tile));
    result.tiles[tile] = rep;
  }

  for (int tile = 0; tile < tiling.count(); ++tile)
    if (!excluded.count(tile)) result.aggregate += result.tiles[tile];
  return result;
}

std::vector<int> divergent_tiles(std::span<const EvalReport> reports_a,
                                 std::span<const EvalReport> reports_b, int k) {
  if (reports_a.size() != reports_b.size())
    throw input_error("divergent_tiles: report lists differ in length");
  if (k < 0) throw input_error("divergent_tiles: k must be >= 0");

  struct Entry {
    double diff;
    int id;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < reports_a.size(); ++i) {
    const auto iou_a = reports_a[i].iou();
    const auto iou_b = reports_b[i].iou();
    if (!iou_a || !iou_b) continue;
    entries.push_back(Entry{std::fabs(*iou_a - *iou_b), static_cast<int>(i)});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.diff != b.diff) return a.diff > b.diff;
    return a.id < b.id;
  });
  if (static_cast<std::size_t>(k) < entries.size()) entries.resize(k);

  std::vector<int> ids;
  ids.reserve(entries.size());
  for (const Entry& e : entries) ids.push_back(e.id);
  return ids;
}

}  // namespace watermap
