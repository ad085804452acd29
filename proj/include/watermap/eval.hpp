// eval.hpp
// Confusion-matrix metrics, tile-based evaluation and divergent-tile
// selection for comparing water maps against a truth layer.

#pragma once

#include <optional>
#include <span>

#include "watermap/tiling.hpp"

namespace watermap {

struct EvalReport {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }

  // Each metric is undefined (nullopt) when its denominator is zero.
  std::optional<double> oa() const { return ratio(tp + tn, total()); }
  std::optional<double> precision() const { return ratio(tp, tp + fp); }
  std::optional<double> recall() const { return ratio(tp, tp + fn); }
  std::optional<double> f1() const { return ratio(2 * tp, 2 * tp + fp + fn); }
  std::optional<double> iou() const { return ratio(tp, tp + fp + fn); }

  EvalReport& operator+=(const EvalReport& o) {
    tp += o.tp; fp += o.fp; fn += o.fn; tn += o.tn;
    return *this;
  }

 private:
  static std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  }
};

// Counts over cells where `valid` is set (everywhere when absent).
EvalReport confusion(const BitMask& pred, const BitMask& truth,
                     const BitMask* valid = nullptr);

struct TileEvalResult {
  Tiling tiling;
  std::vector<EvalReport> tiles;   // index = tile id
  std::vector<int> excluded;       // sorted, deduplicated
  EvalReport aggregate;            // pooled counts over non-excluded tiles
};

TileEvalResult tile_eval(const BitMask& pred, const BitMask& truth, const Tiling& tiling,
                         std::span<const int> exclude = {}, const BitMask* valid = nullptr);

// Tile ids of the k largest |iou_a - iou_b|, ties by ascending id; tiles with
// an undefined IoU on either side are skipped.
std::vector<int> divergent_tiles(std::span<const EvalReport> reports_a,
                                 std::span<const EvalReport> reports_b, int k);

}  // namespace watermap
