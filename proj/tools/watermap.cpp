// watermap: surface water mapping from airborne LiDAR point clouds.
// Subcommands: map (the full pipeline), ndwi (optical baseline),
// eval (tile-based assessment), synth (synthetic scene generation).

#include <cstdio>
#include <fstream>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"
#include "watermap/ascii_grid.hpp"
#include "watermap/eval.hpp"
#include "watermap/las_io.hpp"
#include "watermap/ndwi.hpp"
#include "watermap/pipeline.hpp"
#include "watermap/synth.hpp"
#include "watermap/xyz_io.hpp"

namespace {

using namespace watermap;

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

nlohmann::ordered_json report_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["tn"] = r.tn;
  auto put = [&](const char* key, std::optional<double> v) {
    if (v)
      j[key] = *v;
    else
      j[key] = nullptr;
  };
  put("oa", r.oa());
  put("precision", r.precision());
  put("recall", r.recall());
  put("f1", r.f1());
  put("iou", r.iou());
  return j;
}

void write_tile_reports(const TileEvalResult& res, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot create report: " + path.string());
  for (int t = 0; t < res.tiling.count(); ++t) {
    nlohmann::ordered_json j;
    j["tile"] = t;
    j["tx"] = t % res.tiling.n_tiles_x;
    j["ty"] = t / res.tiling.n_tiles_x;
    j["excluded"] =
        std::binary_search(res.excluded.begin(), res.excluded.end(), t);
    j.update(report_json(res.tiles[t]));
    out << j.dump() << '\n';
  }
}

std::string fmt_metric(std::optional<double> v) {
  if (!v) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

void print_summary(const char* name, const EvalReport& r) {
  std::printf("%-10s oa=%s precision=%s recall=%s f1=%s iou=%s\n", name,
              fmt_metric(r.oa()).c_str(), fmt_metric(r.precision()).c_str(),
              fmt_metric(r.recall()).c_str(), fmt_metric(r.f1()).c_str(),
              fmt_metric(r.iou()).c_str());
}

int cmd_map(const MapParams& params) {
  const MapOutputs out = run_map(params);
  std::printf("points        %llu\n", static_cast<unsigned long long>(out.point_count));
  std::printf("grid          %d x %d @ %g m\n", out.georef.n_cols, out.georef.n_rows,
              out.georef.cell_size);
  std::printf("density P     %.6f (test p %.6f, window bound %.4f)\n",
              out.stats.p_global, out.stats.p_test, out.stats.threshold_real);
  std::printf("seed cells    %llu\n", static_cast<unsigned long long>(out.seed_cells));
  std::printf("water cells   %llu in %zu segments\n",
              static_cast<unsigned long long>(out.water_cells), out.segment_count);
  std::printf("outputs in    %s\n", params.out_dir.string().c_str());
  return 0;
}

struct NdwiArgs {
  std::filesystem::path green, nir, truth, out_dir;
  std::string mode = "both";
  Tiling tiling{10, 10};
  ThresholdSearch search;
};

int cmd_ndwi(const NdwiArgs& args) {
  std::filesystem::create_directories(args.out_dir);
  const RasterGrid green = read_ascii_grid(args.green);
  const RasterGrid nir = read_ascii_grid(args.nir);
  const BitMask truth = mask_from_grid(read_ascii_grid(args.truth));
  const RasterGrid index = ndwi(green, nir);
  require_same_georef(index.georef, truth.georef, "ndwi truth");
  write_ascii_grid(index, args.out_dir / "ndwi.asc");

  nlohmann::ordered_json thresholds;
  if (args.mode == "global" || args.mode == "both") {
    const ThresholdResult res = optimal_threshold(index, truth, args.search);
    write_ascii_grid(grid_from_mask(threshold_map(index, res.threshold)),
                     args.out_dir / "ndwi_global_mask.asc");
    thresholds["global"] = {{"threshold", res.threshold},
                            {"overall_accuracy", res.overall_accuracy}};
    std::printf("NDWI-G-Opt: threshold %.4f, OA %.6f\n", res.threshold,
                res.overall_accuracy);
  }
  if (args.mode == "local" || args.mode == "both") {
    std::vector<ThresholdResult> per_tile;
    const BitMask local =
        local_optimal_map(index, truth, args.tiling, args.search, &per_tile);
    write_ascii_grid(grid_from_mask(local), args.out_dir / "ndwi_local_mask.asc");
    nlohmann::ordered_json tiles = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < per_tile.size(); ++t)
      tiles.push_back({{"tile", t},
                       {"threshold", per_tile[t].threshold},
                       {"overall_accuracy", per_tile[t].overall_accuracy}});
    thresholds["local"] = {{"tiles_x", args.tiling.n_tiles_x},
                           {"tiles_y", args.tiling.n_tiles_y},
                           {"tiles", std::move(tiles)}};
    std::printf("NDWI-L-Opt: %d tiles\n", args.tiling.count());
  }
  std::ofstream tf(args.out_dir / "thresholds.json", std::ios::binary);
  tf << thresholds.dump(2) << '\n';
  return 0;
}

struct EvalArgs {
  std::filesystem::path pred, truth, pred_b, valid, out_dir;
  Tiling tiling{10, 10};
  std::vector<int> exclude;
  int top_k = 10;
};

int cmd_eval(const EvalArgs& args) {
  std::filesystem::create_directories(args.out_dir);
  const BitMask pred = mask_from_grid(read_ascii_grid(args.pred));
  const BitMask truth = mask_from_grid(read_ascii_grid(args.truth));
  std::optional<BitMask> valid;
  if (!args.valid.empty()) valid = mask_from_grid(read_ascii_grid(args.valid));

  const TileEvalResult res =
      tile_eval(pred, truth, args.tiling, args.exclude, valid ? &*valid : nullptr);
  write_tile_reports(res, args.out_dir / "tiles_pred.jsonl");

  nlohmann::ordered_json agg;
  agg["pooled"] = report_json(res.aggregate);
  // mean of per-tile metrics over included tiles where defined
  double oa_sum = 0, iou_sum = 0;
  int oa_n = 0, iou_n = 0;
  for (int t = 0; t < res.tiling.count(); ++t) {
    if (std::binary_search(res.excluded.begin(), res.excluded.end(), t)) continue;
    if (const auto oa = res.tiles[t].oa()) {
      oa_sum += *oa;
      ++oa_n;
    }
    if (const auto iou = res.tiles[t].iou()) {
      iou_sum += *iou;
      ++iou_n;
    }
  }
  agg["tile_mean"] = {
      {"oa", oa_n ? nlohmann::ordered_json(oa_sum / oa_n) : nullptr},
      {"iou", iou_n ? nlohmann::ordered_json(iou_sum / iou_n) : nullptr},
      {"tiles", oa_n}};
  print_summary("pred", res.aggregate);

  if (!args.pred_b.empty()) {
    const BitMask pred_b = mask_from_grid(read_ascii_grid(args.pred_b));
    const TileEvalResult res_b =
        tile_eval(pred_b, truth, args.tiling, args.exclude, valid ? &*valid : nullptr);
    write_tile_reports(res_b, args.out_dir / "tiles_pred_b.jsonl");
    agg["pooled_b"] = report_json(res_b.aggregate);
    print_summary("pred-b", res_b.aggregate);

    const auto ids = divergent_tiles(res.tiles, res_b.tiles, args.top_k);
    nlohmann::ordered_json div = nlohmann::ordered_json::array();
    std::printf("top divergent tiles (|iou_a - iou_b|):\n");
    for (int id : ids) {
      const double d = std::fabs(*res.tiles[id].iou() - *res_b.tiles[id].iou());
      div.push_back({{"tile", id}, {"iou_diff", d}});
      std::printf("  tile %-4d iou_a=%s iou_b=%s diff=%.6f\n", id,
                  fmt_metric(res.tiles[id].iou()).c_str(),
                  fmt_metric(res_b.tiles[id].iou()).c_str(), d);
    }
    agg["divergent"] = std::move(div);
  }

  std::ofstream af(args.out_dir / "aggregate.json", std::ios::binary);
  af << agg.dump(2) << '\n';
  return 0;
}

struct SynthArgs {
  std::filesystem::path spec, out_dir;
  std::string format = "las";
  double las_scale = 0.001;
};

int cmd_synth(const SynthArgs& args) {
  const SceneSpec spec = load_scene_spec(args.spec);
  std::filesystem::create_directories(args.out_dir);
  const Scene scene = generate_scene(spec);
  std::filesystem::path points_path;
  if (args.format == "las") {
    points_path = args.out_dir / "points.las";
    write_las(points_path, scene.points, args.las_scale);
  } else if (args.format == "xyz") {
    points_path = args.out_dir / "points.xyz";
    write_xyz(points_path, scene.points);
  } else {
    throw input_error("synth: unknown point format: " + args.format);
  }
  write_ascii_grid(grid_from_mask(scene.water_truth), args.out_dir / "water_truth.asc");
  write_ascii_grid(grid_from_mask(scene.building_truth),
                   args.out_dir / "building_truth.asc");
  write_ascii_grid(grid_from_mask(scene.occlusion_truth),
                   args.out_dir / "occlusion_truth.asc");
  write_ascii_grid(scene.green, args.out_dir / "green.asc");
  write_ascii_grid(scene.nir, args.out_dir / "nir.asc");
  std::printf("scene: %zu points, %llu water cells, %llu building cells -> %s\n",
              scene.points.size(),
              static_cast<unsigned long long>(scene.water_truth.popcount()),
              static_cast<unsigned long long>(scene.building_truth.popcount()),
              args.out_dir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surface water mapping from topographic airborne LiDAR point clouds"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = auto)")
      ->capture_default_str();

  // map
  MapParams map_params;
  std::string aggregator = "max";
  int connectivity = 8;
  std::string density_extent = "full";
  auto* map = app.add_subcommand("map", "Extract the surface water map from a point cloud");
  map->add_option("input", map_params.input, "Input .las or .xyz point file")->required();
  map->add_option("-o,--out", map_params.out_dir, "Output directory")->required();
  map->add_option("--resolution", map_params.resolution, "Grid cell size, meters")
      ->capture_default_str();
  map->add_option("--aggregator", aggregator, "Per-cell reducer: min|max|mean")
      ->capture_default_str();
  map->add_option("--window", map_params.seed.window_side, "Sliding window side, cells")
      ->capture_default_str();
  map->add_option("--z", map_params.seed.z_score, "Confidence z-score")
      ->capture_default_str();
  map->add_flag("--halve-density,!--no-halve-density", map_params.seed.density_halving,
                "Test against P/2 (compensates overlap imbalance)")
      ->capture_default_str();
  map->add_flag("--exact-binomial", map_params.seed.exact_binomial,
                "Exact binomial quantile instead of the normal bound");
  map->add_option("--density-extent", density_extent,
                  "Occupancy denominator: full|hull")
      ->capture_default_str();
  map->add_option("--er", map_params.werm.elevation_range,
                  "Elevation slice half-range, meters")
      ->capture_default_str();
  map->add_option("--ms", map_params.werm.min_area,
                  "Minimum segment area to extend, m^2")
      ->capture_default_str();
  map->add_option("--percentile", map_params.werm.percentile,
                  "Segment elevation percentile")
      ->capture_default_str();
  map->add_option("--passes", map_params.werm.passes, "Merge passes")
      ->capture_default_str();
  map->add_option("--connectivity", connectivity, "Segment connectivity: 4|8")
      ->capture_default_str();
  map->add_option("--building-mask", map_params.building_mask,
                  "Building raster (.asc, >0 = building) on the DSM grid");
  map->add_option("--building-buffer", map_params.seed.building_buffer_radius,
                  "Building buffer radius, meters")
      ->capture_default_str();
  map->add_option("--nodata", map_params.nodata_value, "Nodata sentinel for outputs")
      ->capture_default_str();
  map->add_flag("--drop-withheld", map_params.drop_withheld,
                "Skip LAS points flagged withheld");
  map->add_flag("--write-dsm", map_params.write_dsm, "Also write the raw DSM");
  map->add_flag("--write-seeds", map_params.write_seeds,
                "Also write the initial seed mask");

  // ndwi
  NdwiArgs ndwi_args;
  auto* nd = app.add_subcommand("ndwi", "NDWI optimal-threshold baseline maps");
  nd->add_option("--green", ndwi_args.green, "Green band (.asc)")->required();
  nd->add_option("--nir", ndwi_args.nir, "NIR band (.asc)")->required();
  nd->add_option("--truth", ndwi_args.truth, "Truth water mask (.asc)")->required();
  nd->add_option("-o,--out", ndwi_args.out_dir, "Output directory")->required();
  nd->add_option("--mode", ndwi_args.mode, "global|local|both")->capture_default_str();
  nd->add_option("--tiles-x", ndwi_args.tiling.n_tiles_x, "Tile columns")
      ->capture_default_str();
  nd->add_option("--tiles-y", ndwi_args.tiling.n_tiles_y, "Tile rows")
      ->capture_default_str();
  nd->add_option("--t-min", ndwi_args.search.t_min, "Search lower bound")
      ->capture_default_str();
  nd->add_option("--t-max", ndwi_args.search.t_max, "Search upper bound")
      ->capture_default_str();
  nd->add_option("--steps", ndwi_args.search.steps, "Search grid size")
      ->capture_default_str();

  // eval
  EvalArgs eval_args;
  auto* ev = app.add_subcommand("eval", "Tile-based evaluation against a truth mask");
  ev->add_option("--pred", eval_args.pred, "Prediction mask (.asc)")->required();
  ev->add_option("--truth", eval_args.truth, "Truth mask (.asc)")->required();
  ev->add_option("--pred-b", eval_args.pred_b,
                 "Second prediction for divergent-tile selection");
  ev->add_option("--valid", eval_args.valid, "Valid-cell mask (.asc)");
  ev->add_option("-o,--out", eval_args.out_dir, "Output directory")->required();
  ev->add_option("--tiles-x", eval_args.tiling.n_tiles_x, "Tile columns")
      ->capture_default_str();
  ev->add_option("--tiles-y", eval_args.tiling.n_tiles_y, "Tile rows")
      ->capture_default_str();
  ev->add_option("--exclude", eval_args.exclude, "Tile ids excluded from the aggregate");
  ev->add_option("--top-k", eval_args.top_k, "Divergent tiles to report")
      ->capture_default_str();

  // synth
  SynthArgs synth_args;
  auto* sy = app.add_subcommand("synth", "Generate a synthetic scene with ground truth");
  sy->add_option("--spec", synth_args.spec, "Scene spec (.json)")->required();
  sy->add_option("-o,--out", synth_args.out_dir, "Output directory")->required();
  sy->add_option("--format", synth_args.format, "Point format: las|xyz")
      ->capture_default_str();
  sy->add_option("--las-scale", synth_args.las_scale, "LAS coordinate scale")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    set_threads(threads);
    if (map->parsed()) {
      map_params.aggregator = aggregator_from_string(aggregator);
      map_params.werm.connectivity = connectivity;
      if (density_extent == "hull")
        map_params.seed.hull_extent = true;
      else if (density_extent != "full")
        throw input_error("--density-extent must be full or hull");
      return cmd_map(map_params);
    }
    if (nd->parsed()) return cmd_ndwi(ndwi_args);
    if (ev->parsed()) return cmd_eval(eval_args);
    if (sy->parsed()) return cmd_synth(synth_args);
  } catch (const input_error& e) {
    std::cerr << "watermap: error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "watermap: internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
