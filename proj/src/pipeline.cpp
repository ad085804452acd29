#include "watermap/pipeline.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"
#include "watermap/ascii_grid.hpp"
#include "watermap/las_io.hpp"
#include "watermap/products.hpp"
#include "watermap/xyz_io.hpp"

namespace watermap {

namespace {

// Rethrows with the failing stage name prefixed, preserving the error class.
template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const input_error& e) {
    throw input_error(std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(name) + ": " + e.what());
  }
}

std::string lower_ext(const std::filesystem::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e;
}

}  // namespace

MapOutputs run_map(const MapParams& params) {
  if (params.resolution <= 0.0) throw input_error("map: resolution must be > 0");
  params.seed.validate();
  params.werm.validate();
  std::filesystem::create_directories(params.out_dir);

  auto points = stage("ingest", [&] {
    if (!std::filesystem::exists(params.input))
      throw input_error("input file not found: " + params.input.string());
    const std::string ext = lower_ext(params.input);
    if (ext == ".las") return read_las(params.input, params.drop_withheld).first;
    if (ext == ".xyz" || ext == ".txt" || ext == ".csv")
      return read_xyz(params.input).first;
    throw input_error("unrecognized point file extension: " + params.input.string());
  });

  RasterGrid dsm = stage("raster", [&] {
    return build_dsm(points, params.resolution, params.aggregator, params.nodata_value);
  });
  const std::uint64_t point_count = points.size();
  std::vector<Point3>().swap(points);
  const BitMask occ = occupancy(dsm);

  DensityStats stats;
  BitMask seeds = stage("seed", [&] {
    stats = density_stats(occ, params.seed);
    return classify_seeds(occ, stats, params.seed);
  });
  if (!params.building_mask.empty()) {
    seeds = stage("building-buffer", [&] {
      const RasterGrid bgrid = read_ascii_grid(params.building_mask);
      if (!(bgrid.georef == dsm.georef))
        throw input_error("building mask grid does not match the DSM grid (" +
                          std::to_string(bgrid.georef.n_cols) + "x" +
                          std::to_string(bgrid.georef.n_rows) + " vs " +
                          std::to_string(dsm.georef.n_cols) + "x" +
                          std::to_string(dsm.georef.n_rows) + ")");
      return apply_building_buffer(seeds, mask_from_grid(bgrid),
                                   params.seed.building_buffer_radius);
    });
  }
  const std::uint64_t seed_cells = seeds.popcount();

  WermResult werm = stage("werm", [&] { return run_werm(seeds, dsm, params.werm); });

  MapOutputs out;
  out.stats = stats;
  out.georef = dsm.georef;
  out.point_count = point_count;
  out.seed_cells = seed_cells;
  out.water_cells = werm.water.popcount();
  out.segment_count = werm.labeling.segments.size();
  out.water_mask = params.out_dir / "water_mask.asc";
  out.water_elevation = params.out_dir / "water_elevation.asc";
  out.hydro_dem = params.out_dir / "hydro_dem.asc";
  out.segment_report = params.out_dir / "segments.jsonl";
  out.manifest = params.out_dir / "manifest.json";

  stage("products", [&] {
    write_ascii_grid(grid_from_mask(werm.water, params.nodata_value), out.water_mask);
    write_ascii_grid(water_elevation_raster(werm.labeling, params.nodata_value),
                     out.water_elevation);
    write_ascii_grid(hydro_flatten(dsm, werm.labeling), out.hydro_dem);
    write_segment_report(werm.labeling, out.segment_report);
    if (params.write_dsm) write_ascii_grid(dsm, params.out_dir / "dsm.asc");
    if (params.write_seeds)
      write_ascii_grid(grid_from_mask(seeds, params.nodata_value),
                       params.out_dir / "seeds.asc");
    return 0;
  });

  // Manifest: every result-affecting parameter plus the density statistics.
  // Worker-pool size is deliberately omitted; results are thread-invariant.
  nlohmann::ordered_json m;
  m["tool"] = "watermap";
  m["version"] = "0.1.0";
  m["command"] = "map";
  m["input"] = params.input.string();
  nlohmann::ordered_json p;
  p["resolution"] = params.resolution;
  p["aggregator"] = to_string(params.aggregator);
  p["window"] = params.seed.window_side;
  p["z"] = params.seed.z_score;
  p["halve_density"] = params.seed.density_halving;
  p["exact_binomial"] = params.seed.exact_binomial;
  p["density_extent"] = params.seed.hull_extent ? "hull" : "full";
  p["er"] = params.werm.elevation_range;
  p["ms"] = params.werm.min_area;
  p["percentile"] = params.werm.percentile;
  p["passes"] = params.werm.passes;
  p["connectivity"] = params.werm.connectivity;
  if (params.building_mask.empty()) {
    p["building_mask"] = nullptr;
  } else {
    p["building_mask"] = params.building_mask.string();
    p["building_buffer"] = params.seed.building_buffer_radius;
  }
  p["nodata"] = params.nodata_value;
  p["drop_withheld"] = params.drop_withheld;
  m["parameters"] = std::move(p);
  nlohmann::ordered_json grid;
  grid["x_origin"] = out.georef.x_origin;
  grid["y_origin"] = out.georef.y_origin;
  grid["cell_size"] = out.georef.cell_size;
  grid["n_cols"] = out.georef.n_cols;
  grid["n_rows"] = out.georef.n_rows;
  m["grid"] = std::move(grid);
  m["points"] = point_count;
  nlohmann::ordered_json d;
  d["p_global"] = stats.p_global;
  d["p_test"] = stats.p_test;
  d["threshold_real"] = stats.threshold_real;
  m["density"] = std::move(d);
  nlohmann::ordered_json res;
  res["seed_cells"] = seed_cells;
  res["water_cells"] = out.water_cells;
  res["segments"] = out.segment_count;
  m["results"] = std::move(res);
  nlohmann::ordered_json files;
  files["water_mask"] = out.water_mask.filename().string();
  files["water_elevation"] = out.water_elevation.filename().string();
  files["hydro_dem"] = out.hydro_dem.filename().string();
  files["segment_report"] = out.segment_report.filename().string();
  m["outputs"] = std::move(files);

  std::ofstream mf(out.manifest, std::ios::binary);
  if (!mf) throw input_error("cannot create manifest: " + out.manifest.string());
  mf << m.dump(2) << '\n';
  return out;
}

}  // namespace watermap
