#include "watermap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"

namespace watermap {

void SceneSpec::validate() const {
  if (!(extent_x > 0.0) || !(extent_y > 0.0))
    throw input_error("scene: extent must be positive");
  if (!(cell_size > 0.0)) throw input_error("scene: cell_size must be > 0");
  if (!(base_density > 0.0)) throw input_error("scene: base_density must be > 0");
  if (water_noise < 0.0) throw input_error("scene: water_noise must be >= 0");
  for (const WaterBodySpec& b : water_bodies) {
    if (b.return_fraction < 0.0 || b.return_fraction > 1.0)
      throw input_error("scene: return_fraction must be in [0, 1]");
    if (b.margin_density_boost < 0.0 || b.margin_width < 0.0)
      throw input_error("scene: margin parameters must be >= 0");
    if (b.shape == WaterBodySpec::Shape::ribbon && b.polyline.size() < 2)
      throw input_error("scene: ribbon needs a polyline with >= 2 vertices");
  }
  for (const BuildingSpec& b : buildings) {
    if (b.occlusion_fraction < 0.0 || b.occlusion_fraction > 1.0)
      throw input_error("scene: occlusion_fraction must be in [0, 1]");
    if (b.shadow_length < 0.0) throw input_error("scene: shadow_length must be >= 0");
  }
}

namespace {

enum CellClass : std::uint8_t { kLand = 0, kWater, kMargin, kBuilding, kShadow };

double dist_point_segment(double px, double py, double ax, double ay, double bx,
                          double by) {
  const double vx = bx - ax, vy = by - ay;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = px - (ax + t * vx);
  const double dy = py - (ay + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

// Signed-ish depth: how far inside the waterline a point lies (<0 outside).
double inside_depth(const WaterBodySpec& b, double x, double y,
                    const std::vector<float>* ribbon_dist, std::size_t cell) {
  switch (b.shape) {
    case WaterBodySpec::Shape::rectangle: {
      const double d = std::min(std::min(x - b.x, b.x + b.w - x),
                                std::min(y - b.y, b.y + b.h - y));
      return d;
    }
    case WaterBodySpec::Shape::disk:
      return b.r - std::hypot(x - b.cx, y - b.cy);
    case WaterBodySpec::Shape::ribbon:
      return b.width / 2.0 - static_cast<double>((*ribbon_dist)[cell]);
  }
  return -1.0;
}

bool in_shadow(const BuildingSpec& b, double x, double y) {
  const double len = std::hypot(b.shadow_dx, b.shadow_dy);
  if (len == 0.0 || b.shadow_length <= 0.0) return false;
  const double dx = b.shadow_dx / len, dy = b.shadow_dy / len;
  // t range for which (x,y) - t*(dx,dy) falls inside the footprint
  double t0 = 0.0, t1 = b.shadow_length;
  auto clip = [&](double d, double lo, double hi, double v) {
    if (d == 0.0) return v >= lo && v <= hi;
    double a = (v - hi) / d, bnd = (v - lo) / d;
    if (a > bnd) std::swap(a, bnd);
    t0 = std::max(t0, a);
    t1 = std::min(t1, bnd);
    return true;
  };
  if (!clip(dx, b.x, b.x + b.w, x)) return false;
  if (!clip(dy, b.y, b.y + b.h, y)) return false;
  return t1 >= t0 && t1 > 0.0;
}

double terrain_z(const TerrainSpec& t, double x, double y, double ox, double oy) {
  switch (t.kind) {
    case TerrainKind::slope:
      return t.base_elevation + t.slope_x * (x - ox) + t.slope_y * (y - oy);
    case TerrainKind::terraced:
      return t.base_elevation +
             t.step_height * std::floor((x - ox) / t.step_width);
    case TerrainKind::flat:
    case TerrainKind::noisy:
    default:
      return t.base_elevation;
  }
}

}  // namespace

Scene generate_scene(const SceneSpec& spec) {
  spec.validate();

  GridGeoref g;
  g.cell_size = spec.cell_size;
  g.x_origin = spec.origin_x;
  g.y_origin = spec.origin_y;
  g.n_cols = std::max(1, static_cast<int>(std::llround(spec.extent_x / spec.cell_size)));
  g.n_rows = std::max(1, static_cast<int>(std::llround(spec.extent_y / spec.cell_size)));
  const std::size_t n = g.cells();

  // Distance field to each ribbon centerline, computed over the segment
  // corridors only; everything else stays "far".
  std::vector<std::vector<float>> ribbon_dist(spec.water_bodies.size());
  for (std::size_t bi = 0; bi < spec.water_bodies.size(); ++bi) {
    const WaterBodySpec& b = spec.water_bodies[bi];
    if (b.shape != WaterBodySpec::Shape::ribbon) continue;
    auto& field = ribbon_dist[bi];
    field.assign(n, 1e30f);
    const double reach = b.width / 2.0 + b.margin_width + 2.0 * g.cell_size;
    for (std::size_t s = 0; s + 1 < b.polyline.size(); ++s) {
      const auto [ax, ay] = b.polyline[s];
      const auto [bx, by] = b.polyline[s + 1];
      const int c0 = g.col_of(std::min(ax, bx) - reach);
      const int c1 = g.col_of(std::max(ax, bx) + reach);
      const int r0 = g.row_of(std::max(ay, by) + reach);
      const int r1 = g.row_of(std::min(ay, by) - reach);
      for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
          const std::size_t i = static_cast<std::size_t>(r) * g.n_cols + c;
          const auto d = static_cast<float>(
              dist_point_segment(g.cell_x(c), g.cell_y(r), ax, ay, bx, by));
          if (d < field[i]) field[i] = d;
        }
      }
    }
  }

  // Per-cell class, water body and density factor.
  std::vector<std::uint8_t> cls(n, kLand);
  std::vector<std::int16_t> body(n, -1);
  std::vector<float> lambda_factor(n, 1.0f);
  for (int r = 0; r < g.n_rows; ++r) {
    const double y = g.cell_y(r);
    for (int c = 0; c < g.n_cols; ++c) {
      const double x = g.cell_x(c);
      const std::size_t i = static_cast<std::size_t>(r) * g.n_cols + c;
      for (std::size_t bi = 0; bi < spec.water_bodies.size(); ++bi) {
        const WaterBodySpec& wb = spec.water_bodies[bi];
        const double depth = inside_depth(wb, x, y, &ribbon_dist[bi], i);
        if (depth < 0.0) continue;
        if (body[i] >= 0 &&
            spec.water_bodies[body[i]].elevation != wb.elevation)
          throw input_error("scene: overlapping water bodies at different elevations");
        const bool margin = wb.margin_density_boost > 0.0 && depth <= wb.margin_width;
        if (body[i] < 0) {
          body[i] = static_cast<std::int16_t>(bi);
          cls[i] = margin ? kMargin : kWater;
          lambda_factor[i] = static_cast<float>(margin ? wb.margin_density_boost
                                                       : wb.return_fraction);
        }
      }
    }
  }
  for (const BuildingSpec& b : spec.buildings) {
    const int c0 = g.col_of(b.x), c1 = g.col_of(b.x + b.w);
    const int r0 = g.row_of(b.y + b.h), r1 = g.row_of(b.y);
    for (int r = r0; r <= r1; ++r) {
      const double y = g.cell_y(r);
      for (int c = c0; c <= c1; ++c) {
        const double x = g.cell_x(c);
        if (x < b.x || x > b.x + b.w || y < b.y || y > b.y + b.h) continue;
        const std::size_t i = static_cast<std::size_t>(r) * g.n_cols + c;
        cls[i] = kBuilding;
        body[i] = -1;
        lambda_factor[i] = 1.0f;
      }
    }
  }
  for (const BuildingSpec& b : spec.buildings) {
    if (b.shadow_length <= 0.0) continue;
    // Conservative bbox of footprint plus the swept shadow.
    const double len = std::hypot(b.shadow_dx, b.shadow_dy);
    if (len == 0.0) continue;
    const double ex = b.shadow_dx / len * b.shadow_length;
    const double ey = b.shadow_dy / len * b.shadow_length;
    const double x_lo = std::min(b.x, b.x + ex), x_hi = std::max(b.x + b.w, b.x + b.w + ex);
    const double y_lo = std::min(b.y, b.y + ey), y_hi = std::max(b.y + b.h, b.y + b.h + ey);
    const int c0 = g.col_of(x_lo), c1 = g.col_of(x_hi);
    const int r0 = g.row_of(y_hi), r1 = g.row_of(y_lo);
    for (int r = r0; r <= r1; ++r) {
      const double y = g.cell_y(r);
      for (int c = c0; c <= c1; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * g.n_cols + c;
        if (cls[i] != kLand) continue;
        if (!in_shadow(b, g.cell_x(c), y)) continue;
        cls[i] = kShadow;
        lambda_factor[i] = static_cast<float>(b.occlusion_fraction);
      }
    }
  }

  Scene scene;
  scene.water_truth = BitMask(g);
  scene.building_truth = BitMask(g);
  scene.occlusion_truth = BitMask(g);
  scene.green = RasterGrid(g);
  scene.nir = RasterGrid(g);
  for (std::size_t i = 0; i < n; ++i) {
    scene.water_truth.bits[i] = (cls[i] == kWater || cls[i] == kMargin) ? 1 : 0;
    scene.building_truth.bits[i] = cls[i] == kBuilding ? 1 : 0;
    scene.occlusion_truth.bits[i] = cls[i] == kShadow ? 1 : 0;
  }

  // Points: one fixed-order pass, one RNG stream.
  std::mt19937_64 rng(spec.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double cell_area = g.cell_size * g.cell_size;
  scene.points.reserve(static_cast<std::size_t>(spec.base_density * cell_area * n));
  for (int r = 0; r < g.n_rows; ++r) {
    for (int c = 0; c < g.n_cols; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * g.n_cols + c;
      const double lambda = spec.base_density * cell_area * lambda_factor[i];
      int k = 0;
      if (lambda > 0.0) {
        std::poisson_distribution<int> pois(lambda);
        k = pois(rng);
      }
      const double x0 = g.x_origin + c * g.cell_size;
      const double y0 = g.y_origin + (g.n_rows - r - 1) * g.cell_size;
      for (int j = 0; j < k; ++j) {
        Point3 p;
        p.x = x0 + unit(rng) * g.cell_size;
        p.y = y0 + unit(rng) * g.cell_size;
        switch (cls[i]) {
          case kWater:
          case kMargin:
            p.z = spec.water_bodies[body[i]].elevation +
                  (2.0 * unit(rng) - 1.0) * spec.water_noise;
            break;
          case kBuilding: {
            p.z = terrain_z(spec.terrain, p.x, p.y, spec.origin_x, spec.origin_y);
            for (const BuildingSpec& b : spec.buildings) {
              if (p.x >= b.x && p.x <= b.x + b.w && p.y >= b.y && p.y <= b.y + b.h) {
                p.z += b.height;  // roof return
                break;
              }
            }
            break;
          }
          default:
            p.z = terrain_z(spec.terrain, p.x, p.y, spec.origin_x, spec.origin_y);
            break;
        }
        if (spec.terrain.noise_sd > 0.0 && cls[i] != kWater && cls[i] != kMargin)
          p.z += gauss(rng) * spec.terrain.noise_sd;
        scene.points.push_back(p);
      }
    }
  }

  // Bands: same stream, second fixed-order pass.
  for (int r = 0; r < g.n_rows; ++r) {
    for (int c = 0; c < g.n_cols; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * g.n_cols + c;
      const bool water = cls[i] == kWater || cls[i] == kMargin;
      const double rel_x = (g.cell_x(c) - spec.origin_x) / spec.extent_x;
      const double factor = 1.0 + spec.band_gradient_x * (rel_x - 0.5);
      double gv = (water ? spec.band_green_water : spec.band_green_land) * factor;
      double nv = (water ? spec.band_nir_water : spec.band_nir_land) * factor;
      if (spec.band_noise_sd > 0.0) {
        gv += gauss(rng) * spec.band_noise_sd;
        nv += gauss(rng) * spec.band_noise_sd;
      }
      scene.green.values[i] = std::max(0.0, gv);
      scene.nir.values[i] = std::max(0.0, nv);
    }
  }
  return scene;
}

namespace {

WaterBodySpec::Shape shape_from_string(const std::string& s) {
  if (s == "rectangle") return WaterBodySpec::Shape::rectangle;
  if (s == "disk") return WaterBodySpec::Shape::disk;
  if (s == "ribbon") return WaterBodySpec::Shape::ribbon;
  throw input_error("scene: unknown water body shape: " + s);
}

TerrainKind terrain_from_string(const std::string& s) {
  if (s == "flat") return TerrainKind::flat;
  if (s == "slope") return TerrainKind::slope;
  if (s == "terraced") return TerrainKind::terraced;
  if (s == "noisy") return TerrainKind::noisy;
  throw input_error("scene: unknown terrain kind: " + s);
}

}  // namespace

SceneSpec load_scene_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open scene spec: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw input_error(path.string() + ": " + e.what());
  }

  SceneSpec spec;
  spec.extent_x = j.value("extent_x", spec.extent_x);
  spec.extent_y = j.value("extent_y", spec.extent_y);
  spec.origin_x = j.value("origin_x", spec.origin_x);
  spec.origin_y = j.value("origin_y", spec.origin_y);
  spec.cell_size = j.value("cell_size", spec.cell_size);
  spec.base_density = j.value("base_density", spec.base_density);
  spec.water_noise = j.value("water_noise", spec.water_noise);
  spec.band_noise_sd = j.value("band_noise_sd", spec.band_noise_sd);
  spec.band_gradient_x = j.value("band_gradient_x", spec.band_gradient_x);
  spec.band_green_water = j.value("band_green_water", spec.band_green_water);
  spec.band_nir_water = j.value("band_nir_water", spec.band_nir_water);
  spec.band_green_land = j.value("band_green_land", spec.band_green_land);
  spec.band_nir_land = j.value("band_nir_land", spec.band_nir_land);
  spec.rng_seed = j.value("rng_seed", spec.rng_seed);

  if (j.contains("terrain")) {
    const auto& t = j["terrain"];
    spec.terrain.kind = terrain_from_string(t.value("kind", std::string("flat")));
    spec.terrain.base_elevation = t.value("base_elevation", spec.terrain.base_elevation);
    spec.terrain.slope_x = t.value("slope_x", spec.terrain.slope_x);
    spec.terrain.slope_y = t.value("slope_y", spec.terrain.slope_y);
    spec.terrain.step_height = t.value("step_height", spec.terrain.step_height);
    spec.terrain.step_width = t.value("step_width", spec.terrain.step_width);
    spec.terrain.noise_sd = t.value("noise_sd", spec.terrain.noise_sd);
  }
  for (const auto& wb : j.value("water_bodies", nlohmann::json::array())) {
    WaterBodySpec b;
    b.shape = shape_from_string(wb.value("shape", std::string("rectangle")));
    b.x = wb.value("x", 0.0);
    b.y = wb.value("y", 0.0);
    b.w = wb.value("w", 0.0);
    b.h = wb.value("h", 0.0);
    b.cx = wb.value("cx", 0.0);
    b.cy = wb.value("cy", 0.0);
    b.r = wb.value("r", 0.0);
    b.width = wb.value("width", 0.0);
    if (wb.contains("polyline"))
      for (const auto& v : wb["polyline"])
        b.polyline.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    b.elevation = wb.at("elevation").get<double>();
    b.return_fraction = wb.value("return_fraction", b.return_fraction);
    b.margin_density_boost = wb.value("margin_density_boost", b.margin_density_boost);
    b.margin_width = wb.value("margin_width", b.margin_width);
    spec.water_bodies.push_back(std::move(b));
  }
  for (const auto& bj : j.value("buildings", nlohmann::json::array())) {
    BuildingSpec b;
    b.x = bj.at("x").get<double>();
    b.y = bj.at("y").get<double>();
    b.w = bj.at("w").get<double>();
    b.h = bj.at("h").get<double>();
    b.height = bj.value("height", b.height);
    b.shadow_dx = bj.value("shadow_dx", 0.0);
    b.shadow_dy = bj.value("shadow_dy", 0.0);
    b.shadow_length = bj.value("shadow_length", 0.0);
    b.occlusion_fraction = bj.value("occlusion_fraction", 0.0);
    spec.buildings.push_back(b);
  }
  return spec;
}

}  // namespace watermap
