// synth.hpp
// Synthetic-scene generator: point clouds with exact ground-truth water and
// building masks plus painted green/NIR bands. Deterministic under a fixed
// seed; the correctness oracle for end-to-end tests.

#pragma once

#include <filesystem>
#include <vector>

#include "watermap/point.hpp"
#include "watermap/raster.hpp"

namespace watermap {

enum class TerrainKind { flat, slope, terraced, noisy };

struct TerrainSpec {
  TerrainKind kind = TerrainKind::flat;
  double base_elevation = 100.0;
  double slope_x = 0.0;       // dz/dx for slope terrain
  double slope_y = 0.0;
  double step_height = 0.5;   // terraced terrain
  double step_width = 50.0;   // meters per terrace, along x
  double noise_sd = 0.0;      // per-point vertical noise on land returns
};

struct WaterBodySpec {
  enum class Shape { rectangle, disk, ribbon };
  Shape shape = Shape::rectangle;
  double x = 0, y = 0, w = 0, h = 0;     // rectangle (lower-left + size)
  double cx = 0, cy = 0, r = 0;          // disk
  std::vector<std::pair<double, double>> polyline;  // ribbon centerline
  double width = 0;                       // ribbon full width
  double elevation = 0.0;
  double return_fraction = 0.05;          // water density / base density
  double margin_density_boost = 0.0;      // margin density / base density
  double margin_width = 0.0;              // meters inside the waterline
};

struct BuildingSpec {
  double x = 0, y = 0, w = 0, h = 0;  // footprint, lower-left + size
  double height = 10.0;
  double shadow_dx = 0.0, shadow_dy = 0.0;  // occlusion direction (normalized)
  double shadow_length = 0.0;               // meters
  double occlusion_fraction = 0.0;          // residual density inside the shadow
};

struct SceneSpec {
  double extent_x = 100.0, extent_y = 100.0;  // meters
  double origin_x = 0.0, origin_y = 0.0;
  double cell_size = 0.5;
  double base_density = 2.0;  // points per m^2 over open land
  TerrainSpec terrain;
  std::vector<WaterBodySpec> water_bodies;
  std::vector<BuildingSpec> buildings;
  double water_noise = 0.02;    // +- vertical noise of water returns
  double band_green_water = 0.45, band_nir_water = 0.08;
  double band_green_land = 0.25, band_nir_land = 0.45;
  double band_noise_sd = 0.02;
  double band_gradient_x = 0.0;  // relative band shift across the x extent
  std::uint64_t rng_seed = 1;

  void validate() const;
};

struct Scene {
  std::vector<Point3> points;
  BitMask water_truth;
  BitMask building_truth;
  BitMask occlusion_truth;  // building shadow cells (thinned land returns)
  RasterGrid green;
  RasterGrid nir;
};

Scene generate_scene(const SceneSpec& spec);

SceneSpec load_scene_spec(const std::filesystem::path& path);

}  // namespace watermap
