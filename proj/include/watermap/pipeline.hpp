// pipeline.hpp
// The full mapping pipeline behind `watermap map`: ingest -> DSM ->
// density seeding -> optional building buffer -> WERM -> products.

#pragma once

#include <filesystem>

#include "watermap/dsm.hpp"
#include "watermap/seed.hpp"
#include "watermap/werm.hpp"

namespace watermap {

struct MapParams {
  std::filesystem::path input;         // .las or .xyz
  std::filesystem::path out_dir;
  double resolution = 0.5;             // meters
  Aggregator aggregator = Aggregator::max;
  SeedParams seed;
  WermParams werm;
  std::filesystem::path building_mask; // empty = none
  double nodata_value = kDefaultNodata;
  bool drop_withheld = false;
  bool write_dsm = false;    // also emit the raw DSM
  bool write_seeds = false;  // also emit the initial (pre-WERM) seed mask
};

struct MapOutputs {
  DensityStats stats;
  GridGeoref georef;
  std::uint64_t point_count = 0;
  std::uint64_t seed_cells = 0;
  std::uint64_t water_cells = 0;
  std::size_t segment_count = 0;
  std::filesystem::path water_mask;
  std::filesystem::path water_elevation;
  std::filesystem::path hydro_dem;
  std::filesystem::path segment_report;
  std::filesystem::path manifest;
};

// Errors are rethrown with the failing stage name prefixed.
MapOutputs run_map(const MapParams& params);

}  // namespace watermap
