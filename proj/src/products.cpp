#include "watermap/products.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"

namespace watermap {

RasterGrid water_elevation_raster(const Labeling& labeling, double nodata_value) {
  RasterGrid out(labeling.georef, nodata_value);
  const std::size_t n = labeling.labels.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    const std::int32_t l = labeling.labels[i];
    if (l == 0) continue;
    const auto& elev = labeling.segments[l - 1].elevation;
    if (elev) out.values[i] = *elev;
  }
  return out;
}

RasterGrid hydro_flatten(const RasterGrid& dsm, const Labeling& labeling) {
  require_same_georef(dsm.georef, labeling.georef, "hydro_flatten");
  RasterGrid out = dsm;
  const std::size_t n = labeling.labels.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    const std::int32_t l = labeling.labels[i];
    if (l == 0) continue;
    const auto& elev = labeling.segments[l - 1].elevation;
    out.values[i] = elev ? *elev : out.nodata;
  }
  return out;
}

void write_segment_report(const Labeling& labeling, std::ostream& out) {
  std::vector<const WaterSegment*> order;
  order.reserve(labeling.segments.size());
  for (const WaterSegment& s : labeling.segments) order.push_back(&s);
  std::sort(order.begin(), order.end(), [](const WaterSegment* a, const WaterSegment* b) {
    if (a->area != b->area) return a->area > b->area;
    return a->id < b->id;
  });

  const GridGeoref& g = labeling.georef;
  for (const WaterSegment* s : order) {
    nlohmann::ordered_json rec;
    rec["id"] = s->id;
    rec["cell_count"] = s->cell_count;
    rec["area_m2"] = s->area;
    if (s->elevation)
      rec["elevation_m"] = *s->elevation;
    else
      rec["elevation_m"] = nullptr;
    nlohmann::ordered_json bbox;
    bbox["row_min"] = s->bbox.row_min;
    bbox["col_min"] = s->bbox.col_min;
    bbox["row_max"] = s->bbox.row_max;
    bbox["col_max"] = s->bbox.col_max;
    bbox["x_min"] = g.x_origin + s->bbox.col_min * g.cell_size;
    bbox["y_min"] = g.y_origin + (g.n_rows - s->bbox.row_max - 1) * g.cell_size;
    bbox["x_max"] = g.x_origin + (s->bbox.col_max + 1) * g.cell_size;
    bbox["y_max"] = g.y_origin + (g.n_rows - s->bbox.row_min) * g.cell_size;
    rec["bbox"] = std::move(bbox);
    out << rec.dump() << '\n';
  }
}

void write_segment_report(const Labeling& labeling, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot create segment report: " + path.string());
  write_segment_report(labeling, out);
  if (!out) throw input_error("segment report write failed");
}

std::vector<WaterSegment> read_segment_report(std::istream& in) {
  std::vector<WaterSegment> segments;
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw input_error("segment report line " + std::to_string(line_no) + ": " + e.what());
    }
    WaterSegment s;
    s.id = rec.at("id").get<int>();
    s.cell_count = rec.at("cell_count").get<std::uint64_t>();
    s.area = rec.at("area_m2").get<double>();
    if (!rec.at("elevation_m").is_null()) s.elevation = rec.at("elevation_m").get<double>();
    const auto& bbox = rec.at("bbox");
    s.bbox.row_min = bbox.at("row_min").get<int>();
    s.bbox.col_min = bbox.at("col_min").get<int>();
    s.bbox.row_max = bbox.at("row_max").get<int>();
    s.bbox.col_max = bbox.at("col_max").get<int>();
    segments.push_back(s);
  }
  return segments;
}

std::vector<WaterSegment> read_segment_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open segment report: " + path.string());
  return read_segment_report(in);
}

}  // namespace watermap
