#include "landuse/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

#include "landuse/io.hpp"

namespace landuse::geo {

using nlohmann::json;

void BBox::expand(const BBox& other) {
  min_lon = std::min(min_lon, other.min_lon);
  min_lat = std::min(min_lat, other.min_lat);
  max_lon = std::max(max_lon, other.max_lon);
  max_lat = std::max(max_lat, other.max_lat);
}

namespace {

std::size_t distinct_vertices(const Ring& ring) {
  std::vector<Point> pts(ring.begin(), ring.end());
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.lon < b.lon || (a.lon == b.lon && a.lat < b.lat);
  });
  return static_cast<std::size_t>(std::unique(pts.begin(), pts.end()) - pts.begin());
}

bool on_segment(const Point& a, const Point& b, double x, double y) {
  const double cross = (b.lon - a.lon) * (y - a.lat) - (b.lat - a.lat) * (x - a.lon);
  if (cross != 0.0) return false;
  return x >= std::min(a.lon, b.lon) && x <= std::max(a.lon, b.lon) && y >= std::min(a.lat, b.lat) &&
         y <= std::max(a.lat, b.lat);
}

bool on_ring_boundary(const Ring& ring, double x, double y) {
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    if (on_segment(ring[i], ring[i + 1], x, y)) return true;
  }
  return false;
}

// Crossing parity of a horizontal ray towards +lon. Half-open edge rule
// (a.lat > y) != (b.lat > y) counts shared vertices once.
bool ring_contains(const Ring& ring, double x, double y) {
  bool inside = false;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const Point& a = ring[i];
    const Point& b = ring[i + 1];
    if ((a.lat > y) != (b.lat > y)) {
      const double x_cross = a.lon + (y - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (x < x_cross) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

Region make_region(std::string region_id, LandUseClass land_use, std::vector<Ring> rings,
                   std::string parent_id) {
  if (rings.empty())
    throw Error(ErrorCode::DegenerateRing, fmt::format("region '{}' has no rings", region_id));
  Region r;
  r.parent_id = parent_id.empty() ? region_id : std::move(parent_id);
  r.region_id = std::move(region_id);
  r.land_use = land_use;
  constexpr double inf = std::numeric_limits<double>::infinity();
  r.bbox = {inf, inf, -inf, -inf};
  for (auto& ring : rings) {
    for (const auto& p : ring) {
      if (!std::isfinite(p.lon) || !std::isfinite(p.lat))
        throw Error(ErrorCode::DegenerateRing,
                    fmt::format("region '{}' has a non-finite vertex", r.region_id));
    }
    if (!ring.empty() && !(ring.front() == ring.back())) ring.push_back(ring.front());
    if (distinct_vertices(ring) < 3)
      throw Error(ErrorCode::DegenerateRing,
                  fmt::format("region '{}' has a ring with fewer than 3 distinct vertices", r.region_id));
    for (const auto& p : ring) r.bbox.expand({p.lon, p.lat, p.lon, p.lat});
  }
  r.rings = std::move(rings);
  return r;
}

bool point_in_polygon(const Region& region, double lon, double lat) {
  if (!region.bbox.contains(lon, lat)) return false;
  for (const auto& ring : region.rings) {
    if (on_ring_boundary(ring, lon, lat)) return true;
  }
  if (!ring_contains(region.rings.front(), lon, lat)) return false;
  for (std::size_t h = 1; h < region.rings.size(); ++h) {
    if (ring_contains(region.rings[h], lon, lat)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// RegionSet

RegionSet::RegionSet(std::vector<Region> regions) : regions_(std::move(regions)) {
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    const auto& r = regions_[i];
    if (!by_id_.emplace(r.region_id, i).second)
      throw Error(ErrorCode::DuplicateId, fmt::format("duplicate region_id '{}'", r.region_id));
    if (parent_use_.emplace(r.parent_id, r.land_use).second) parent_ids_.push_back(r.parent_id);
  }
  build_index();
}

void RegionSet::build_index() {
  if (regions_.empty()) return;
  extent_ = regions_.front().bbox;
  double max_side = 0.0;
  for (const auto& r : regions_) {
    extent_.expand(r.bbox);
    max_side = std::max({max_side, r.bbox.max_lon - r.bbox.min_lon, r.bbox.max_lat - r.bbox.min_lat});
  }
  const double span = std::max(extent_.max_lon - extent_.min_lon, extent_.max_lat - extent_.min_lat);
  // Cell side is the largest region bbox side, shrunk so the extent is
  // covered by at least 16 cells along its longer axis. Capped at 1024 cells
  // per axis so tiny scattered regions cannot blow up the grid.
  cell_ = std::max(std::min(max_side, span / 16.0), span / 1024.0);
  if (!(cell_ > 0.0)) cell_ = 1.0;
  cols_ = static_cast<std::size_t>(std::floor((extent_.max_lon - extent_.min_lon) / cell_)) + 1;
  rows_ = static_cast<std::size_t>(std::floor((extent_.max_lat - extent_.min_lat) / cell_)) + 1;
  cols_ = std::max<std::size_t>(cols_, 16);
  rows_ = std::max<std::size_t>(rows_, 16);
  cells_.assign(cols_ * rows_, {});

  auto col_of = [&](double lon) {
    const auto c = static_cast<std::size_t>(std::floor((lon - extent_.min_lon) / cell_));
    return std::min(c, cols_ - 1);
  };
  auto row_of = [&](double lat) {
    const auto r = static_cast<std::size_t>(std::floor((lat - extent_.min_lat) / cell_));
    return std::min(r, rows_ - 1);
  };
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    const auto& b = regions_[i].bbox;
    for (std::size_t row = row_of(b.min_lat); row <= row_of(b.max_lat); ++row) {
      for (std::size_t col = col_of(b.min_lon); col <= col_of(b.max_lon); ++col) {
        cells_[row * cols_ + col].push_back(i);
      }
    }
  }
}

const Region* RegionSet::find(std::string_view region_id) const {
  auto it = by_id_.find(std::string(region_id));
  return it == by_id_.end() ? nullptr : &regions_[it->second];
}

std::optional<LandUseClass> RegionSet::parent_land_use(std::string_view parent_id) const {
  auto it = parent_use_.find(std::string(parent_id));
  if (it == parent_use_.end()) return std::nullopt;
  return it->second;
}

std::span<const std::size_t> RegionSet::candidates(double lon, double lat) const {
  if (cells_.empty() || !extent_.contains(lon, lat)) return {};
  const auto col = std::min(static_cast<std::size_t>(std::floor((lon - extent_.min_lon) / cell_)), cols_ - 1);
  const auto row = std::min(static_cast<std::size_t>(std::floor((lat - extent_.min_lat) / cell_)), rows_ - 1);
  return cells_[row * cols_ + col];
}

std::optional<std::string> RegionSet::assign_region(double lon, double lat) const {
  const Region* best = nullptr;
  for (auto i : candidates(lon, lat)) {
    const Region& r = regions_[i];
    if (best && r.region_id >= best->region_id) continue;
    if (point_in_polygon(r, lon, lat)) best = &r;
  }
  if (!best) return std::nullopt;
  return best->region_id;
}

// ---------------------------------------------------------------------------
// GeoJSON

namespace {

Ring parse_ring(const json& coords, std::string_view id) {
  if (!coords.is_array())
    throw Error(ErrorCode::Malformed, fmt::format("region '{}': ring is not an array", id));
  Ring ring;
  ring.reserve(coords.size());
  for (const auto& pos : coords) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number())
      throw Error(ErrorCode::Malformed, fmt::format("region '{}': bad position", id));
    ring.push_back({pos[0].get<double>(), pos[1].get<double>()});
  }
  return ring;
}

std::vector<Ring> parse_polygon(const json& coords, std::string_view id) {
  if (!coords.is_array() || coords.empty())
    throw Error(ErrorCode::Malformed, fmt::format("region '{}': polygon needs at least one ring", id));
  std::vector<Ring> rings;
  for (const auto& ring : coords) rings.push_back(parse_ring(ring, id));
  return rings;
}

std::string string_property(const json& props, const char* key, std::size_t feature_index) {
  if (!props.is_object() || !props.contains(key) || !props[key].is_string())
    throw Error(key == std::string_view("land_use") ? ErrorCode::UnknownLandUse : ErrorCode::Malformed,
                fmt::format("feature {}: missing string property '{}'", feature_index, key));
  return props[key].get<std::string>();
}

}  // namespace

RegionSet parse_regions(std::string_view geojson) {
  json doc;
  try {
    doc = json::parse(geojson);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Malformed, fmt::format("invalid JSON: {}", e.what()));
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc["features"].is_array())
    throw Error(ErrorCode::Malformed, "expected a GeoJSON FeatureCollection");

  std::vector<Region> regions;
  std::unordered_map<std::string, std::size_t> seen;
  const auto& features = doc["features"];
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& f = features[i];
    if (!f.is_object() || !f.contains("geometry") || !f["geometry"].is_object())
      throw Error(ErrorCode::Malformed, fmt::format("feature {}: missing geometry", i));
    const json props = f.contains("properties") ? f["properties"] : json();
    const auto id = string_property(props, "region_id", i);
    const auto use = parse_land_use(string_property(props, "land_use", i));
    if (!seen.emplace(id, i).second)
      throw Error(ErrorCode::DuplicateId, fmt::format("duplicate region_id '{}' (feature {})", id, i));
    const auto& geom = f["geometry"];
    const auto type = geom.value("type", "");
    if (!geom.contains("coordinates"))
      throw Error(ErrorCode::Malformed, fmt::format("feature {}: geometry has no coordinates", i));
    if (type == "Polygon") {
      regions.push_back(make_region(id, use, parse_polygon(geom["coordinates"], id)));
    } else if (type == "MultiPolygon") {
      const auto& parts = geom["coordinates"];
      if (!parts.is_array() || parts.empty())
        throw Error(ErrorCode::Malformed, fmt::format("feature {}: empty MultiPolygon", i));
      for (std::size_t k = 0; k < parts.size(); ++k) {
        regions.push_back(
            make_region(fmt::format("{}#{}", id, k), use, parse_polygon(parts[k], id), id));
      }
    } else {
      throw Error(ErrorCode::Malformed,
                  fmt::format("feature {}: geometry type '{}' is not Polygon or MultiPolygon", i, type));
    }
  }
  return RegionSet(std::move(regions));
}

RegionSet load_regions(const std::string& path) { return parse_regions(read_text_file(path)); }

std::string_view parent_region_id(std::string_view region_id) {
  const auto hash = region_id.rfind('#');
  if (hash == std::string_view::npos || hash + 1 == region_id.size()) return region_id;
  for (auto c : region_id.substr(hash + 1)) {
    if (c < '0' || c > '9') return region_id;
  }
  return region_id.substr(0, hash);
}

}  // namespace landuse::geo
