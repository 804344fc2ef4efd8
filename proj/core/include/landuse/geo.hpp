#pragma once

// Land-use region polygons, containment tests and the grid index used to
// assign photo coordinates to regions. Coordinates are planar lon/lat
// degrees; at campus scale the distortion is negligible.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "landuse/common.hpp"

namespace landuse::geo {

struct Point {
  double lon = 0.0;
  double lat = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct BBox {
  double min_lon = 0.0;
  double min_lat = 0.0;
  double max_lon = 0.0;
  double max_lat = 0.0;

  bool contains(double lon, double lat) const {
    return lon >= min_lon && lon <= max_lon && lat >= min_lat && lat <= max_lat;
  }
  void expand(const BBox& other);
};

/// Closed ring: front() == back().
using Ring = std::vector<Point>;

struct Region {
  std::string region_id;
  /// Id of the source feature. Equal to region_id except for MultiPolygon
  /// parts, whose region_id is "<parent_id>#k".
  std::string parent_id;
  LandUseClass land_use = LandUseClass::study;
  /// rings[0] is the outer ring, the rest are holes.
  std::vector<Ring> rings;
  BBox bbox;
};

/// Builds a validated region: rings are closed if needed and the bbox is
/// computed. Throws Error{DegenerateRing} when a ring has fewer than three
/// distinct vertices or a coordinate is not finite.
Region make_region(std::string region_id, LandUseClass land_use, std::vector<Ring> rings,
                   std::string parent_id = {});

/// Even-odd containment against the outer ring, excluding holes. Points on
/// any boundary edge or vertex (outer or hole) count as inside.
bool point_in_polygon(const Region& region, double lon, double lat);

/// Immutable collection of regions with a uniform grid over their bboxes.
/// Safe for concurrent queries once constructed.
class RegionSet {
 public:
  RegionSet() = default;
  /// Throws Error{DuplicateId} when two regions share a region_id.
  explicit RegionSet(std::vector<Region> regions);

  std::span<const Region> regions() const { return regions_; }
  std::size_t size() const { return regions_.size(); }
  bool empty() const { return regions_.empty(); }

  const Region* find(std::string_view region_id) const;

  /// Distinct parent ids in load order; one entry per source feature.
  const std::vector<std::string>& parent_ids() const { return parent_ids_; }

  /// Land use of a parent feature (all of its parts share it).
  std::optional<LandUseClass> parent_land_use(std::string_view parent_id) const;

  /// Indices of regions whose bbox cell covers the point. Always a superset
  /// of the regions containing the point.
  std::span<const std::size_t> candidates(double lon, double lat) const;

  /// Containing region with the lexicographically smallest region_id.
  std::optional<std::string> assign_region(double lon, double lat) const;

  const BBox& extent() const { return extent_; }
  std::size_t grid_columns() const { return cols_; }
  std::size_t grid_rows() const { return rows_; }
  double cell_size() const { return cell_; }

 private:
  void build_index();

  std::vector<Region> regions_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::vector<std::string> parent_ids_;
  std::unordered_map<std::string, LandUseClass> parent_use_;
  BBox extent_;
  double cell_ = 1.0;
  std::size_t cols_ = 0;
  std::size_t rows_ = 0;
  std::vector<std::vector<std::size_t>> cells_;
};

/// Parses a GeoJSON FeatureCollection of Polygon / MultiPolygon features
/// carrying string properties `region_id` and `land_use`.
RegionSet parse_regions(std::string_view geojson);
RegionSet load_regions(const std::string& path);

/// Strips a trailing "#k" part suffix produced for MultiPolygon parts.
std::string_view parent_region_id(std::string_view region_id);

}  // namespace landuse::geo
