#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>

#include "landuse/common.hpp"
#include "landuse/geo.hpp"

namespace landuse::mapgen {

enum class LegendPlacement { right, bottom };

struct MapStyle {
  /// Indexed by LandUseClass.
  std::array<std::string, kNumLandUseClasses> fill = {
      "#808080",  // study: gray
      "#8B4513",  // residence: brown
      "#FF0000",  // hospital: red
      "#006400",  // park: dark green
      "#FFD700",  // gym: yellow
      "#90EE90",  // playground: light green
      "#0000FF",  // water: blue
      "#800080",  // theater: purple
  };
  std::string unlabeled_fill = "#FFFFFF";
  std::string unlabeled_stroke = "#808080";
  std::string background = "#F5F5F0";
  std::string stroke = "#333333";
  double stroke_width = 0.6;
  std::string title = "Land use map";
  LegendPlacement legend = LegendPlacement::right;
  /// Width of the map area in SVG user units; height follows the aspect.
  double map_width = 800.0;
  /// Optional pre-rendered SVG fragment (e.g. a street network) drawn above
  /// the regions and beneath the legend. Inserted verbatim.
  std::string overlay_svg;
};

/// Keyed by parent region id; nullopt = unlabeled.
using RegionLabels = std::map<std::string, std::optional<LandUseClass>>;

/// Ground-truth labels of every parent region.
RegionLabels ground_truth_labels(const geo::RegionSet& rs);

/// Standalone SVG 1.1 document: one <path> per parent region (parts and
/// holes are subpaths, fill-rule evenodd), title, and a nine-entry legend.
/// Throws UnknownRegion when a region has no entry in `labels`.
std::string render_map(const geo::RegionSet& rs, const RegionLabels& labels, const MapStyle& style);

void write_map(const geo::RegionSet& rs, const RegionLabels& labels, const MapStyle& style,
               const std::string& path);

}  // namespace landuse::mapgen
