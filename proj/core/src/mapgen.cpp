#include "landuse/mapgen.hpp"

#include <algorithm>
#include <map>
#include <vector>

#include <fmt/format.h>

#include "landuse/io.hpp"

namespace landuse::mapgen {

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

// Prints with two decimals and normalizes -0.00 to 0.00.
std::string num(double v) {
  auto s = fmt::format("{:.2f}", v);
  if (s == "-0.00") s = "0.00";
  return s;
}

constexpr double kMargin = 20.0;
constexpr double kTitleBand = 40.0;
constexpr double kLegendRow = 22.0;
constexpr double kLegendWidth = 170.0;

}  // namespace

RegionLabels ground_truth_labels(const geo::RegionSet& rs) {
  RegionLabels labels;
  for (const auto& id : rs.parent_ids()) labels[id] = rs.parent_land_use(id);
  return labels;
}

std::string render_map(const geo::RegionSet& rs, const RegionLabels& labels, const MapStyle& style) {
  for (const auto& id : rs.parent_ids()) {
    if (!labels.contains(id)) throw Error(ErrorCode::UnknownRegion, fmt::format("region '{}' has no label entry", id));
  }

  // Affine fit: uniform scale, latitude flipped so north is up.
  const auto& ext = rs.extent();
  const double lon_span = std::max(ext.max_lon - ext.min_lon, 1e-12);
  const double lat_span = std::max(ext.max_lat - ext.min_lat, 1e-12);
  const double scale = style.map_width / std::max(lon_span, lat_span);
  const double map_w = lon_span * scale;
  const double map_h = lat_span * scale;
  const double x0 = kMargin;
  const double y0 = kMargin + kTitleBand;
  auto sx = [&](double lon) { return x0 + (lon - ext.min_lon) * scale; };
  auto sy = [&](double lat) { return y0 + (ext.max_lat - lat) * scale; };

  const double legend_h = kLegendRow * (kNumLandUseClasses + 1) + 16.0;
  double width = 0.0, height = 0.0, lx = 0.0, ly = 0.0;
  if (style.legend == LegendPlacement::right) {
    width = x0 + map_w + kMargin + kLegendWidth + kMargin;
    height = std::max(y0 + map_h, y0 + legend_h) + kMargin;
    lx = x0 + map_w + kMargin;
    ly = y0;
  } else {
    width = std::max(x0 + map_w, x0 + kLegendWidth) + kMargin;
    height = y0 + map_h + kMargin + legend_h + kMargin;
    lx = x0;
    ly = y0 + map_h + kMargin;
  }

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n";
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n",
      num(width), num(height));
  svg += fmt::format("  <rect id=\"background\" x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n", num(width),
                     num(height), xml_escape(style.background));
  svg += fmt::format(
      "  <text id=\"title\" x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"20\" font-weight=\"bold\">{}</text>\n",
      num(x0), num(kMargin + 24.0), xml_escape(style.title));

  // Parts of one parent share a path element.
  std::map<std::string, std::vector<const geo::Region*>> parts;
  for (const auto& r : rs.regions()) parts[r.parent_id].push_back(&r);

  svg += "  <g id=\"regions\" fill-rule=\"evenodd\" stroke-linejoin=\"round\">\n";
  for (const auto& id : rs.parent_ids()) {
    std::string d;
    for (const auto* part : parts[id]) {
      for (const auto& ring : part->rings) {
        // Closing vertex duplicates the first; Z closes the subpath.
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
          d += fmt::format("{}{} {} ", i == 0 ? "M" : "L", num(sx(ring[i].lon)), num(sy(ring[i].lat)));
        }
        d += "Z ";
      }
    }
    if (!d.empty()) d.pop_back();
    const auto& label = labels.at(id);
    const std::string& fill = label ? style.fill[static_cast<std::size_t>(*label)] : style.unlabeled_fill;
    const std::string& stroke = label ? style.stroke : style.unlabeled_stroke;
    svg += fmt::format(
        "    <path data-region=\"{}\" data-class=\"{}\" fill=\"{}\" stroke=\"{}\" stroke-width=\"{}\" d=\"{}\"/>\n",
        xml_escape(id), label ? to_string(*label) : "unlabeled", xml_escape(fill), xml_escape(stroke),
        style.stroke_width, d);
  }
  svg += "  </g>\n";

  if (!style.overlay_svg.empty()) {
    svg += "  <g id=\"overlay\">\n";
    svg += style.overlay_svg;
    if (style.overlay_svg.back() != '\n') svg += '\n';
    svg += "  </g>\n";
  }

  svg += fmt::format("  <g id=\"legend\" transform=\"translate({},{})\" font-family=\"sans-serif\" font-size=\"13\">\n",
                     num(lx), num(ly));
  svg += fmt::format("    <rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#FFFFFF\" stroke=\"#999999\"/>\n",
                     num(kLegendWidth), num(legend_h));
  auto entry = [&](std::size_t row, std::string_view name, const std::string& fill, const std::string& stroke) {
    const double y = 8.0 + kLegendRow * static_cast<double>(row);
    svg += fmt::format(
        "    <g class=\"legend-entry\"><rect x=\"10\" y=\"{}\" width=\"16\" height=\"16\" fill=\"{}\" stroke=\"{}\"/>"
        "<text x=\"34\" y=\"{}\">{}</text></g>\n",
        num(y), xml_escape(fill), xml_escape(stroke), num(y + 13.0), name);
  };
  for (std::size_t c = 0; c < kNumLandUseClasses; ++c) {
    entry(c, to_string(kAllLandUseClasses[c]), style.fill[c], style.stroke);
  }
  entry(kNumLandUseClasses, "unlabeled", style.unlabeled_fill, style.unlabeled_stroke);
  svg += "  </g>\n";
  svg += "</svg>\n";
  return svg;
}

void write_map(const geo::RegionSet& rs, const RegionLabels& labels, const MapStyle& style, const std::string& path) {
  write_text_file(path, render_map(rs, labels, style));
}

}  // namespace landuse::mapgen
