#include <doctest.h>

#include <regex>
#include <set>

#include "landuse/mapgen.hpp"
#include "support.hpp"

using namespace landuse;
using namespace landuse::mapgen;
using landuse::testing::square;

namespace {

// Tag balance check: every element is closed in order, attributes quoted.
bool well_formed(const std::string& xml) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  std::size_t roots = 0;
  while ((pos = xml.find('<', pos)) != std::string::npos) {
    const auto end = xml.find('>', pos);
    if (end == std::string::npos) return false;
    std::string tag = xml.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.starts_with("?")) continue;
    if (tag.starts_with("/")) {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    if (std::count(tag.begin(), tag.end(), '"') % 2 != 0) return false;
    const bool self_closing = tag.ends_with("/");
    const auto name = tag.substr(0, tag.find_first_of(" /"));
    if (stack.empty()) ++roots;
    if (!self_closing) stack.push_back(name);
  }
  return stack.empty() && roots == 1;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

geo::RegionSet sample_regions() {
  return geo::RegionSet({geo::make_region("a", LandUseClass::park, {square(0, 0, 1, 1)}),
                         geo::make_region("b#0", LandUseClass::water, {square(2, 0, 3, 1)}, "b"),
                         geo::make_region("b#1", LandUseClass::water, {square(2, 2, 3, 3), square(2.2, 2.2, 2.8, 2.8)}, "b"),
                         geo::make_region("c", LandUseClass::gym, {square(0, 2, 1, 3)})});
}

}  // namespace

TEST_CASE("one park square renders one path and a nine-entry legend") {
  const geo::RegionSet rs({geo::make_region("p", LandUseClass::park, {square(0, 0, 1, 1)})});
  const auto svg = render_map(rs, ground_truth_labels(rs), MapStyle{});
  CHECK(well_formed(svg));
  CHECK(count(svg, "<path ") == 1);
  CHECK(svg.find("data-region=\"p\" data-class=\"park\" fill=\"#006400\"") != std::string::npos);
  CHECK(count(svg, "class=\"legend-entry\"") == 9);
  CHECK(svg.find(">Land use map</text>") != std::string::npos);
}

TEST_CASE("parts share their parent's path and holes become subpaths") {
  const auto rs = sample_regions();
  const auto svg = render_map(rs, ground_truth_labels(rs), MapStyle{});
  CHECK(well_formed(svg));
  CHECK(count(svg, "<path ") == rs.parent_ids().size());
  const auto b = svg.find("data-region=\"b\"");
  REQUIRE(b != std::string::npos);
  const auto d = svg.substr(b, svg.find("/>", b) - b);
  CHECK(count(d, "M") == 3);
  CHECK(svg.find("fill-rule=\"evenodd\"") != std::string::npos);
}

TEST_CASE("fills come from the palette and unlabeled regions are white") {
  const auto rs = sample_regions();
  RegionLabels labels{{"a", LandUseClass::study}, {"b", std::nullopt}, {"c", LandUseClass::theater}};
  MapStyle style;
  const auto svg = render_map(rs, labels, style);
  std::set<std::string> palette(style.fill.begin(), style.fill.end());
  palette.insert(style.unlabeled_fill);
  const std::regex fill_re("<path [^>]*fill=\"(#[0-9A-F]{6})\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), fill_re); it != std::sregex_iterator(); ++it) {
    CHECK(palette.contains((*it)[1].str()));
  }
  CHECK(svg.find("data-region=\"b\" data-class=\"unlabeled\" fill=\"#FFFFFF\" stroke=\"#808080\"") != std::string::npos);
  CHECK(svg.find("data-class=\"study\" fill=\"#808080\"") != std::string::npos);
}

TEST_CASE("default palette uses eight distinct named colours") {
  const MapStyle s;
  const std::array<const char*, 8> want{"#808080", "#8B4513", "#FF0000", "#006400",
                                        "#FFD700", "#90EE90", "#0000FF", "#800080"};
  for (std::size_t c = 0; c < 8; ++c) CHECK(s.fill[c] == want[c]);
  CHECK(std::set<std::string>(s.fill.begin(), s.fill.end()).size() == 8);
}

TEST_CASE("north is up") {
  const geo::RegionSet rs({geo::make_region("s", LandUseClass::park, {square(0, 0, 1, 1)}),
                           geo::make_region("n", LandUseClass::water, {square(0, 5, 1, 6)})});
  const auto svg = render_map(rs, ground_truth_labels(rs), MapStyle{});
  auto first_y = [&](const std::string& id) {
    const auto p = svg.find("d=\"M", svg.find("data-region=\"" + id + "\""));
    const auto sp = svg.find(' ', p);
    return std::stod(svg.substr(sp + 1));
  };
  CHECK(first_y("n") < first_y("s"));
}

TEST_CASE("rendering is deterministic and honours style overrides") {
  const auto rs = sample_regions();
  MapStyle style;
  style.title = "Campus <test> & co";
  style.background = "#000000";
  style.legend = LegendPlacement::bottom;
  style.overlay_svg = "<line x1=\"0\" y1=\"0\" x2=\"5\" y2=\"5\" stroke=\"black\"/>";
  const auto a = render_map(rs, ground_truth_labels(rs), style);
  CHECK(a == render_map(rs, ground_truth_labels(rs), style));
  CHECK(well_formed(a));
  CHECK(a.find("Campus &lt;test&gt; &amp; co") != std::string::npos);
  CHECK(a.find("fill=\"#000000\"") != std::string::npos);
  CHECK(a.find("<g id=\"overlay\">") < a.find("<g id=\"legend\""));
}

TEST_CASE("a region without a label entry is an error") {
  const auto rs = sample_regions();
  RegionLabels labels{{"a", LandUseClass::park}};
  CHECK_THROWS_AS(render_map(rs, labels, MapStyle{}), Error);
  testing::TempDir dir("map");
  CHECK_THROWS_AS(write_map(rs, ground_truth_labels(rs), MapStyle{}, dir.file("missing/dir/x.svg")), Error);
}
