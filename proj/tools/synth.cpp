#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <fmt/format.h>
#include <json.hpp>

#include "landuse/io.hpp"
#include "landuse/random.hpp"

namespace landuse::synth {

using nlohmann::ordered_json;

namespace {

constexpr double kOriginLon = -122.175;
constexpr double kOriginLat = 37.425;
constexpr double kCell = 0.003;
constexpr double kSide = 0.0024;

const std::array<std::vector<std::string>, kNumLandUseClasses>& keyword_lists() {
  static const std::array<std::vector<std::string>, kNumLandUseClasses> lists = {{
      {"study", "library", "classroom", "lecture"},
      {"residence", "dorm", "dormitory", "apartment"},
      {"hospital", "clinic", "medical"},
      {"park", "garden", "lawn"},
      {"gym", "fitness", "workout"},
      {"playground", "stadium", "field", "court"},
      {"water", "lake", "pond", "fountain"},
      {"theater", "auditorium", "concert"},
  }};
  return lists;
}

const std::vector<std::string>& noise_keywords() {
  static const std::vector<std::string> words = {"campus", "stanford", "photo", "travel", "friends", "sunset"};
  return words;
}

double round7(double v) { return std::round(v * 1e7) / 1e7; }

ordered_json ring_json(const geo::Ring& ring) {
  ordered_json r = ordered_json::array();
  for (const auto& p : ring) r.push_back({p.lon, p.lat});
  return r;
}

geo::Ring rect(double lon0, double lat0, double lon1, double lat1) {
  return {{lon0, lat0}, {lon1, lat0}, {lon1, lat1}, {lon0, lat1}, {lon0, lat0}};
}

}  // namespace

std::vector<float> campus_features(LandUseClass cls, InOut io, const CampusSpec& spec, std::uint64_t stream) {
  Rng rng(derive_seed(spec.seed ^ 0xF00Dull, stream));
  std::vector<float> v(spec.dim);
  for (auto& x : v) x = static_cast<float>(std::max(0.0, spec.noise * standard_normal(rng)));
  const bool indoor = io == InOut::indoor;
  if (indoor) v[0] += static_cast<float>(spec.signal);
  auto apparent = static_cast<std::size_t>(cls);
  if (spec.branch_dependent && indoor) apparent = (apparent + 4) % kNumLandUseClasses;
  const std::size_t a = 1 + apparent;
  const std::size_t b = 1 + kNumLandUseClasses + apparent;
  if (a < v.size()) v[a] += static_cast<float>(spec.signal);
  if (b < v.size()) v[b] += static_cast<float>(spec.signal);
  return v;
}

Campus make_campus(const CampusSpec& spec) {
  Campus campus;
  campus.store = features::FeatureStore(spec.dim);
  Rng rng(spec.seed);

  // Regions: grid x grid squares; one with a hole and one split into a
  // two-part MultiPolygon.
  const std::size_t n_regions = spec.grid * spec.grid;
  const std::size_t hole_region = n_regions > 5 ? 5 : n_regions;
  const std::size_t multi_region = n_regions > 10 ? 10 : n_regions;
  ordered_json fc;
  fc["type"] = "FeatureCollection";
  fc["features"] = ordered_json::array();
  std::vector<geo::Region> regions;
  for (std::size_t k = 0; k < n_regions; ++k) {
    const double lon0 = kOriginLon + static_cast<double>(k % spec.grid) * kCell;
    const double lat0 = kOriginLat + static_cast<double>(k / spec.grid) * kCell;
    const double lon1 = lon0 + kSide;
    const double lat1 = lat0 + kSide;
    const auto cls = kAllLandUseClasses[(k + k / spec.grid) % kNumLandUseClasses];
    const std::string id = fmt::format("r{:02}", k);

    ordered_json feature;
    feature["type"] = "Feature";
    feature["properties"] = {{"region_id", id}, {"land_use", std::string(to_string(cls))}};
    if (k == multi_region) {
      const double mid = lon0 + kSide / 2.0;
      const auto left = rect(lon0, lat0, mid - 0.0002, lat1);
      const auto right = rect(mid + 0.0002, lat0, lon1, lat1);
      feature["geometry"] = {{"type", "MultiPolygon"},
                             {"coordinates", {ordered_json::array({ring_json(left)}), ordered_json::array({ring_json(right)})}}};
      regions.push_back(geo::make_region(id + "#0", cls, {left}, id));
      regions.push_back(geo::make_region(id + "#1", cls, {right}, id));
    } else if (k == hole_region) {
      const auto outer = rect(lon0, lat0, lon1, lat1);
      const double q = kSide / 3.0;
      const auto hole = rect(lon0 + q, lat0 + q, lon1 - q, lat1 - q);
      feature["geometry"] = {{"type", "Polygon"}, {"coordinates", {ring_json(outer), ring_json(hole)}}};
      regions.push_back(geo::make_region(id, cls, {outer, hole}));
    } else {
      const auto outer = rect(lon0, lat0, lon1, lat1);
      feature["geometry"] = {{"type", "Polygon"}, {"coordinates", {ring_json(outer)}}};
      regions.push_back(geo::make_region(id, cls, {outer}));
    }
    fc["features"].push_back(std::move(feature));
  }
  campus.regions_geojson = fc.dump(1);
  const geo::RegionSet rs(regions);
  const auto ext = rs.extent();

  auto draw_io = [&] { return uniform_unit(rng) < spec.indoor_probability ? InOut::indoor : InOut::outdoor; };
  std::uint64_t stream = 0;

  // Geolocated photos.
  for (std::size_t i = 0; i < spec.geolocated; ++i) {
    corpus::PhotoRecord p;
    p.photo_id = fmt::format("g{:05}", i);
    p.source = corpus::Source::geolocated;
    const bool outside = uniform_unit(rng) < spec.outside_fraction;
    double lon = 0.0, lat = 0.0;
    LandUseClass cls = kAllLandUseClasses[uniform_index(rng, kNumLandUseClasses)];
    if (outside) {
      do {
        lon = round7(ext.min_lon - 0.001 + uniform_unit(rng) * (ext.max_lon - ext.min_lon + 0.002));
        lat = round7(ext.min_lat - 0.001 + uniform_unit(rng) * (ext.max_lat - ext.min_lat + 0.002));
      } while (rs.assign_region(lon, lat));
    } else {
      const auto& parent = rs.parent_ids()[uniform_index(rng, rs.parent_ids().size())];
      cls = *rs.parent_land_use(parent);
      while (true) {
        const auto& b = regions[static_cast<std::size_t>(uniform_index(rng, regions.size()))];
        if (b.parent_id != parent) continue;
        lon = round7(b.bbox.min_lon + uniform_unit(rng) * (b.bbox.max_lon - b.bbox.min_lon));
        lat = round7(b.bbox.min_lat + uniform_unit(rng) * (b.bbox.max_lat - b.bbox.min_lat));
        if (geo::point_in_polygon(b, lon, lat)) break;
      }
    }
    p.lon = lon;
    p.lat = lat;
    const auto io = draw_io();
    campus.store.add(p.photo_id, campus_features(cls, io, spec, stream++));
    campus.photos.push_back(std::move(p));
  }

  // Auxiliary keyword pool.
  const auto& lists = keyword_lists();
  const auto& noise = noise_keywords();
  for (std::size_t i = 0; i < spec.auxiliary; ++i) {
    corpus::PhotoRecord p;
    p.photo_id = fmt::format("a{:05}", i);
    p.source = corpus::Source::auxiliary;
    const auto cls = kAllLandUseClasses[uniform_index(rng, kNumLandUseClasses)];
    const auto& words = lists[static_cast<std::size_t>(cls)];
    const double roll = uniform_unit(rng);
    if (roll < 0.1) {
      p.keywords = {noise[uniform_index(rng, noise.size())]};
    } else if (roll < 0.4) {
      p.keywords = {noise[uniform_index(rng, noise.size())], words[uniform_index(rng, words.size())]};
    } else {
      p.keywords = {words[uniform_index(rng, words.size())]};
    }
    const auto io = draw_io();
    campus.store.add(p.photo_id, campus_features(cls, io, spec, stream++));
    campus.photos.push_back(std::move(p));
  }

  // Indoor/outdoor router manifest.
  for (std::size_t i = 0; i < spec.in_out; ++i) {
    corpus::PhotoRecord p;
    p.photo_id = fmt::format("io{:05}", i);
    p.source = corpus::Source::auxiliary;
    const auto io = draw_io();
    const auto cls = kAllLandUseClasses[uniform_index(rng, kNumLandUseClasses)];
    p.keywords = {std::string(to_string(io))};
    p.in_out = io;
    campus.store.add(p.photo_id, campus_features(cls, io, spec, stream++));
    campus.in_out.push_back(std::move(p));
  }

  ordered_json kw;
  for (std::size_t c = 0; c < kNumLandUseClasses; ++c) kw[std::string(to_string(kAllLandUseClasses[c]))] = lists[c];
  campus.keywords_json = kw.dump(1) + "\n";
  return campus;
}

void write_campus(const Campus& campus, const std::string& dir, std::uint64_t pipeline_seed) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  write_text_file((root / "regions.geojson").string(), campus.regions_geojson + "\n");
  corpus::write_manifest((root / "photos.jsonl").string(), campus.photos);
  corpus::write_manifest((root / "inout.jsonl").string(), campus.in_out);
  write_text_file((root / "keywords.json").string(), campus.keywords_json);
  features::write_store(campus.store, (root / "features.fvec").string());

  ordered_json cfg;
  cfg["seed"] = pipeline_seed;
  cfg["fraction"] = 0.2;
  cfg["target"] = 3000;
  cfg["folds"] = 5;
  cfg["tol"] = 0.1;
  cfg["threads"] = 1;
  cfg["paths"] = {{"regions", "regions.geojson"}, {"photos", "photos.jsonl"}, {"inout", "inout.jsonl"},
                  {"keywords", "keywords.json"},   {"features", "features.fvec"}, {"output_dir", "out"}};
  cfg["style"] = {{"title", "Synthetic campus land use"}};
  write_text_file((root / "config.json").string(), cfg.dump(2) + "\n");
}

}  // namespace landuse::synth
