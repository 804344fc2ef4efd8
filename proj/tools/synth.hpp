#pragma once

// Deterministic synthetic "campus" datasets: a grid of land-use regions,
// geolocated photos scattered over them, an auxiliary keyword pool, an
// indoor/outdoor manifest and separable non-negative feature vectors.

#include <cstdint>
#include <string>
#include <vector>

#include "landuse/corpus.hpp"
#include "landuse/features.hpp"
#include "landuse/geo.hpp"

namespace landuse::synth {

struct CampusSpec {
  std::uint64_t seed = 7;
  std::size_t grid = 4;  // grid x grid regions
  std::size_t geolocated = 2000;
  std::size_t auxiliary = 5000;
  std::size_t in_out = 1000;
  std::uint32_t dim = 64;
  /// Share of geolocated photos placed outside every region.
  double outside_fraction = 0.1;
  double indoor_probability = 0.5;
  /// Indoor images of class c carry the feature signature of class c + 4,
  /// so land-use structure depends on the indoor/outdoor branch.
  bool branch_dependent = false;
  double signal = 3.0;
  double noise = 0.35;
};

struct Campus {
  std::string regions_geojson;
  std::vector<corpus::PhotoRecord> photos;  // geolocated and auxiliary
  std::vector<corpus::PhotoRecord> in_out;
  std::string keywords_json;
  features::FeatureStore store;
};

Campus make_campus(const CampusSpec& spec);

/// Writes regions.geojson, photos.jsonl, inout.jsonl, keywords.json,
/// features.fvec and config.json (pointing at those files, output into
/// `<dir>/out`) into `dir`, which must exist.
void write_campus(const Campus& campus, const std::string& dir, std::uint64_t pipeline_seed = 42);

/// Feature vector for an image whose appearance matches `cls` in branch
/// `io`: non-negative, with an indoor indicator in component 0.
std::vector<float> campus_features(LandUseClass cls, InOut io, const CampusSpec& spec, std::uint64_t stream);

}  // namespace landuse::synth
