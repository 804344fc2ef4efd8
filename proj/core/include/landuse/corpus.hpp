#pragma once

// Photo manifests (JSONL), ground-truth labeling by location, the stratified
// base split and keyword-pool augmentation of the training set.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "landuse/common.hpp"
#include "landuse/geo.hpp"

namespace landuse::corpus {

enum class Source : std::uint8_t { geolocated, auxiliary };
enum class Origin : std::uint8_t { base, auxiliary };

std::string_view to_string(Source s);
std::string_view to_string(Origin o);

struct PhotoRecord {
  std::string photo_id;
  std::optional<double> lon;
  std::optional<double> lat;
  Source source = Source::geolocated;
  std::vector<std::string> keywords;
  std::optional<LandUseClass> true_class;
  std::optional<InOut> in_out;
  /// Set by label_by_location.
  std::optional<std::string> region_id;
  /// Set by augment.
  std::optional<Origin> origin;
};

/// Parses JSONL. Errors carry the 1-based line number: Malformed,
/// DuplicateId, MissingCoordinates (geolocated record without finite
/// lon/lat). Blank lines are skipped.
std::vector<PhotoRecord> parse_manifest(std::string_view jsonl);
std::vector<PhotoRecord> load_manifest(const std::string& path);

std::string format_manifest(std::span<const PhotoRecord> records);
void write_manifest(const std::string& path, std::span<const PhotoRecord> records);

struct LabeledPhotos {
  /// Geolocated photos inside some region, sorted by photo_id.
  std::vector<PhotoRecord> labeled;
  /// Auxiliary photos, untouched, sorted by photo_id.
  std::vector<PhotoRecord> auxiliary;
  /// Geolocated photos that fell in no region.
  std::size_t dropped = 0;
};

LabeledPhotos label_by_location(std::span<const PhotoRecord> photos, const geo::RegionSet& regions,
                                unsigned threads = 1);

struct ClassCounts {
  std::size_t train = 0;
  std::size_t test = 0;
};

struct DatasetSplit {
  std::vector<std::string> train_ids;  // sorted
  std::vector<std::string> test_ids;   // sorted
  std::uint64_t seed = 0;
  std::array<ClassCounts, kNumLandUseClasses> per_class{};
};

/// Per class, floor(fraction * n_c) ids go to train; ids are sorted before a
/// seeded shuffle so the result depends only on (seed, id set).
DatasetSplit split(std::span<const PhotoRecord> labeled, double fraction, std::uint64_t seed);

/// Selects the records named in `ids` (which must be sorted), preserving
/// the order of `records`.
std::vector<PhotoRecord> select(std::span<const PhotoRecord> records, std::span<const std::string> ids);

class KeywordMap {
 public:
  /// Every class maps to its own name.
  KeywordMap();
  /// Throws InvalidArgument when a class has no keywords.
  explicit KeywordMap(std::array<std::vector<std::string>, kNumLandUseClasses> keywords);

  const std::vector<std::string>& keywords(LandUseClass c) const {
    return keywords_[static_cast<std::size_t>(c)];
  }
  /// First class (in enum order) listing the keyword.
  std::optional<LandUseClass> class_of(std::string_view keyword) const;

 private:
  std::array<std::vector<std::string>, kNumLandUseClasses> keywords_;
  std::map<std::string, LandUseClass, std::less<>> lookup_;
};

/// JSON object {class: [keyword, ...]}; unknown class names are errors and a
/// class absent from the object is searched by its own name.
KeywordMap parse_keyword_map(std::string_view json_text);
KeywordMap load_keyword_map(const std::string& path);

struct AugmentClassSummary {
  std::size_t base = 0;
  std::size_t candidates = 0;
  std::size_t added = 0;
  std::size_t final_count = 0;
  std::size_t shortfall = 0;
};

struct AugmentResult {
  /// Base and auxiliary training records sorted by photo_id, each with
  /// true_class and origin set.
  std::vector<PhotoRecord> train;
  std::array<AugmentClassSummary, kNumLandUseClasses> summary{};
};

/// Tops each class up to `target` images from the auxiliary pool. An
/// auxiliary record is a candidate for the class of its first keyword that
/// appears in the keyword map. Classes already at or above target take
/// nothing. Records whose id is already in the base set or in `test_ids`
/// (sorted) are never drawn.
AugmentResult augment(std::span<const PhotoRecord> base_train, std::span<const std::string> test_ids,
                      std::span<const PhotoRecord> aux_pool, const KeywordMap& kmap, std::size_t target,
                      std::uint64_t seed);

}  // namespace landuse::corpus
