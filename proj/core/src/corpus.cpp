#include "landuse/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "landuse/io.hpp"
#include "landuse/parallel.hpp"
#include "landuse/random.hpp"

namespace landuse::corpus {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Source s) { return s == Source::geolocated ? "geolocated" : "auxiliary"; }
std::string_view to_string(Origin o) { return o == Origin::base ? "base" : "auxiliary"; }

namespace {

[[noreturn]] void fail(ErrorCode code, std::size_t line, std::string_view what) {
  throw Error(code, fmt::format("line {}: {}", line, what));
}

std::optional<double> optional_number(const json& obj, const char* key, std::size_t line) {
  if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
  if (!obj[key].is_number()) fail(ErrorCode::Malformed, line, fmt::format("'{}' is not a number", key));
  return obj[key].get<double>();
}

std::optional<std::string> optional_string(const json& obj, const char* key, std::size_t line) {
  if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
  if (!obj[key].is_string()) fail(ErrorCode::Malformed, line, fmt::format("'{}' is not a string", key));
  return obj[key].get<std::string>();
}

std::string lowercase(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

PhotoRecord parse_record(const json& obj, std::size_t line) {
  if (!obj.is_object()) fail(ErrorCode::Malformed, line, "expected a JSON object");
  PhotoRecord r;
  auto id = optional_string(obj, "photo_id", line);
  if (!id || id->empty()) fail(ErrorCode::Malformed, line, "missing photo_id");
  r.photo_id = std::move(*id);
  r.lon = optional_number(obj, "lon", line);
  r.lat = optional_number(obj, "lat", line);

  const auto source = optional_string(obj, "source", line);
  if (!source) fail(ErrorCode::Malformed, line, "missing source");
  if (*source == "geolocated") {
    r.source = Source::geolocated;
  } else if (*source == "auxiliary") {
    r.source = Source::auxiliary;
  } else {
    fail(ErrorCode::Malformed, line, fmt::format("unknown source '{}'", *source));
  }

  if (obj.contains("keywords") && !obj["keywords"].is_null()) {
    if (!obj["keywords"].is_array()) fail(ErrorCode::Malformed, line, "'keywords' is not an array");
    for (const auto& k : obj["keywords"]) {
      if (!k.is_string()) fail(ErrorCode::Malformed, line, "keyword is not a string");
      r.keywords.push_back(lowercase(k.get<std::string>()));
    }
  }
  if (auto tc = optional_string(obj, "true_class", line)) {
    auto c = try_parse_land_use(*tc);
    if (!c) fail(ErrorCode::UnknownLandUse, line, fmt::format("'{}' is not a land-use class", *tc));
    r.true_class = *c;
  }
  if (auto io = optional_string(obj, "in_out", line)) {
    if (*io != "indoor" && *io != "outdoor")
      fail(ErrorCode::Malformed, line, fmt::format("in_out '{}' is neither indoor nor outdoor", *io));
    r.in_out = parse_in_out(*io);
  }
  r.region_id = optional_string(obj, "region_id", line);
  if (auto origin = optional_string(obj, "origin", line)) {
    if (*origin == "base") {
      r.origin = Origin::base;
    } else if (*origin == "auxiliary") {
      r.origin = Origin::auxiliary;
    } else {
      fail(ErrorCode::Malformed, line, fmt::format("unknown origin '{}'", *origin));
    }
  }

  if (r.source == Source::geolocated) {
    if (!r.lon || !r.lat || !std::isfinite(*r.lon) || !std::isfinite(*r.lat))
      fail(ErrorCode::MissingCoordinates, line,
           fmt::format("geolocated photo '{}' needs finite lon and lat", r.photo_id));
  } else if (r.keywords.empty()) {
    fail(ErrorCode::Malformed, line, fmt::format("auxiliary photo '{}' has no keywords", r.photo_id));
  }
  return r;
}

}  // namespace

std::vector<PhotoRecord> parse_manifest(std::string_view jsonl) {
  std::vector<PhotoRecord> out;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    auto end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    auto line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::Malformed, line_no, e.what());
    }
    auto rec = parse_record(obj, line_no);
    if (!seen.insert(rec.photo_id).second)
      fail(ErrorCode::DuplicateId, line_no, fmt::format("duplicate photo_id '{}'", rec.photo_id));
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<PhotoRecord> load_manifest(const std::string& path) {
  try {
    return parse_manifest(read_text_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", path, e.what()));
  }
}

std::string format_manifest(std::span<const PhotoRecord> records) {
  std::string out;
  for (const auto& r : records) {
    ordered_json obj;
    obj["photo_id"] = r.photo_id;
    if (r.lon) obj["lon"] = *r.lon;
    if (r.lat) obj["lat"] = *r.lat;
    obj["source"] = to_string(r.source);
    obj["keywords"] = r.keywords;
    if (r.true_class) obj["true_class"] = to_string(*r.true_class);
    if (r.in_out) obj["in_out"] = to_string(*r.in_out);
    if (r.region_id) obj["region_id"] = *r.region_id;
    if (r.origin) obj["origin"] = to_string(*r.origin);
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void write_manifest(const std::string& path, std::span<const PhotoRecord> records) {
  write_text_file(path, format_manifest(records));
}

// ---------------------------------------------------------------------------

namespace {
bool by_id(const PhotoRecord& a, const PhotoRecord& b) { return a.photo_id < b.photo_id; }
}  // namespace

LabeledPhotos label_by_location(std::span<const PhotoRecord> photos, const geo::RegionSet& regions,
                                unsigned threads) {
  std::vector<std::optional<std::string>> assigned(photos.size());
  parallel_for(photos.size(), threads, [&](std::size_t i) {
    const auto& p = photos[i];
    if (p.source == Source::geolocated && p.lon && p.lat) assigned[i] = regions.assign_region(*p.lon, *p.lat);
  });

  LabeledPhotos out;
  for (std::size_t i = 0; i < photos.size(); ++i) {
    const auto& p = photos[i];
    if (p.source == Source::auxiliary) {
      out.auxiliary.push_back(p);
      continue;
    }
    if (!assigned[i]) {
      ++out.dropped;
      continue;
    }
    PhotoRecord rec = p;
    rec.true_class = regions.find(*assigned[i])->land_use;
    rec.region_id = std::move(assigned[i]);
    out.labeled.push_back(std::move(rec));
  }
  std::sort(out.labeled.begin(), out.labeled.end(), by_id);
  std::sort(out.auxiliary.begin(), out.auxiliary.end(), by_id);
  return out;
}

DatasetSplit split(std::span<const PhotoRecord> labeled, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw Error(ErrorCode::InvalidArgument, fmt::format("split fraction {} is not in (0, 1)", fraction));

  std::array<std::vector<std::string>, kNumLandUseClasses> by_class;
  for (const auto& r : labeled) {
    if (!r.true_class)
      throw Error(ErrorCode::InvalidArgument, fmt::format("photo '{}' has no true_class", r.photo_id));
    by_class[static_cast<std::size_t>(*r.true_class)].push_back(r.photo_id);
  }

  DatasetSplit s;
  s.seed = seed;
  for (std::size_t c = 0; c < kNumLandUseClasses; ++c) {
    auto& ids = by_class[c];
    std::sort(ids.begin(), ids.end());
    Rng rng(derive_seed(seed, c));
    shuffle(std::span(ids), rng);
    // The epsilon absorbs representation error such as 0.29 * 100 = 28.999...
    const auto n_train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(ids.size()) + 1e-9));
    s.train_ids.insert(s.train_ids.end(), ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test_ids.insert(s.test_ids.end(), ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
    s.per_class[c] = {n_train, ids.size() - n_train};
  }
  std::sort(s.train_ids.begin(), s.train_ids.end());
  std::sort(s.test_ids.begin(), s.test_ids.end());
  return s;
}

std::vector<PhotoRecord> select(std::span<const PhotoRecord> records, std::span<const std::string> ids) {
  std::vector<PhotoRecord> out;
  for (const auto& r : records) {
    if (std::binary_search(ids.begin(), ids.end(), r.photo_id)) out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------

KeywordMap::KeywordMap() {
  for (auto c : kAllLandUseClasses) {
    keywords_[static_cast<std::size_t>(c)] = {std::string(to_string(c))};
    lookup_.emplace(std::string(to_string(c)), c);
  }
}

KeywordMap::KeywordMap(std::array<std::vector<std::string>, kNumLandUseClasses> keywords)
    : keywords_(std::move(keywords)) {
  for (auto c : kAllLandUseClasses) {
    auto& list = keywords_[static_cast<std::size_t>(c)];
    if (list.empty())
      throw Error(ErrorCode::InvalidArgument, fmt::format("class '{}' has no keywords", to_string(c)));
    for (auto& k : list) {
      k = lowercase(std::move(k));
      lookup_.emplace(k, c);  // first class in enum order wins
    }
  }
}

std::optional<LandUseClass> KeywordMap::class_of(std::string_view keyword) const {
  auto it = lookup_.find(keyword);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

KeywordMap parse_keyword_map(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Malformed, fmt::format("keyword map: {}", e.what()));
  }
  if (!doc.is_object()) throw Error(ErrorCode::Malformed, "keyword map must be a JSON object");
  std::array<std::vector<std::string>, kNumLandUseClasses> kw;
  for (const auto& [name, list] : doc.items()) {
    const auto c = parse_land_use(name);
    if (!list.is_array()) throw Error(ErrorCode::Malformed, fmt::format("keywords for '{}' must be an array", name));
    for (const auto& k : list) {
      if (!k.is_string()) throw Error(ErrorCode::Malformed, fmt::format("keyword for '{}' is not a string", name));
      kw[static_cast<std::size_t>(c)].push_back(k.get<std::string>());
    }
  }
  // A class left out of the document is searched by its own name.
  for (auto c : kAllLandUseClasses) {
    auto& list = kw[static_cast<std::size_t>(c)];
    if (list.empty() && !doc.contains(std::string(to_string(c)))) list.emplace_back(to_string(c));
  }
  return KeywordMap(std::move(kw));
}

KeywordMap load_keyword_map(const std::string& path) { return parse_keyword_map(read_text_file(path)); }

AugmentResult augment(std::span<const PhotoRecord> base_train, std::span<const std::string> test_ids,
                      std::span<const PhotoRecord> aux_pool, const KeywordMap& kmap, std::size_t target,
                      std::uint64_t seed) {
  AugmentResult result;
  std::unordered_set<std::string> taken;
  for (const auto& r : base_train) {
    if (!r.true_class)
      throw Error(ErrorCode::InvalidArgument, fmt::format("base photo '{}' has no true_class", r.photo_id));
    PhotoRecord rec = r;
    rec.origin = Origin::base;
    result.train.push_back(std::move(rec));
    taken.insert(r.photo_id);
    ++result.summary[static_cast<std::size_t>(*r.true_class)].base;
  }

  std::array<std::vector<const PhotoRecord*>, kNumLandUseClasses> candidates;
  for (const auto& r : aux_pool) {
    if (taken.contains(r.photo_id) || std::binary_search(test_ids.begin(), test_ids.end(), r.photo_id)) continue;
    for (const auto& k : r.keywords) {
      if (auto c = kmap.class_of(k)) {
        candidates[static_cast<std::size_t>(*c)].push_back(&r);
        break;
      }
    }
  }

  for (std::size_t c = 0; c < kNumLandUseClasses; ++c) {
    auto& pool = candidates[c];
    auto& sum = result.summary[c];
    sum.candidates = pool.size();
    std::sort(pool.begin(), pool.end(), [](const PhotoRecord* a, const PhotoRecord* b) { return a->photo_id < b->photo_id; });
    pool.erase(std::unique(pool.begin(), pool.end(),
                           [](const PhotoRecord* a, const PhotoRecord* b) { return a->photo_id == b->photo_id; }),
               pool.end());
    Rng rng(derive_seed(seed, c));
    shuffle(std::span(pool), rng);
    const std::size_t wanted = sum.base >= target ? 0 : target - sum.base;
    sum.added = std::min(wanted, pool.size());
    for (std::size_t i = 0; i < sum.added; ++i) {
      PhotoRecord rec = *pool[i];
      rec.true_class = kAllLandUseClasses[c];
      rec.origin = Origin::auxiliary;
      result.train.push_back(std::move(rec));
    }
    sum.final_count = sum.base + sum.added;
    sum.shortfall = wanted - sum.added;
  }
  std::sort(result.train.begin(), result.train.end(), by_id);
  return result;
}

}  // namespace landuse::corpus
