#pragma once

// Fixed-dimension image feature vectors keyed by photo id, the FVEC binary
// container, and min-max scaling.
//
// FVEC layout (little-endian):
//   "FVC1" | u32 dim | u32 count | count x { u16 id_len | id bytes | dim x f32 }

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace landuse::features {

class FeatureStore {
 public:
  explicit FeatureStore(std::uint32_t dim = 0) : dim_(dim) {}

  std::uint32_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }

  /// Throws DimensionMismatch, NonFinite or DuplicateId.
  void add(std::string id, std::span<const float> values);

  bool contains(std::string_view id) const;
  /// Throws MissingFeatures for an unknown id.
  std::span<const float> at(std::string_view id) const;
  std::span<const float> row(std::size_t index) const {
    return {data_.data() + index * dim_, dim_};
  }

  /// Observer invoked with every id looked up through at(). Used to audit
  /// which vectors a training run reads. Must be thread-safe if the store is
  /// shared across threads.
  void set_access_observer(std::function<void(std::string_view)> observer) { observer_ = std::move(observer); }

  friend bool operator==(const FeatureStore& a, const FeatureStore& b) {
    return a.dim_ == b.dim_ && a.ids_ == b.ids_ && a.data_ == b.data_;
  }

 private:
  std::uint32_t dim_;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
  std::function<void(std::string_view)> observer_;
};

std::vector<std::uint8_t> encode_store(const FeatureStore& store);
/// Throws BadMagic, Truncated, DuplicateId, NonFinite.
FeatureStore decode_store(std::span<const std::uint8_t> bytes);

void write_store(const FeatureStore& store, const std::string& path);
FeatureStore read_store(const std::string& path);

/// CSV with header `photo_id,f0,...,f{dim-1}`.
FeatureStore parse_csv_store(std::string_view csv);
FeatureStore import_csv(const std::string& path);

/// Per-dimension min-max map to [0, 1]: x -> (x - min) * factor with
/// factor = 1 / (max - min), or 0 for constant dimensions.
struct Scaler {
  std::vector<double> offset;
  std::vector<double> factor;

  static Scaler identity(std::size_t dim);

  std::size_t dim() const { return offset.size(); }
  void transform(std::span<const float> in, std::span<float> out) const;
  std::vector<float> transform(std::span<const float> in) const;

  friend bool operator==(const Scaler&, const Scaler&) = default;
};

/// Fits on `ids` only. Throws EmptyInput for an empty id list and
/// MissingFeatures for ids absent from the store.
Scaler fit_scaler(const FeatureStore& store, std::span<const std::string> ids);

}  // namespace landuse::features
