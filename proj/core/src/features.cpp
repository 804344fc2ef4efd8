#include "landuse/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "binary_io.hpp"
#include "landuse/common.hpp"
#include "landuse/io.hpp"

namespace landuse::features {

namespace {
constexpr std::string_view kMagic = "FVC1";
}

void FeatureStore::add(std::string id, std::span<const float> values) {
  if (values.size() != dim_)
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("vector for '{}' has {} components, store dim is {}", id, values.size(), dim_));
  for (float v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, fmt::format("vector for '{}' has a non-finite component", id));
  }
  if (!index_.emplace(id, ids_.size()).second)
    throw Error(ErrorCode::DuplicateId, fmt::format("duplicate photo_id '{}' in feature store", id));
  ids_.push_back(std::move(id));
  data_.insert(data_.end(), values.begin(), values.end());
}

bool FeatureStore::contains(std::string_view id) const { return index_.contains(std::string(id)); }

std::span<const float> FeatureStore::at(std::string_view id) const {
  if (observer_) observer_(id);
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw Error(ErrorCode::MissingFeatures, fmt::format("no feature vector for '{}'", id));
  return row(it->second);
}

std::vector<std::uint8_t> encode_store(const FeatureStore& store) {
  detail::ByteWriter w;
  w.magic(kMagic);
  w.u32(store.dim());
  w.u32(static_cast<std::uint32_t>(store.size()));
  for (std::size_t i = 0; i < store.size(); ++i) {
    w.short_string(store.ids()[i]);
    w.f32s(store.row(i));
  }
  return w.take();
}

FeatureStore decode_store(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic(kMagic);
  const auto dim = r.u32("dim");
  const auto count = r.u32("count");
  FeatureStore store(dim);
  std::vector<float> buf(dim);
  for (std::uint32_t i = 0; i < count; ++i) {
    auto id = r.short_string("record id");
    r.array(std::span(buf), "record components");
    store.add(std::move(id), buf);
  }
  if (r.remaining() != 0)
    throw Error(ErrorCode::Malformed, fmt::format("{} trailing bytes after {} records", r.remaining(), count));
  return store;
}

void write_store(const FeatureStore& store, const std::string& path) {
  detail::write_file_bytes(path, encode_store(store));
}

FeatureStore read_store(const std::string& path) {
  try {
    return decode_store(detail::read_file_bytes(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(e.code(), fmt::format("{}: {}", path, e.what()));
  }
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

FeatureStore parse_csv_store(std::string_view csv) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& line) {
    while (pos < csv.size()) {
      auto end = csv.find('\n', pos);
      if (end == std::string_view::npos) end = csv.size();
      line = csv.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty()) return true;
    }
    return false;
  };

  std::string_view line;
  if (!next_line(line)) throw Error(ErrorCode::EmptyInput, "feature CSV is empty");
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "photo_id")
    throw Error(ErrorCode::Malformed, "feature CSV header must start with photo_id");
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (header[j] != fmt::format("f{}", j - 1))
      throw Error(ErrorCode::Malformed, fmt::format("feature CSV header column {} should be f{}", j, j - 1));
  }
  FeatureStore store(static_cast<std::uint32_t>(header.size() - 1));
  std::vector<float> values(store.dim());
  while (next_line(line)) {
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw Error(ErrorCode::DimensionMismatch,
                  fmt::format("line {}: {} columns, header has {}", line_no, cells.size(), header.size()));
    for (std::size_t j = 1; j < cells.size(); ++j) {
      const auto cell = cells[j];
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), values[j - 1]);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw Error(ErrorCode::Malformed, fmt::format("line {}: '{}' is not a number", line_no, cell));
    }
    try {
      store.add(std::string(cells[0]), values);
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return store;
}

FeatureStore import_csv(const std::string& path) { return parse_csv_store(read_text_file(path)); }

// ---------------------------------------------------------------------------

Scaler Scaler::identity(std::size_t dim) { return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)}; }

void Scaler::transform(std::span<const float> in, std::span<float> out) const {
  if (in.size() != dim() || out.size() != dim())
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("scaler dim {} applied to vector of length {}", dim(), in.size()));
  for (std::size_t j = 0; j < in.size(); ++j) {
    out[j] = static_cast<float>((static_cast<double>(in[j]) - offset[j]) * factor[j]);
  }
}

std::vector<float> Scaler::transform(std::span<const float> in) const {
  std::vector<float> out(in.size());
  transform(in, out);
  return out;
}

Scaler fit_scaler(const FeatureStore& store, std::span<const std::string> ids) {
  if (ids.empty()) throw Error(ErrorCode::EmptyInput, "cannot fit a scaler on an empty id set");
  const std::size_t dim = store.dim();
  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (const auto& id : ids) {
    const auto v = store.at(id);
    for (std::size_t j = 0; j < dim; ++j) {
      lo[j] = std::min(lo[j], static_cast<double>(v[j]));
      hi[j] = std::max(hi[j], static_cast<double>(v[j]));
    }
  }
  Scaler s{lo, std::vector<double>(dim, 0.0)};
  for (std::size_t j = 0; j < dim; ++j) {
    if (hi[j] > lo[j]) s.factor[j] = 1.0 / (hi[j] - lo[j]);
  }
  return s;
}

}  // namespace landuse::features
