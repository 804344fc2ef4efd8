// LUM1 linear-model records and the LUP1 flat/hierarchical container.
//
// LUM1 (little-endian):
//   "LUM1" | u32 dim | u32 n_classes | n_classes x {u16 len | name}
//   | f64 weights[n_vectors * (dim + 1)]            (row-major)
//   | f64 scaler_offset[dim] | f64 scaler_factor[dim]
//   | f64 C | u64 seed | f64 tol | u32 iterations[n_vectors]
// n_vectors is 1 for two-class models, n_classes otherwise.

#include <fmt/format.h>

#include "binary_io.hpp"
#include "landuse/learn.hpp"
#include "landuse/pipeline.hpp"

namespace landuse {

namespace {

constexpr std::string_view kLinearMagic = "LUM1";
constexpr std::string_view kContainerMagic = "LUP1";

void write_linear(detail::ByteWriter& w, const learn::LinearModel& m) {
  const std::size_t k = m.n_weight_vectors();
  if (m.weights.size() != k * (m.dim + 1) || m.scaler.dim() != m.dim || m.iterations.size() != k)
    throw Error(ErrorCode::InvalidArgument, "linear model fields are inconsistent with its dimension");
  w.magic(kLinearMagic);
  w.u32(m.dim);
  w.u32(static_cast<std::uint32_t>(m.classes.size()));
  for (const auto& c : m.classes) w.short_string(c);
  w.f64s(m.weights);
  w.f64s(m.scaler.offset);
  w.f64s(m.scaler.factor);
  w.f64(m.C);
  w.u64(m.seed);
  w.f64(m.tol);
  for (auto it : m.iterations) w.u32(it);
}

learn::LinearModel read_linear(detail::ByteReader& r) {
  r.expect_magic(kLinearMagic);
  learn::LinearModel m;
  m.dim = r.u32("dim");
  const auto n_classes = r.u32("class count");
  if (n_classes == 0) throw Error(ErrorCode::Malformed, "model has no classes");
  for (std::uint32_t c = 0; c < n_classes; ++c) m.classes.push_back(r.short_string("class name"));
  const std::size_t k = m.n_weight_vectors();
  const std::size_t row = static_cast<std::size_t>(m.dim) + 1;
  r.need(k * row * sizeof(double), "weights");
  m.weights.resize(k * row);
  r.array(std::span(m.weights), "weights");
  r.need(2 * static_cast<std::size_t>(m.dim) * sizeof(double), "scaler");
  m.scaler.offset.resize(m.dim);
  m.scaler.factor.resize(m.dim);
  r.array(std::span(m.scaler.offset), "scaler offsets");
  r.array(std::span(m.scaler.factor), "scaler factors");
  m.C = r.f64("C");
  m.seed = r.u64("seed");
  m.tol = r.f64("tol");
  m.iterations.resize(k);
  for (auto& it : m.iterations) it = r.u32("iterations");
  return m;
}

}  // namespace

namespace learn {

void encode_linear_model(const LinearModel& m, std::vector<std::uint8_t>& out) {
  detail::ByteWriter w;
  write_linear(w, m);
  const auto& b = w.buffer();
  out.insert(out.end(), b.begin(), b.end());
}

std::vector<std::uint8_t> encode_linear_model(const LinearModel& m) {
  std::vector<std::uint8_t> out;
  encode_linear_model(m, out);
  return out;
}

LinearModel decode_linear_model(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  auto m = read_linear(r);
  if (r.remaining() != 0) throw Error(ErrorCode::Malformed, fmt::format("{} trailing bytes after model", r.remaining()));
  return m;
}

}  // namespace learn

namespace pipeline {

std::vector<std::uint8_t> encode_model(const AnyModel& m) {
  detail::ByteWriter w;
  w.magic(kContainerMagic);
  if (const auto* flat = std::get_if<FlatModel>(&m)) {
    w.u8(0);
    write_linear(w, flat->landuse);
  } else {
    const auto& h = std::get<HierModel>(m);
    w.u8(1);
    write_linear(w, h.router);
    write_linear(w, h.indoor);
    write_linear(w, h.outdoor);
  }
  return w.take();
}

AnyModel decode_model(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic(kContainerMagic);
  const auto kind = r.u8("model kind");
  AnyModel out;
  if (kind == 0) {
    out = FlatModel{read_linear(r)};
  } else if (kind == 1) {
    HierModel h;
    h.router = read_linear(r);
    h.indoor = read_linear(r);
    h.outdoor = read_linear(r);
    out = std::move(h);
  } else {
    throw Error(ErrorCode::Malformed, fmt::format("unknown model kind {}", kind));
  }
  if (r.remaining() != 0) throw Error(ErrorCode::Malformed, fmt::format("{} trailing bytes after model", r.remaining()));
  return out;
}

void save_model(const AnyModel& m, const std::string& path) { detail::write_file_bytes(path, encode_model(m)); }

AnyModel load_model(const std::string& path) {
  try {
    return decode_model(detail::read_file_bytes(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(e.code(), fmt::format("{}: {}", path, e.what()));
  }
}

FlatModel load_flat_model(const std::string& path) {
  auto m = load_model(path);
  if (auto* flat = std::get_if<FlatModel>(&m)) return std::move(*flat);
  throw Error(ErrorCode::WrongModelKind, fmt::format("{} holds a hierarchical model", path));
}

HierModel load_hier_model(const std::string& path) {
  auto m = load_model(path);
  if (auto* h = std::get_if<HierModel>(&m)) return std::move(*h);
  throw Error(ErrorCode::WrongModelKind, fmt::format("{} holds a flat model", path));
}

}  // namespace pipeline
}  // namespace landuse
