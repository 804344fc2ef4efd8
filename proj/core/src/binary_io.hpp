#pragma once

// Little-endian primitive encoding shared by the FVEC and model formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "landuse/common.hpp"

namespace landuse::detail {

static_assert(std::endian::native == std::endian::little,
              "binary formats are written with native little-endian stores");

class ByteWriter {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    buf_.insert(buf_.end(), p, p + n);
  }
  void magic(std::string_view m) { bytes(m.data(), m.size()); }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u16(std::uint16_t v) { bytes(&v, sizeof v); }
  void u32(std::uint32_t v) { bytes(&v, sizeof v); }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void f64(double v) { bytes(&v, sizeof v); }
  void f32s(std::span<const float> v) { bytes(v.data(), v.size_bytes()); }
  void f64s(std::span<const double> v) { bytes(v.data(), v.size_bytes()); }

  void short_string(std::string_view s) {
    if (s.size() > 0xFFFF) throw Error(ErrorCode::InvalidArgument, "string longer than 65535 bytes");
    u16(static_cast<std::uint16_t>(s.size()));
    bytes(s.data(), s.size());
  }

  const std::vector<std::uint8_t>& buffer() const { return buf_; }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  void need(std::size_t n, std::string_view what) const {
    if (data_.size() - pos_ < n)
      throw Error(ErrorCode::Truncated,
                  fmt::format("need {} bytes for {} at offset {}, {} left", n, what, pos_,
                              data_.size() - pos_));
  }

  void expect_magic(std::string_view m) {
    need(m.size(), "magic");
    if (std::memcmp(data_.data() + pos_, m.data(), m.size()) != 0)
      throw Error(ErrorCode::BadMagic, fmt::format("expected magic '{}'", m));
    pos_ += m.size();
  }

  /// Peeks at the next bytes without consuming them.
  bool at_magic(std::string_view m) const {
    return data_.size() - pos_ >= m.size() && std::memcmp(data_.data() + pos_, m.data(), m.size()) == 0;
  }

  template <typename T>
  T scalar(std::string_view what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::uint8_t u8(std::string_view what) { return scalar<std::uint8_t>(what); }
  std::uint16_t u16(std::string_view what) { return scalar<std::uint16_t>(what); }
  std::uint32_t u32(std::string_view what) { return scalar<std::uint32_t>(what); }
  std::uint64_t u64(std::string_view what) { return scalar<std::uint64_t>(what); }
  double f64(std::string_view what) { return scalar<double>(what); }

  template <typename T>
  void array(std::span<T> out, std::string_view what) {
    need(out.size_bytes(), what);
    std::memcpy(out.data(), data_.data() + pos_, out.size_bytes());
    pos_ += out.size_bytes();
  }

  std::string short_string(std::string_view what) {
    const auto n = u16(what);
    need(n, what);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t offset() const { return pos_; }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace landuse::detail
