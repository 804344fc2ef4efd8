#include "landuse/common.hpp"

#include <fmt/format.h>

namespace landuse {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Malformed: return "Malformed";
    case ErrorCode::UnknownLandUse: return "UnknownLandUse";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DegenerateRing: return "DegenerateRing";
    case ErrorCode::MissingCoordinates: return "MissingCoordinates";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::MissingFeatures: return "MissingFeatures";
    case ErrorCode::EmptyPartition: return "EmptyPartition";
    case ErrorCode::WrongModelKind: return "WrongModelKind";
    case ErrorCode::UnknownRegion: return "UnknownRegion";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyPartition:
    case ErrorCode::Io:
      return false;
    default:
      return true;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(fmt::format("{}: {}", to_string(code), message)), code_(code) {}

std::string_view to_string(LandUseClass c) {
  switch (c) {
    case LandUseClass::study: return "study";
    case LandUseClass::residence: return "residence";
    case LandUseClass::hospital: return "hospital";
    case LandUseClass::park: return "park";
    case LandUseClass::gym: return "gym";
    case LandUseClass::playground: return "playground";
    case LandUseClass::water: return "water";
    case LandUseClass::theater: return "theater";
  }
  return "?";
}

std::optional<LandUseClass> try_parse_land_use(std::string_view name) noexcept {
  for (auto c : kAllLandUseClasses) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

LandUseClass parse_land_use(std::string_view name) {
  if (auto c = try_parse_land_use(name)) return *c;
  throw Error(ErrorCode::UnknownLandUse, fmt::format("'{}' is not a land-use class", name));
}

std::string_view to_string(InOut v) { return v == InOut::indoor ? "indoor" : "outdoor"; }

InOut parse_in_out(std::string_view name) {
  if (name == "indoor") return InOut::indoor;
  if (name == "outdoor") return InOut::outdoor;
  throw Error(ErrorCode::Malformed, fmt::format("'{}' is neither indoor nor outdoor", name));
}

}  // namespace landuse

// ---------------------------------------------------------------------------

#include <fstream>
#include <iterator>

#include "binary_io.hpp"
#include "landuse/io.hpp"

namespace landuse {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open '{}' for reading", path));
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_text_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot open '{}' for writing", path));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::Io, fmt::format("write to '{}' failed", path));
}

namespace detail {

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  const auto s = read_text_file(path);
  return {s.begin(), s.end()};
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  write_text_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace detail
}  // namespace landuse
