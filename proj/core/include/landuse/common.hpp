#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace landuse {

enum class ErrorCode {
  Malformed,
  UnknownLandUse,
  DuplicateId,
  DegenerateRing,
  MissingCoordinates,
  DimensionMismatch,
  Truncated,
  BadMagic,
  EmptyInput,
  InvalidArgument,
  NonFinite,
  MissingFeatures,
  EmptyPartition,
  WrongModelKind,
  UnknownRegion,
  IdMismatch,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Validation errors are problems with user-supplied inputs; everything else
/// is a runtime failure. The CLI maps the two onto different exit codes.
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class LandUseClass : std::uint8_t {
  study,
  residence,
  hospital,
  park,
  gym,
  playground,
  water,
  theater,
};

inline constexpr std::size_t kNumLandUseClasses = 8;

inline constexpr std::array<LandUseClass, kNumLandUseClasses> kAllLandUseClasses = {
    LandUseClass::study, LandUseClass::residence,  LandUseClass::hospital, LandUseClass::park,
    LandUseClass::gym,   LandUseClass::playground, LandUseClass::water,    LandUseClass::theater,
};

std::string_view to_string(LandUseClass c);

/// Throws Error{UnknownLandUse} for anything outside the eight lowercase names.
LandUseClass parse_land_use(std::string_view name);

std::optional<LandUseClass> try_parse_land_use(std::string_view name) noexcept;

enum class InOut : std::uint8_t { indoor, outdoor };

std::string_view to_string(InOut v);
InOut parse_in_out(std::string_view name);

}  // namespace landuse
