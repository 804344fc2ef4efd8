#pragma once

#include <string>
#include <string_view>

namespace landuse {

/// Reads a whole file; throws Error{Io} when it cannot be opened.
std::string read_text_file(const std::string& path);

/// Writes (truncating) a whole file; throws Error{Io} on failure.
void write_text_file(const std::string& path, std::string_view contents);

}  // namespace landuse
