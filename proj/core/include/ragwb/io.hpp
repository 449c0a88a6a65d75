#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace ragwb::io {

/// Whole-file read; throws IoError when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes through a sibling temp file and renames it into place.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace ragwb::io
