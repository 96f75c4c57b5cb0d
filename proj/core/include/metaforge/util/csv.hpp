#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace metaforge::csv {

/// RFC-4180 style rows: quoted cells, embedded commas/newlines, "" escapes.
/// Tolerates CRLF line endings and a UTF-8 BOM. Invalid UTF-8 bytes in cells
/// are replaced.
std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path);

}  // namespace metaforge::csv
