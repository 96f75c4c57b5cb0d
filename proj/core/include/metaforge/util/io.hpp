#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace metaforge::io {

std::string read_file(const std::filesystem::path& path);

/// Write via a temp file in the same directory, then rename.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::vector<std::string> read_lines(const std::filesystem::path& path);

void append_line(const std::filesystem::path& path, std::string_view line);

}  // namespace metaforge::io
