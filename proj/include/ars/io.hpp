#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace ars::io {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Calls fn(line_number, line) for every non-blank line (1-based numbering).
void for_each_line(std::string_view text,
                   const std::function<void(std::size_t, std::string_view)>& fn);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

}  // namespace ars::io
