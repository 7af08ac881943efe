#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace slicereview {

/// Splits on '\n'. A trailing newline does not produce an empty final line,
/// and a trailing '\r' on each line is dropped.
std::vector<std::string> split_lines(std::string_view text);

std::string join_lines(const std::vector<std::string>& lines, bool trailing_newline = true);

std::string trim(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);

/// Throws IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Fixed-point rendering with round-half-away-from-zero at `decimals` places.
std::string format_fixed(double value, int decimals = 2);

}  // namespace slicereview
