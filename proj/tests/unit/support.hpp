#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

inline std::filesystem::path fixture(const std::string& rel) { return std::filesystem::path(SR_FIXTURES) / rel; }

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("slicereview-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

namespace doctest {
template <>
struct StringMaker<std::vector<std::string>> {
  static String convert(const std::vector<std::string>& v) {
    std::string out = "[";
    for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    return (out + "]").c_str();
  }
};
template <>
struct StringMaker<std::vector<std::vector<std::string>>> {
  static String convert(const std::vector<std::vector<std::string>>& v) {
    String out = "[";
    for (size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + StringMaker<std::vector<std::string>>::convert(v[i]);
    return out + "]";
  }
};
}  // namespace doctest
