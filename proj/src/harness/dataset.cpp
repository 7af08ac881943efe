#include "harness/dataset.hpp"

#include <algorithm>

#include "common/error.hpp"
#include "common/text.hpp"

namespace slicereview::harness {

namespace fs = std::filesystem;
using metrics::FaultCase;

namespace {

std::string need_string(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw DatasetError(where + "missing '" + key + "'");
  if (!j[key].is_string()) throw DatasetError(where + "'" + key + "' must be a string");
  return j[key].get<std::string>();
}

std::string opt_string(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || j[key].is_null()) return "";
  if (!j[key].is_string()) throw DatasetError(where + "'" + key + "' must be a string");
  return j[key].get<std::string>();
}

}  // namespace

nlohmann::json fault_to_json(const FaultCase& f) {
  nlohmann::json ranges = nlohmann::json::array();
  for (const auto& r : f.key_bug.line_ranges) ranges.push_back({r.start, r.end});
  nlohmann::json j = {{"mr_id", f.mr_id},
                      {"repo_id", f.repo_id},
                      {"commit_id", f.commit_id},
                      {"fix_commit_id", f.fix_commit_id ? nlohmann::json(*f.fix_commit_id) : nlohmann::json()},
                      {"repo", f.repo},
                      {"diff", f.diff},
                      {"key_bug",
                       {{"files", f.key_bug.files},
                        {"line_ranges", ranges},
                        {"description", f.key_bug.description},
                        {"root_cause", f.key_bug.root_cause},
                        {"category", f.key_bug.category}}}};
  return j;
}

FaultCase fault_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DatasetError("fault case must be a JSON object");
  FaultCase f;
  f.mr_id = need_string(j, "mr_id", "");
  if (f.mr_id.empty()) throw DatasetError("'mr_id' is empty");
  if (f.mr_id.find_first_of("/\\") != std::string::npos || f.mr_id == "." || f.mr_id == "..") {
    throw DatasetError("'mr_id' must be usable as a directory name");
  }
  f.repo_id = opt_string(j, "repo_id", "");
  f.commit_id = opt_string(j, "commit_id", "");
  if (j.contains("fix_commit_id") && !j["fix_commit_id"].is_null()) {
    f.fix_commit_id = need_string(j, "fix_commit_id", "");
  }
  f.repo = need_string(j, "repo", "");
  f.diff = need_string(j, "diff", "");

  if (!j.contains("key_bug")) throw DatasetError("missing 'key_bug'");
  const auto& kb = j["key_bug"];
  if (!kb.is_object()) throw DatasetError("'key_bug' must be an object");
  const std::string where = "key_bug: ";
  if (!kb.contains("files") || !kb["files"].is_array() || kb["files"].empty()) {
    throw DatasetError(where + "'files' must be a non-empty array");
  }
  for (const auto& file : kb["files"]) {
    if (!file.is_string()) throw DatasetError(where + "'files' entries must be strings");
    f.key_bug.files.push_back(file.get<std::string>());
  }
  if (!kb.contains("line_ranges") || !kb["line_ranges"].is_array() || kb["line_ranges"].empty()) {
    throw DatasetError(where + "'line_ranges' must be a non-empty array");
  }
  for (const auto& r : kb["line_ranges"]) {
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer()) {
      throw DatasetError(where + "each line range must be [start, end]");
    }
    metrics::LineRange lr{r[0].get<int>(), r[1].get<int>()};
    if (lr.start < 1 || lr.end < lr.start) throw DatasetError(where + "line range out of order: " + r.dump());
    f.key_bug.line_ranges.push_back(lr);
  }
  f.key_bug.description = need_string(kb, "description", where);
  f.key_bug.root_cause = opt_string(kb, "root_cause", where);
  f.key_bug.category = opt_string(kb, "category", where);
  return f;
}

FaultDataset load_fault_dataset(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw DatasetError("dataset directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  FaultDataset out;
  std::vector<std::string> seen;
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    try {
      auto j = nlohmann::json::parse(read_file(path));
      FaultCase f = fault_from_json(j);
      if (std::find(seen.begin(), seen.end(), f.mr_id) != seen.end()) {
        throw DatasetError("duplicate mr_id '" + f.mr_id + "'");
      }
      auto resolve = [&](const std::string& p) {
        return fs::path(p).is_absolute() ? p : (path.parent_path() / p).lexically_normal().string();
      };
      f.repo = resolve(f.repo);
      f.diff = resolve(f.diff);
      seen.push_back(f.mr_id);
      out.cases.push_back(std::move(f));
    } catch (const nlohmann::json::exception& e) {
      out.violations.push_back({name, std::string("invalid JSON: ") + e.what()});
    } catch (const Error& e) {
      out.violations.push_back({name, e.what()});
    }
  }
  if (out.cases.empty()) {
    std::string msg = "no valid fault case in " + dir.string();
    if (!out.violations.empty()) msg += " (first problem: " + out.violations.front().file + ": " + out.violations.front().error + ")";
    throw DatasetError(msg);
  }
  return out;
}

}  // namespace slicereview::harness
