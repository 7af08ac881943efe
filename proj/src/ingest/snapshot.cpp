#include "ingest/snapshot.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>

#include <json.hpp>

#include "common/error.hpp"
#include "common/text.hpp"

namespace slicereview::ingest {

namespace fs = std::filesystem;

const SourceFile* RepoSnapshot::find(const std::string& path) const {
  auto it = std::lower_bound(files.begin(), files.end(), path,
                             [](const SourceFile& f, const std::string& p) { return f.path < p; });
  return it != files.end() && it->path == path ? &*it : nullptr;
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  out += "'";
  return out;
}

struct CommandResult {
  int status;
  std::string output;
};

CommandResult run_command(const std::string& cmd) {
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(::popen((cmd + " 2>/dev/null").c_str(), "r"), ::pclose);
  if (!pipe) throw IoError("cannot spawn: " + cmd);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe.get())) > 0) out.append(buf, n);
  int status = ::pclose(pipe.release());
  return {status, std::move(out)};
}

RepoSnapshot from_manifest(const fs::path& repo, const std::string& commit_id) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(repo / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw SnapshotError("bad manifest in " + repo.string() + ": " + e.what());
  }
  if (!manifest.is_object() || !manifest.contains(commit_id)) {
    throw SnapshotError("commit '" + commit_id + "' not in manifest of " + repo.string());
  }
  const auto& entry = manifest.at(commit_id);
  fs::path tree = repo / commit_id;
  nlohmann::json file_list;
  if (entry.is_array()) {
    file_list = entry;
  } else if (entry.is_object() && entry.contains("files")) {
    file_list = entry.at("files");
    if (entry.contains("root")) tree = repo / entry.at("root").get<std::string>();
  } else {
    throw SnapshotError("manifest entry for '" + commit_id + "' has no file list");
  }

  RepoSnapshot snap{repo, commit_id, {}};
  for (const auto& f : file_list) {
    if (!f.is_string()) throw SnapshotError("manifest file entries must be strings");
    auto rel = f.get<std::string>();
    snap.files.push_back({rel, read_file(tree / rel)});
  }
  return snap;
}

RepoSnapshot from_git(const fs::path& repo, const std::string& commit_id) {
  const std::string git = "git -C " + shell_quote(repo.string());
  auto verify = run_command(git + " rev-parse --verify --quiet " + shell_quote(commit_id + "^{commit}"));
  if (verify.status != 0) throw SnapshotError("cannot resolve revision '" + commit_id + "'");
  std::string sha = trim(verify.output);

  auto listing = run_command(git + " ls-tree -r -z --name-only " + shell_quote(sha));
  if (listing.status != 0) throw SnapshotError("git ls-tree failed for " + sha);

  RepoSnapshot snap{repo, commit_id, {}};
  size_t pos = 0;
  while (pos < listing.output.size()) {
    size_t end = listing.output.find('\0', pos);
    if (end == std::string::npos) end = listing.output.size();
    std::string path = listing.output.substr(pos, end - pos);
    pos = end + 1;
    if (path.empty()) continue;
    auto blob = run_command(git + " cat-file blob " + shell_quote(sha + ":" + path));
    if (blob.status != 0) throw SnapshotError("cannot read " + path + " at " + sha);
    snap.files.push_back({path, std::move(blob.output)});
  }
  return snap;
}

}  // namespace

RepoSnapshot load_snapshot(const fs::path& repo_path, const std::string& commit_id) {
  std::error_code ec;
  if (!fs::is_directory(repo_path, ec)) throw IoError("not a readable directory: " + repo_path.string());

  RepoSnapshot snap;
  if (fs::exists(repo_path / "manifest.json", ec)) {
    snap = from_manifest(repo_path, commit_id);
  } else if (fs::exists(repo_path / ".git", ec)) {
    snap = from_git(repo_path, commit_id);
  } else {
    throw SnapshotError("no manifest.json or git metadata in " + repo_path.string());
  }

  std::sort(snap.files.begin(), snap.files.end(),
            [](const SourceFile& a, const SourceFile& b) { return a.path < b.path; });
  auto dup = std::adjacent_find(snap.files.begin(), snap.files.end(),
                                [](const SourceFile& a, const SourceFile& b) { return a.path == b.path; });
  if (dup != snap.files.end()) throw SnapshotError("duplicate path in snapshot: " + dup->path);
  return snap;
}

}  // namespace slicereview::ingest
