#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace slicereview::ingest {

struct SourceFile {
  std::string path;  // relative, '/'-separated
  std::string content;
};

/// File contents of a repository at one revision. Paths are unique and
/// sorted.
struct RepoSnapshot {
  std::filesystem::path root;
  std::string commit_id;
  std::vector<SourceFile> files;

  const SourceFile* find(const std::string& path) const;
};

/// Materializes `commit_id` from either a snapshot directory (a
/// `manifest.json` mapping commit ids to file lists) or a git work tree.
///
/// Manifest entries take one of two forms:
///   "case01": ["src/a.mini", "src/b.mini"]            files under <repo>/case01/
///   "case01": {"root": "tree", "files": ["a.mini"]}   files under <repo>/tree/
///
/// Throws IoError when repo_path is unreadable and SnapshotError when the
/// revision cannot be resolved.
RepoSnapshot load_snapshot(const std::filesystem::path& repo_path, const std::string& commit_id);

}  // namespace slicereview::ingest
