#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace slicereview::ingest {

enum class LineOp { kKeep, kAdd, kDelete };

const char* line_op_name(LineOp op);
/// '+', '-' or ' '.
char line_op_marker(LineOp op);

struct DiffLine {
  LineOp op = LineOp::kKeep;
  std::string text;

  bool operator==(const DiffLine&) const = default;
};

/// One "@@ -a,b +c,d @@" block. Keep+delete lines always total old_len and
/// keep+add lines total new_len; the parser rejects anything else.
struct DiffHunk {
  std::string file;
  int old_start = 0;
  int old_len = 0;
  int new_start = 0;
  int new_len = 0;
  std::vector<DiffLine> lines;
  bool new_file = false;      // "--- /dev/null"
  bool deleted_file = false;  // "+++ /dev/null"

  bool operator==(const DiffHunk&) const = default;
};

/// Throws DiffParseError carrying the offending line. Binary file entries are
/// skipped and reported through `warnings` when provided.
std::vector<DiffHunk> parse_unified_diff(std::string_view diff_text,
                                         std::vector<std::string>* warnings = nullptr);

/// A diff line located in both numbering systems. For adds `pre` is the
/// pre-image line the insertion precedes; for deletes `post` is the post-image
/// line the removal precedes (its anchor).
struct LocatedLine {
  LineOp op;
  int pre;
  int post;
  const std::string* text;
};

std::vector<LocatedLine> locate_lines(const DiffHunk& hunk);

/// Changes for one file. Adds use post-image numbering, deletes pre-image.
struct FileChanges {
  std::set<int> adds;
  std::set<int> deletes;
  std::vector<DiffHunk> hunks;  // sorted by old_start
  bool new_file = false;
  bool deleted_file = false;

  /// nullopt when the pre-image line was deleted.
  std::optional<int> pre_to_post(int pre_line) const;
  /// nullopt when the post-image line was added.
  std::optional<int> post_to_pre(int post_line) const;
  /// Position in the interleaved view where each deleted line sits directly
  /// before the post-image line it was removed ahead of.
  long view_position_post(int post_line) const;
  long view_position_pre(int pre_line) const;
  /// Post-image line a deleted pre-image line was removed ahead of.
  int delete_anchor(int pre_line) const;

  bool intersects_adds(int start, int end) const;
  bool intersects_deletes(int start, int end) const;
};

struct ChangedLineMap {
  std::map<std::string, FileChanges> files;

  bool empty() const;
  const FileChanges* find(const std::string& file) const;
};

ChangedLineMap changed_lines(const std::vector<DiffHunk>& hunks);

/// Hunks of one file, in any order.
std::vector<DiffHunk> hunks_for_file(const std::vector<DiffHunk>& hunks, const std::string& file);

/// Rebuilds the pre-image from the post-image and the file's hunks.
/// Throws DiffParseError when a hunk's keep/add lines disagree with `post`.
std::string reconstruct_pre_image(std::string_view post, const std::vector<DiffHunk>& file_hunks);

/// Forward application; throws DiffParseError on a context mismatch.
std::string apply_hunks(std::string_view pre, const std::vector<DiffHunk>& file_hunks);

}  // namespace slicereview::ingest
