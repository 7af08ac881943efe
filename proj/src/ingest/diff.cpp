#include "ingest/diff.hpp"

#include <algorithm>
#include <charconv>

#include "common/error.hpp"
#include "common/text.hpp"

namespace slicereview::ingest {

const char* line_op_name(LineOp op) {
  switch (op) {
    case LineOp::kKeep: return "keep";
    case LineOp::kAdd: return "add";
    case LineOp::kDelete: return "delete";
  }
  return "keep";
}

char line_op_marker(LineOp op) {
  switch (op) {
    case LineOp::kAdd: return '+';
    case LineOp::kDelete: return '-';
    case LineOp::kKeep: break;
  }
  return ' ';
}

namespace {

std::string strip_path(std::string_view raw) {
  std::string path(raw);
  // "+++ b/file\t2024-01-01 ..." carries an optional timestamp after a tab.
  if (auto tab = path.find('\t'); tab != std::string::npos) path.resize(tab);
  path = trim(path);
  if (path.size() >= 2 && path.front() == '"' && path.back() == '"') {
    path = path.substr(1, path.size() - 2);
  }
  if (starts_with(path, "a/") || starts_with(path, "b/")) path = path.substr(2);
  return path;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && out >= 0;
}

// "-12,3" or "-12" (length defaults to 1).
bool parse_range(std::string_view s, char sign, int& start, int& len) {
  if (s.empty() || s.front() != sign) return false;
  s.remove_prefix(1);
  auto comma = s.find(',');
  if (comma == std::string_view::npos) {
    len = 1;
    return parse_int(s, start);
  }
  return parse_int(s.substr(0, comma), start) && parse_int(s.substr(comma + 1), len);
}

bool parse_hunk_header(std::string_view line, DiffHunk& hunk) {
  if (!starts_with(line, "@@ ")) return false;
  auto close = line.find(" @@", 3);
  if (close == std::string_view::npos) return false;
  std::string_view ranges = line.substr(3, close - 3);
  auto space = ranges.find(' ');
  if (space == std::string_view::npos) return false;
  return parse_range(ranges.substr(0, space), '-', hunk.old_start, hunk.old_len) &&
         parse_range(ranges.substr(space + 1), '+', hunk.new_start, hunk.new_len);
}

}  // namespace

std::vector<DiffHunk> parse_unified_diff(std::string_view diff_text,
                                         std::vector<std::string>* warnings) {
  std::vector<DiffHunk> hunks;
  auto lines = split_lines(diff_text);

  std::string old_path;
  std::string new_path;
  bool have_header = false;

  size_t i = 0;
  while (i < lines.size()) {
    const std::string& line = lines[i];
    const int line_no = static_cast<int>(i) + 1;

    if (starts_with(line, "Binary files ") || starts_with(line, "GIT binary patch")) {
      if (warnings) warnings->push_back("skipping binary entry at diff line " + std::to_string(line_no));
      have_header = false;
      ++i;
      continue;
    }
    if (starts_with(line, "--- ")) {
      if (i + 1 >= lines.size() || !starts_with(lines[i + 1], "+++ ")) {
        throw DiffParseError(line_no, "'---' header without '+++'");
      }
      old_path = strip_path(std::string_view(line).substr(4));
      new_path = strip_path(std::string_view(lines[i + 1]).substr(4));
      have_header = true;
      i += 2;
      continue;
    }
    if (starts_with(line, "@@")) {
      DiffHunk hunk;
      if (!parse_hunk_header(line, hunk)) throw DiffParseError(line_no, "malformed hunk header: " + line);
      if (!have_header) throw DiffParseError(line_no, "hunk without file header");
      hunk.new_file = old_path == "/dev/null";
      hunk.deleted_file = new_path == "/dev/null";
      hunk.file = hunk.deleted_file ? old_path : new_path;

      int old_seen = 0;
      int new_seen = 0;
      ++i;
      while (old_seen < hunk.old_len || new_seen < hunk.new_len) {
        if (i >= lines.size()) {
          throw DiffParseError(static_cast<int>(i), "hunk body shorter than its header declares");
        }
        const std::string& body = lines[i];
        const int body_no = static_cast<int>(i) + 1;
        if (starts_with(body, "\\")) {  // "\ No newline at end of file"
          ++i;
          continue;
        }
        char tag = body.empty() ? ' ' : body.front();
        std::string text = body.empty() ? std::string() : body.substr(1);
        switch (tag) {
          case ' ':
            ++old_seen;
            ++new_seen;
            hunk.lines.push_back({LineOp::kKeep, std::move(text)});
            break;
          case '-':
            ++old_seen;
            hunk.lines.push_back({LineOp::kDelete, std::move(text)});
            break;
          case '+':
            ++new_seen;
            hunk.lines.push_back({LineOp::kAdd, std::move(text)});
            break;
          default:
            throw DiffParseError(body_no, "unexpected line inside hunk");
        }
        if (old_seen > hunk.old_len || new_seen > hunk.new_len) {
          throw DiffParseError(body_no, "hunk body longer than its header declares");
        }
        ++i;
      }
      while (i < lines.size() && starts_with(lines[i], "\\")) ++i;
      hunks.push_back(std::move(hunk));
      continue;
    }
    // diff --git, index, mode and rename lines carry nothing we need.
    ++i;
  }
  return hunks;
}

std::vector<LocatedLine> locate_lines(const DiffHunk& hunk) {
  std::vector<LocatedLine> out;
  out.reserve(hunk.lines.size());
  int pre = hunk.old_len > 0 ? hunk.old_start : hunk.old_start + 1;
  int post = hunk.new_len > 0 ? hunk.new_start : hunk.new_start + 1;
  for (const auto& line : hunk.lines) {
    out.push_back({line.op, pre, post, &line.text});
    if (line.op != LineOp::kAdd) ++pre;
    if (line.op != LineOp::kDelete) ++post;
  }
  return out;
}

namespace {

int first_pre(const DiffHunk& h) { return h.old_len > 0 ? h.old_start : h.old_start + 1; }
int first_post(const DiffHunk& h) { return h.new_len > 0 ? h.new_start : h.new_start + 1; }

}  // namespace

std::optional<int> FileChanges::pre_to_post(int pre_line) const {
  int delta = 0;
  for (const auto& h : hunks) {
    if (pre_line < first_pre(h)) return pre_line + delta;
    if (pre_line < first_pre(h) + h.old_len) {
      for (const auto& l : locate_lines(h)) {
        if (l.op == LineOp::kKeep && l.pre == pre_line) return l.post;
        if (l.op == LineOp::kDelete && l.pre == pre_line) return std::nullopt;
      }
    }
    delta += h.new_len - h.old_len;
  }
  return pre_line + delta;
}

std::optional<int> FileChanges::post_to_pre(int post_line) const {
  int delta = 0;
  for (const auto& h : hunks) {
    if (post_line < first_post(h)) return post_line - delta;
    if (post_line < first_post(h) + h.new_len) {
      for (const auto& l : locate_lines(h)) {
        if (l.op == LineOp::kKeep && l.post == post_line) return l.pre;
        if (l.op == LineOp::kAdd && l.post == post_line) return std::nullopt;
      }
    }
    delta += h.new_len - h.old_len;
  }
  return post_line - delta;
}

int FileChanges::delete_anchor(int pre_line) const {
  for (const auto& h : hunks) {
    for (const auto& l : locate_lines(h)) {
      if (l.op == LineOp::kDelete && l.pre == pre_line) return l.post;
    }
  }
  return pre_to_post(pre_line).value_or(pre_line);
}

long FileChanges::view_position_post(int post_line) const {
  long before = 0;
  for (int d : deletes) {
    if (delete_anchor(d) <= post_line) ++before;
  }
  return static_cast<long>(post_line - 1) + before;
}

long FileChanges::view_position_pre(int pre_line) const {
  if (!deletes.contains(pre_line)) {
    if (auto post = pre_to_post(pre_line)) return view_position_post(*post);
  }
  long before = 0;
  for (int d : deletes) {
    if (d < pre_line) ++before;
  }
  return static_cast<long>(delete_anchor(pre_line) - 1) + before;
}

bool FileChanges::intersects_adds(int start, int end) const {
  auto it = adds.lower_bound(start);
  return it != adds.end() && *it <= end;
}

bool FileChanges::intersects_deletes(int start, int end) const {
  auto it = deletes.lower_bound(start);
  return it != deletes.end() && *it <= end;
}

bool ChangedLineMap::empty() const {
  for (const auto& [file, fc] : files) {
    if (!fc.adds.empty() || !fc.deletes.empty()) return false;
  }
  return true;
}

const FileChanges* ChangedLineMap::find(const std::string& file) const {
  auto it = files.find(file);
  return it == files.end() ? nullptr : &it->second;
}

ChangedLineMap changed_lines(const std::vector<DiffHunk>& hunks) {
  ChangedLineMap map;
  for (const auto& h : hunks) {
    auto& fc = map.files[h.file];
    fc.new_file = fc.new_file || h.new_file;
    fc.deleted_file = fc.deleted_file || h.deleted_file;
    fc.hunks.push_back(h);
    for (const auto& l : locate_lines(h)) {
      if (l.op == LineOp::kAdd) fc.adds.insert(l.post);
      if (l.op == LineOp::kDelete) fc.deletes.insert(l.pre);
    }
  }
  for (auto& [file, fc] : map.files) {
    std::stable_sort(fc.hunks.begin(), fc.hunks.end(), [](const DiffHunk& a, const DiffHunk& b) {
      return std::tie(a.old_start, a.new_start) < std::tie(b.old_start, b.new_start);
    });
  }
  return map;
}

std::vector<DiffHunk> hunks_for_file(const std::vector<DiffHunk>& hunks, const std::string& file) {
  std::vector<DiffHunk> out;
  for (const auto& h : hunks) {
    if (h.file == file) out.push_back(h);
  }
  return out;
}

namespace {

// Shared walk for both directions: `from` is the image being read, the
// output collects the other image. `from_is_post` picks which ops are
// consumed and which are emitted.
std::string rewrite_image(std::string_view from_text, std::vector<DiffHunk> hunks, bool from_is_post) {
  auto from = split_lines(from_text);
  bool trailing = from_text.empty() || from_text.back() == '\n';
  std::sort(hunks.begin(), hunks.end(), [&](const DiffHunk& a, const DiffHunk& b) {
    return from_is_post ? a.new_start < b.new_start : a.old_start < b.old_start;
  });

  std::vector<std::string> out;
  int cursor = 1;  // next unread line of `from`
  for (const auto& h : hunks) {
    int start = from_is_post ? first_post(h) : first_pre(h);
    while (cursor < start) {
      if (cursor > static_cast<int>(from.size())) {
        throw DiffParseError(0, "hunk for " + h.file + " starts past end of file");
      }
      out.push_back(from[cursor - 1]);
      ++cursor;
    }
    for (const auto& l : h.lines) {
      bool consumed = l.op == LineOp::kKeep || (from_is_post ? l.op == LineOp::kAdd : l.op == LineOp::kDelete);
      bool emitted = l.op == LineOp::kKeep || (from_is_post ? l.op == LineOp::kDelete : l.op == LineOp::kAdd);
      if (consumed) {
        if (cursor > static_cast<int>(from.size()) || from[cursor - 1] != l.text) {
          throw DiffParseError(0, "context mismatch in " + h.file + " at line " + std::to_string(cursor));
        }
        ++cursor;
      }
      if (emitted) out.push_back(l.text);
    }
  }
  while (cursor <= static_cast<int>(from.size())) {
    out.push_back(from[cursor - 1]);
    ++cursor;
  }
  if (out.empty()) return {};
  return join_lines(out, trailing);
}

}  // namespace

std::string reconstruct_pre_image(std::string_view post, const std::vector<DiffHunk>& file_hunks) {
  return rewrite_image(post, file_hunks, true);
}

std::string apply_hunks(std::string_view pre, const std::vector<DiffHunk>& file_hunks) {
  return rewrite_image(pre, file_hunks, false);
}

}  // namespace slicereview::ingest
