#include "render/render.hpp"

#include <algorithm>
#include <charconv>

#include "common/error.hpp"
#include "common/text.hpp"

namespace slicereview::render {

using ingest::LineOp;

namespace {

constexpr std::string_view kEllipsis = "...|...";

std::optional<LineOp> op_from_marker(char c) {
  switch (c) {
    case ' ': return LineOp::kKeep;
    case '+': return LineOp::kAdd;
    case '-': return LineOp::kDelete;
    default: return std::nullopt;
  }
}

std::optional<LineOp> op_from_name(std::string_view name) {
  for (auto op : {LineOp::kKeep, LineOp::kAdd, LineOp::kDelete}) {
    if (name == ingest::line_op_name(op)) return op;
  }
  return std::nullopt;
}

}  // namespace

const char* render_mode_name(RenderMode mode) {
  switch (mode) {
    case RenderMode::kNoPosition: return "none";
    case RenderMode::kRelativeList: return "relative";
    case RenderMode::kInline: return "inline";
  }
  return "inline";
}

RenderMode parse_render_mode(const std::string& name) {
  for (auto m : {RenderMode::kNoPosition, RenderMode::kRelativeList, RenderMode::kInline}) {
    if (name == render_mode_name(m)) return m;
  }
  throw ConfigError("unknown position format '" + name + "' (expected none, relative or inline)");
}

RenderedSlice render_slice(const slicer::CodeSlice& slice, RenderMode mode) {
  RenderedSlice out;
  const slicer::SliceRow* prev = nullptr;
  for (const auto& row : slice.rows) {
    if (prev && row.view_pos > prev->view_pos + 1) out.line_table.push_back({LineOp::kKeep, 0, "", true});
    out.line_table.push_back({row.op, row.line, row.content, false});
    prev = &row;
  }

  std::vector<std::string> body;
  std::string appendix;
  for (const auto& r : out.line_table) {
    if (mode == RenderMode::kInline) {
      if (r.ellipsis) body.emplace_back(kEllipsis);
      else body.push_back(ingest::line_op_marker(r.op) + std::to_string(r.line) + "|" + r.content);
      continue;
    }
    if (r.ellipsis) continue;
    body.push_back(r.content);
    if (mode == RenderMode::kRelativeList) {
      appendix += std::to_string(body.size()) + ": " + ingest::line_op_name(r.op) + " " + std::to_string(r.line) + "\n";
    }
  }
  out.body = join_lines(body, false);
  if (mode == RenderMode::kRelativeList) out.position_appendix = appendix;
  return out;
}

std::vector<LineRow> parse_inline(std::string_view text) {
  std::vector<LineRow> rows;
  auto lines = split_lines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string& l = lines[i];
    const int row = static_cast<int>(i);
    if (l == kEllipsis) continue;
    if (l.empty()) throw RenderParseError(row, "empty row");
    auto op = op_from_marker(l[0]);
    if (!op) throw RenderParseError(row, "row must start with ' ', '+' or '-'");
    size_t bar = l.find('|', 1);
    if (bar == std::string::npos || bar == 1) throw RenderParseError(row, "missing line number");
    if (!std::all_of(l.begin() + 1, l.begin() + static_cast<long>(bar), [](char c) { return c >= '0' && c <= '9'; })) {
      throw RenderParseError(row, "line number must be digits");
    }
    int line = 0;
    auto [ptr, ec] = std::from_chars(l.data() + 1, l.data() + bar, line);
    if (ec != std::errc() || ptr != l.data() + bar) throw RenderParseError(row, "line number must be digits");
    rows.push_back({*op, line, l.substr(bar + 1), false});
  }
  return rows;
}

std::vector<std::pair<int, LineRow>> parse_relative_appendix(std::string_view text) {
  std::vector<std::pair<int, LineRow>> out;
  auto lines = split_lines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string& l = lines[i];
    const int row = static_cast<int>(i);
    size_t colon = l.find(": ");
    size_t space = colon == std::string::npos ? std::string::npos : l.find(' ', colon + 2);
    if (space == std::string::npos) throw RenderParseError(row, "expected 'index: op line'");
    int index = 0, line = 0;
    auto r1 = std::from_chars(l.data(), l.data() + colon, index);
    auto r2 = std::from_chars(l.data() + space + 1, l.data() + l.size(), line);
    auto op = op_from_name(std::string_view(l).substr(colon + 2, space - colon - 2));
    if (r1.ec != std::errc() || r1.ptr != l.data() + colon || r2.ec != std::errc() ||
        r2.ptr != l.data() + l.size() || !op) {
      throw RenderParseError(row, "expected 'index: op line'");
    }
    out.push_back({index, {*op, line, "", false}});
  }
  return out;
}

}  // namespace slicereview::render
