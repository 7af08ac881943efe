#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ingest/diff.hpp"
#include "slicer/slicer.hpp"

namespace slicereview::render {

enum class RenderMode { kNoPosition, kRelativeList, kInline };

/// Config spelling: none, relative, inline.
const char* render_mode_name(RenderMode mode);
/// Throws ConfigError.
RenderMode parse_render_mode(const std::string& name);

struct LineRow {
  ingest::LineOp op = ingest::LineOp::kKeep;
  int line = 0;
  std::string content;
  bool ellipsis = false;

  bool operator==(const LineRow&) const = default;
};

struct RenderedSlice {
  std::string body;
  std::optional<std::string> position_appendix;  // RelativeList only
  std::vector<LineRow> line_table;                // includes ellipsis rows
};

/// Rows are emitted in slice order; wherever consecutive rows are not
/// adjacent in the source a single `...|...` row stands in for the gap.
RenderedSlice render_slice(const slicer::CodeSlice& slice, RenderMode mode);

/// Reads rows of the form ` N|text`, `-N|text`, `+N|text`; `...|...` rows are
/// skipped. Throws RenderParseError with the 0-based row index.
std::vector<LineRow> parse_inline(std::string_view text);

/// One "index: op line" entry per appendix line, index counting body lines
/// from 1. Throws RenderParseError.
std::vector<std::pair<int, LineRow>> parse_relative_appendix(std::string_view text);

}  // namespace slicereview::render
