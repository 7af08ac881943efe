#include <doctest.h>

#include "common/error.hpp"
#include "common/text.hpp"
#include "render/render.hpp"
#include "slice_support.hpp"
#include "support.hpp"

using namespace slicereview;
using namespace slicereview::render;
using ingest::LineOp;

namespace {

slicer::CodeSlice slice_of(std::vector<slicer::SliceRow> rows) {
  slicer::CodeSlice s;
  s.rows = std::move(rows);
  return s;
}

// Strips every row prefix up to and including '|' and drops ellipsis rows.
std::string strip_inline(const std::string& body) {
  std::vector<std::string> out;
  for (const auto& l : split_lines(body)) {
    if (l == "...|...") continue;
    out.push_back(l.substr(l.find('|') + 1));
  }
  return join_lines(out, false);
}

std::vector<LineRow> without_ellipsis(const std::vector<LineRow>& rows) {
  std::vector<LineRow> out;
  for (const auto& r : rows) {
    if (!r.ellipsis) out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("kept row") {
  auto r = render_slice(slice_of({{LineOp::kKeep, 12, 12, "int a;"}}), RenderMode::kInline);
  CHECK(r.body == " 12|int a;");
  CHECK_FALSE(r.position_appendix.has_value());
  auto rows = parse_inline(" 12|int a;");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0] == LineRow{LineOp::kKeep, 12, "int a;", false});
}

TEST_CASE("added and deleted rows") {
  auto r = render_slice(slice_of({{LineOp::kDelete, 7, 10, "x = 1;"}, {LineOp::kAdd, 7, 11, "x = 2;"}}),
                        RenderMode::kInline);
  CHECK(r.body == "-7|x = 1;\n+7|x = 2;");
}

TEST_CASE("gaps become one ellipsis row") {
  auto r = render_slice(slice_of({{LineOp::kKeep, 3, 3, "a();"}, {LineOp::kKeep, 4, 4, "b();"},
                                  {LineOp::kKeep, 9, 9, "c();"}}),
                        RenderMode::kInline);
  CHECK(r.body == " 3|a();\n 4|b();\n...|...\n 9|c();");
  REQUIRE(r.line_table.size() == 4);
  CHECK(r.line_table[2].ellipsis);
  CHECK(parse_inline(r.body).size() == 3);
}

TEST_CASE("content keeps its own bars and spaces") {
  auto rows = parse_inline("+5|  a = b | c;\n-6|");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == LineRow{LineOp::kAdd, 5, "  a = b | c;", false});
  CHECK(rows[1] == LineRow{LineOp::kDelete, 6, "", false});
}

TEST_CASE("malformed rows report their index") {
  auto row_of = [](const char* text) {
    try {
      parse_inline(text);
    } catch (const RenderParseError& e) {
      return e.row();
    }
    return -1;
  };
  CHECK(row_of(" 1|ok\n*2|bad") == 1);
  CHECK(row_of(" 1|ok\n...|...\n 3 no bar") == 2);
  CHECK(row_of("+x|nan") == 0);
  CHECK(row_of(" -3|neg") == 0);
  CHECK(row_of(" |empty") == 0);
  CHECK(row_of(" 1|a\n\n 2|b") == 1);
}

TEST_CASE("no-position and relative modes") {
  auto s = slice_of({{LineOp::kKeep, 3, 3, "a();"}, {LineOp::kAdd, 4, 4, "b();"}, {LineOp::kDelete, 8, 9, "c();"}});
  auto inl = render_slice(s, RenderMode::kInline);
  auto none = render_slice(s, RenderMode::kNoPosition);
  CHECK(none.body == "a();\nb();\nc();");
  CHECK(none.body == strip_inline(inl.body));
  auto rel = render_slice(s, RenderMode::kRelativeList);
  CHECK(rel.body == none.body);
  REQUIRE(rel.position_appendix);
  CHECK(*rel.position_appendix == "1: keep 3\n2: add 4\n3: delete 8\n");
  auto parsed = parse_relative_appendix(*rel.position_appendix);
  REQUIRE(parsed.size() == 3);
  CHECK(parsed[2].first == 3);
  CHECK(parsed[2].second.op == LineOp::kDelete);
  CHECK(parsed[2].second.line == 8);
  CHECK_THROWS_AS(parse_relative_appendix("1 keep 3"), RenderParseError);
  CHECK_THROWS_AS(parse_relative_appendix("1: move 3"), RenderParseError);
}

TEST_CASE("mode names") {
  CHECK(parse_render_mode("none") == RenderMode::kNoPosition);
  CHECK(parse_render_mode("relative") == RenderMode::kRelativeList);
  CHECK(parse_render_mode("inline") == RenderMode::kInline);
  CHECK_THROWS_AS(parse_render_mode("side"), ConfigError);
}

TEST_CASE("corpus slices round-trip through the inline grammar") {
  int checked = 0;
  for (const char* c : {"case01", "case02", "case03"}) {
    auto snap = ingest::load_snapshot(fixture("corpus/repo"), c);
    auto hunks = ingest::parse_unified_diff(read_file(fixture(std::string("corpus/diffs/") + c + ".diff")));
    auto changes = ingest::changed_lines(hunks);
    auto index = ast::build_ast_index(snap, "mini", slicer::pre_images_for(snap, hunks));
    for (auto opt : {slicer::SlicingOption::kOriginalDiff, slicer::SlicingOption::kParentFunction,
                     slicer::SlicingOption::kLeftFlow, slicer::SlicingOption::kFullFlow}) {
      for (const auto& s : slicer::code_slicing(snap, changes, index, opt)) {
        auto r = render_slice(s, RenderMode::kInline);
        CHECK(parse_inline(r.body) == without_ellipsis(r.line_table));
        CHECK(render_slice(s, RenderMode::kNoPosition).body == strip_inline(r.body));
        ++checked;
      }
    }
  }
  CHECK(checked >= 12);
}

TEST_CASE("case01 inline rendering") {
  auto snap = ingest::load_snapshot(fixture("corpus/repo"), "case01");
  auto hunks = ingest::parse_unified_diff(read_file(fixture("corpus/diffs/case01.diff")));
  auto changes = ingest::changed_lines(hunks);
  auto index = ast::build_ast_index(snap, "mini", slicer::pre_images_for(snap, hunks));
  auto slices = slicer::code_slicing(snap, changes, index, slicer::SlicingOption::kLeftFlow);
  REQUIRE(slices.size() == 2);
  CHECK(render_slice(slices[0], RenderMode::kInline).body == "+2|var grace = 1;");
  std::vector<std::string> prefixes;
  for (const auto& l : split_lines(render_slice(slices[1], RenderMode::kInline).body)) {
    prefixes.push_back(l.substr(0, l.find('|')));
  }
  CHECK(prefixes == std::vector<std::string>{"+2", "...", " 5", "-5", "-6", "...", "-8", "+6"});
}
