#include <doctest.h>

#include <algorithm>

#include "common/error.hpp"
#include "slice_scenarios.hpp"

using namespace slicereview;
using namespace slicereview::slicer;

using namespace scenarios;

TEST_CASE("option names") {
  CHECK(parse_slicing_option("diff") == SlicingOption::kOriginalDiff);
  CHECK(parse_slicing_option("function") == SlicingOption::kParentFunction);
  CHECK(parse_slicing_option("leftflow") == SlicingOption::kLeftFlow);
  CHECK(parse_slicing_option("fullflow") == SlicingOption::kFullFlow);
  CHECK(std::string(slicing_option_name(SlicingOption::kFullFlow)) == "fullflow");
  CHECK_THROWS_AS(parse_slicing_option("rightflow"), ConfigError);
}

TEST_CASE("no changes, no slices") {
  auto s = make_scenario({{"f.mini", {" fn f() {", "   g();", " }"}}});
  for (auto opt : {SlicingOption::kOriginalDiff, SlicingOption::kParentFunction, SlicingOption::kLeftFlow,
                   SlicingOption::kFullFlow}) {
    CHECK(s->slice(opt).empty());
  }
}

TEST_CASE("left flow pulls the backward trace and governing condition") {
  auto s = make_scenario(kLeftFlowCase);
  CHECK(slice_lines(*s, SlicingOption::kLeftFlow) == std::vector<V>{{"3", "6", "8"}});
  CHECK(slice_lines(*s, SlicingOption::kOriginalDiff) == std::vector<V>{{"3", "8"}});
  CHECK(slice_lines(*s, SlicingOption::kFullFlow) == std::vector<V>{{"3", "6", "8"}});
  CHECK(slice_lines(*s, SlicingOption::kParentFunction) ==
        std::vector<V>{{"2", "3", "4", "5", "6", "7", "8", "10"}});
}

TEST_CASE("parent function gives one slice per touched function") {
  auto s = make_scenario(kTwoFunctions);
  CHECK(slice_lines(*s, SlicingOption::kParentFunction) == std::vector<V>{{"2", "3", "4"}, {"7", "8", "9", "10"}});
  // Expansions that never meet stay separate.
  CHECK(slice_lines(*s, SlicingOption::kLeftFlow) == std::vector<V>{{"2", "3"}, {"7", "8", "9"}});
  CHECK(slice_lines(*s, SlicingOption::kOriginalDiff) == std::vector<V>{{"2", "3"}, {"7", "8", "9"}});
}

TEST_CASE("parent function rows cover the whole body") {
  auto s = make_scenario(kTwoFunctions);
  auto slices = s->slice(SlicingOption::kParentFunction);
  REQUIRE(slices.size() == 2);
  std::vector<int> lines;
  for (const auto& r : slices[1].rows) lines.push_back(r.line);
  CHECK(lines == std::vector<int>{6, 7, 8, 9, 10, 11});
  CHECK(slices[1].rows[3].op == ingest::LineOp::kAdd);
  CHECK(slices[1].rows[3].content == "  emit(v);");
}

TEST_CASE("expansion absorbs later cached statements") {
  auto s = make_scenario(kSpread);
  auto pf = s->slice(SlicingOption::kParentFunction);
  REQUIRE(pf.size() == 1);
  CHECK(describe_slice(s->index, pf[0]) == V{"6", "7", "8", "9", "10", "11"});
  CHECK(pf[0].seed == std::vector<ast::StatementId>{s->post("f.mini", 7)});
  CHECK(pf[0].absorbed == std::vector<ast::StatementId>{s->post("f.mini", 9)});

  CHECK(slice_lines(*s, SlicingOption::kOriginalDiff) == std::vector<V>{{"1", "6", "7"}, {"6", "7", "8", "9"}});
  CHECK(slice_lines(*s, SlicingOption::kLeftFlow) == std::vector<V>{{"1", "6", "7"}, {"1", "6", "7", "8", "9"}});
  // Forward trace of b from 7 reaches the cached 9, whose own expansion
  // brings in the uses of c.
  auto ff = s->slice(SlicingOption::kFullFlow);
  REQUIRE(ff.size() == 1);
  CHECK(describe_slice(s->index, ff[0]) == V{"1", "6", "7", "8", "9", "10", "11"});
  CHECK(ff[0].absorbed == std::vector<ast::StatementId>{s->post("f.mini", 9)});
}

TEST_CASE("cache and contiguous segments") {
  auto s = make_scenario(kRuns);
  SliceCache cache;
  process_ast(*s->ctx, cache);
  CHECK(cache.size() == 3);
  CHECK(s->index.statements().size() == 7);
  auto seed = get_contiguous_diff_segment(*s->ctx, cache);
  CHECK(seed == std::vector<ast::StatementId>{s->post("f.mini", 3), s->post("f.mini", 4)});
  auto slice = generate_new_slice(seed, cache, SlicingOption::kOriginalDiff, *s->ctx, 1);
  CHECK(cache.size() == 1);
  CHECK(cache.contains(s->post("f.mini", 7)));
  CHECK(slice.absorbed.empty());
  seed = get_contiguous_diff_segment(*s->ctx, cache);
  CHECK(seed == std::vector<ast::StatementId>{s->post("f.mini", 7)});
}

TEST_CASE("a statement spanning the changed line is cached") {
  auto s = make_scenario({{"f.mini", {" fn f(a) {", "   g(a,", "+    1,", "     2);", " }"}}});
  SliceCache cache;
  process_ast(*s->ctx, cache);
  REQUIRE(cache.size() == 1);
  CHECK(cache.contains(s->post("f.mini", 2)));
}

TEST_CASE("seeds come from the lexicographically first file") {
  auto s = make_scenario({{"b.mini", {" fn f() {", "+  g();", " }"}}, {"a.mini", {" fn h() {", "+  k();", " }"}}});
  SliceCache cache;
  process_ast(*s->ctx, cache);
  CHECK(cache.size() == 2);
  auto seed = get_contiguous_diff_segment(*s->ctx, cache);
  REQUIRE(seed.size() == 1);
  CHECK(s->index.statement(seed[0]).file == "a.mini");
  auto slices = s->slice(SlicingOption::kLeftFlow);
  REQUIRE(slices.size() == 2);
  CHECK(slices[0].file == "a.mini");
  CHECK(slices[1].file == "b.mini");
}

TEST_CASE("deleted statements are sliced from the pre-image") {
  auto s = make_scenario(kDelete);
  CHECK(slice_lines(*s, SlicingOption::kOriginalDiff) == std::vector<V>{{"2", "-3"}});
  CHECK(slice_lines(*s, SlicingOption::kLeftFlow) == std::vector<V>{{"2", "-3"}});
  CHECK(slice_lines(*s, SlicingOption::kFullFlow) == std::vector<V>{{"2", "-3", "3"}});
  CHECK(slice_lines(*s, SlicingOption::kParentFunction) == std::vector<V>{{"2", "-3", "3"}});
  auto slice = s->slice(SlicingOption::kFullFlow).at(0);
  REQUIRE(slice.rows.size() == 3);
  CHECK(slice.rows[0] == SliceRow{ingest::LineOp::kKeep, 2, slice.rows[0].view_pos, "  var x = a;"});
  CHECK(slice.rows[1].op == ingest::LineOp::kDelete);
  CHECK(slice.rows[1].line == 3);
  CHECK(slice.rows[2].op == ingest::LineOp::kKeep);
  CHECK(slice.rows[2].line == 3);
  CHECK(slice.rows[2].content == "  return x;");
}

TEST_CASE("a modified line seeds one slice with both images") {
  auto s = make_scenario(kModify);
  auto slices = s->slice(SlicingOption::kOriginalDiff);
  REQUIRE(slices.size() == 1);
  CHECK(slices[0].seed == std::vector<ast::StatementId>{s->pre("f.mini", 3), s->post("f.mini", 3)});
  CHECK(describe_slice(s->index, slices[0]) == V{"2", "-3", "3"});
  std::vector<ingest::LineOp> ops;
  for (const auto& r : slices[0].rows) ops.push_back(r.op);
  CHECK(ops == std::vector<ingest::LineOp>{ingest::LineOp::kKeep, ingest::LineOp::kDelete, ingest::LineOp::kAdd});
}

TEST_CASE("full flow collects callee signatures") {
  auto s = make_scenario(kCallee);
  auto ff = s->slice(SlicingOption::kFullFlow);
  REQUIRE(ff.size() == 1);
  CHECK(describe_slice(s->index, ff[0]) == V{"5", "6"});
  CHECK(ff[0].callee_signatures == V{"fn helper(k, m)"});
  auto lf = s->slice(SlicingOption::kLeftFlow);
  REQUIRE(lf.size() == 1);
  CHECK(describe_slice(s->index, lf[0]) == V{"5"});
  CHECK(lf[0].callee_signatures.empty());
}

TEST_CASE("file-scope statements fall back under parent function") {
  auto s = make_scenario({{"f.mini", {" var base = 2;", "+var top = base + 1;", " fn f() {", "   return top;", " }"}}});
  CHECK(slice_lines(*s, SlicingOption::kParentFunction) == std::vector<V>{{"1", "2"}});
}

TEST_CASE("full flow contains left flow and every input") {
  for (const auto* files : {&kLeftFlowCase, &kTwoFunctions, &kSpread, &kRuns, &kDelete, &kModify, &kCallee, &kNested}) {
    auto s = make_scenario(*files);
    for (const auto& st : s->index.statements()) {
      if (!s->ctx->normalize(st.id) || *s->ctx->normalize(st.id) != st.id) continue;
      std::vector<ast::StatementId> in{st.id};
      auto lf = apply_slicing_algorithm(in, SlicingOption::kLeftFlow, *s->ctx).statements;
      auto ff = apply_slicing_algorithm(in, SlicingOption::kFullFlow, *s->ctx).statements;
      CHECK(std::includes(ff.begin(), ff.end(), lf.begin(), lf.end()));
      for (auto opt : {SlicingOption::kOriginalDiff, SlicingOption::kParentFunction, SlicingOption::kLeftFlow,
                       SlicingOption::kFullFlow}) {
        CHECK(apply_slicing_algorithm(in, opt, *s->ctx).statements.contains(st.id));
      }
    }
  }
}

TEST_CASE("slices partition the cached statements and are deterministic") {
  for (const auto* files : {&kLeftFlowCase, &kTwoFunctions, &kSpread, &kRuns, &kDelete, &kModify, &kCallee, &kNested}) {
    auto s = make_scenario(*files);
    SliceCache cache;
    process_ast(*s->ctx, cache);
    auto initial = cache.ids();
    for (auto opt : {SlicingOption::kOriginalDiff, SlicingOption::kParentFunction, SlicingOption::kLeftFlow,
                     SlicingOption::kFullFlow}) {
      auto slices = s->slice(opt);
      std::vector<ast::StatementId> owned;
      for (const auto& sl : slices) {
        owned.insert(owned.end(), sl.seed.begin(), sl.seed.end());
        owned.insert(owned.end(), sl.absorbed.begin(), sl.absorbed.end());
        for (auto id : sl.seed) {
          CHECK(std::any_of(sl.members.begin(), sl.members.end(), [&](const auto& m) { return m.id == id; }));
        }
      }
      std::sort(owned.begin(), owned.end());
      auto expect = initial;
      std::sort(expect.begin(), expect.end());
      CHECK(owned == expect);
      CHECK(slices_to_json(slices, s->index) == slices_to_json(s->slice(opt), s->index));
    }
  }
}

TEST_CASE("every traced scenario matches under all four options") {
  for (const auto& t : traced()) {
    auto s = make_scenario(*t.files);
    for (const auto& [opt, want] : t.expect) {
      CAPTURE(t.name);
      CAPTURE(slicing_option_name(opt));
      CHECK(slice_lines(*s, opt) == want);
    }
  }
}
