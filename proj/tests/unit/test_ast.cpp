#include <doctest.h>

#include <algorithm>

#include "ast/frontend.hpp"
#include "ast_support.hpp"
#include "common/error.hpp"
#include "common/text.hpp"
#include "support.hpp"

using namespace slicereview;
using namespace slicereview::ast;

namespace {

const char* kOneFunction =
    "fn total(items, tax) {\n"    // 1
    "  var sum = 0;\n"            // 2
    "  sum = sum + items;\n"      // 3
    "  log(sum);\n"               // 4
    "  var out = sum * tax;\n"    // 5
    "  return out;\n"             // 6
    "}\n";

// Hand-drawn tree: if@3 { if@4 { 5 } else if@7 { 8 } } for@11 { 12 }.
// An else branch is governed by the condition of its if.
const char* kNested =
    "fn walk(a, b) {\n"                         // 1
    "  var x = a;\n"                            // 2
    "  if (x > 0) {\n"                          // 3
    "    if (b) {\n"                            // 4
    "      x = x - 1;\n"                        // 5
    "    }\n"                                   // 6
    "    else if (a) {\n"                       // 7
    "      emit(a);\n"                          // 8
    "    }\n"                                   // 9
    "  }\n"                                     // 10
    "  for (var i = 0; i < x; i = i + 1) {\n"   // 11
    "    b = b + i;\n"                          // 12
    "  }\n"                                     // 13
    "  return b;\n"                             // 14
    "}\n";

const char* kTrace =
    "var limit = 10;\n"                    // 1
    "fn run(n) {\n"                        // 2
    "  var v = n;\n"                       // 3
    "  var w = limit;\n"                   // 4
    "  v = v + 1;\n"                       // 5
    "  w = v * 2;\n"                       // 6
    "  if (w > limit) {\n"                 // 7
    "    v = g(w);\n"                      // 8
    "  }\n"                                // 9
    "  return w;\n"                        // 10
    "}\n"                                  // 11
    "fn g(k) {\n"                          // 12
    "  return k;\n"                        // 13
    "}\n";

}  // namespace

TEST_CASE("mini statement kinds and variable sets") {
  auto frag = parse_mini_source("var a = 1;\n");
  REQUIRE(frag.statements.size() == 1);
  CHECK(frag.statements[0].kind == StatementKind::kDeclaration);
  CHECK(frag.statements[0].lvalues == std::set<std::string>{"a"});
  CHECK(frag.statements[0].rvalues.empty());
  CHECK_FALSE(frag.statements[0].parent_function.has_value());

  frag = parse_mini_source("fn h() {\n  a = b + f(c);\n}\n");
  REQUIRE(frag.statements.size() == 1);
  const auto& s = frag.statements[0];
  CHECK(s.kind == StatementKind::kAssignment);
  CHECK(s.lvalues == std::set<std::string>{"a"});
  CHECK(s.rvalues == std::set<std::string>{"b", "c"});
  CHECK(s.callees == std::set<std::string>{"f"});
  CHECK(s.parent_function == 0);
}

TEST_CASE("call, return and member access") {
  auto frag = parse_mini_source("fn h(p) {\n  f(p.x, q);\n  return p->y;\n}\n");
  REQUIRE(frag.statements.size() == 2);
  CHECK(frag.statements[0].kind == StatementKind::kCall);
  CHECK(frag.statements[0].rvalues == std::set<std::string>{"p", "q"});
  CHECK(frag.statements[0].callees == std::set<std::string>{"f"});
  CHECK(frag.statements[1].kind == StatementKind::kReturn);
  CHECK(frag.statements[1].rvalues == std::set<std::string>{"p"});
  CHECK(frag.functions[0].signature == "fn h(p)");
}

TEST_CASE("one function with five statements") {
  auto index = build_ast_index(make_snapshot({{"a.mini", kOneFunction}}), "mini");
  CHECK(index.functions().size() == 1);
  CHECK(index.statements().size() == 5);
  const auto& fn = index.functions()[0];
  CHECK(fn.name == "total");
  CHECK(fn.span == LineSpan{1, 7});
  CHECK(fn.statement_ids.size() == 5);
  for (auto id : fn.statement_ids) {
    const auto& s = index.statement(id);
    CHECK(s.span.start >= fn.span.start);
    CHECK(s.span.end <= fn.span.end);
    CHECK(s.parent_function == fn.id);
  }
  CHECK(std::is_sorted(fn.statement_ids.begin(), fn.statement_ids.end(), [&](auto x, auto y) {
    return index.statement(x).span.start < index.statement(y).span.start;
  }));
}

TEST_CASE("empty snapshot gives an empty index") {
  auto index = build_ast_index(make_snapshot({}), "mini");
  CHECK(index.empty());
  CHECK(index.functions().empty());
  CHECK(index.errors().empty());
}

TEST_CASE("syntax errors are recorded and the file is left out") {
  auto index = build_ast_index(
      make_snapshot({{"bad.mini", "fn f() {\n  var a = 1;\n"}, {"good.mini", kOneFunction}, {"notes.txt", "hi"}}),
      "mini");
  REQUIRE(index.errors().size() == 1);
  CHECK(index.errors()[0].file == "bad.mini");
  CHECK(index.errors()[0].line == 1);
  CHECK(index.unit("bad.mini", Image::kPost) == nullptr);
  CHECK(index.statements().size() == 5);
  CHECK(index.skipped() == std::vector<std::string>{"notes.txt"});
}

TEST_CASE("parse errors carry a line") {
  auto line_of = [](const char* src) {
    try {
      parse_mini_source(src);
    } catch (const SourceParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("fn f() {\n  var a = 1\n}\n") == 2);
  CHECK(line_of("var a = 1;\n}\n") == 2);
  CHECK(line_of("fn f() {\n  if (a) {\n    b = 1;\n}\n") == 1);
}

TEST_CASE("unknown frontend is a configuration error") {
  CHECK_THROWS_AS(build_ast_index(make_snapshot({}), "cobol"), ConfigError);
}

TEST_CASE("nested control parents follow the hand-drawn tree") {
  auto index = build_ast_index(make_snapshot({{"n.mini", kNested}}), "mini");
  REQUIRE(index.errors().empty());
  auto parents = [&](int line) {
    std::vector<int> out;
    for (auto id : stmt_at(index, "n.mini", line)->control_parents) out.push_back(index.statement(id).span.start);
    return out;
  };
  CHECK(parents(2).empty());
  CHECK(parents(3).empty());
  CHECK(parents(4) == std::vector<int>{3});
  CHECK(parents(5) == std::vector<int>{3, 4});
  CHECK(parents(7) == std::vector<int>{3, 4});
  CHECK(parents(8) == std::vector<int>{3, 4, 7});
  CHECK(parents(11).empty());
  CHECK(parents(12) == std::vector<int>{11});
  CHECK(parents(14).empty());

  const auto* cond = stmt_at(index, "n.mini", 3);
  CHECK(cond->kind == StatementKind::kControl);
  CHECK(cond->rvalues == std::set<std::string>{"x"});
  const auto* loop = stmt_at(index, "n.mini", 11);
  CHECK(loop->kind == StatementKind::kControl);
  CHECK(loop->lvalues == std::set<std::string>{"i"});
  CHECK(loop->rvalues == std::set<std::string>{"i", "x"});
  CHECK(index.statements().size() == 9);
}

TEST_CASE("def-use tables agree with statement sets") {
  for (const char* src : {kOneFunction, kNested, kTrace}) {
    auto index = build_ast_index(make_snapshot({{"f.mini", src}}), "mini");
    for (const auto& unit : index.units()) {
      for (const auto& [var, ids] : unit.defs) {
        for (auto id : ids) CHECK(index.statement(id).lvalues.contains(var));
      }
      for (const auto& [var, ids] : unit.uses) {
        for (auto id : ids) CHECK(index.statement(id).rvalues.contains(var));
      }
      for (auto id : unit.statements) {
        for (const auto& v : index.statement(id).lvalues) {
          const auto& d = unit.defs.at(v);
          CHECK(std::find(d.begin(), d.end(), id) != d.end());
        }
      }
    }
  }
}

TEST_CASE("statement spans reproduce the non-blank source lines") {
  for (const char* name : {"repo/case01/src/auth.mini", "repo/case01/src/util.mini", "repo/case02/src/cache.mini",
                           "repo/case03/src/math.mini", "pre/case01/src/auth.mini"}) {
    std::string src = read_file(fixture(std::string("corpus/") + name));
    auto index = build_ast_index(make_snapshot({{"x.mini", src}}), "mini");
    REQUIRE(index.errors().empty());
    const auto& frag = index;
    auto lines = split_lines(src);
    // Covered lines: statement spans, function headers and closing braces.
    std::set<int> covered;
    for (const auto& s : frag.statements()) {
      REQUIRE(s.span.start <= s.span.end);
      REQUIRE(s.text.size() == static_cast<size_t>(s.span.end - s.span.start + 1));
      for (int l = s.span.start; l <= s.span.end; ++l) {
        CHECK(s.text[static_cast<size_t>(l - s.span.start)] == lines[static_cast<size_t>(l - 1)]);
        covered.insert(l);
      }
    }
    for (const auto& f : frag.functions()) covered.insert(f.span.start);
    for (size_t i = 0; i < lines.size(); ++i) {
      std::string t = trim(lines[i]);
      if (t.empty() || t == "}") continue;
      CHECK_MESSAGE(covered.contains(static_cast<int>(i + 1)), name << ":" << i + 1);
    }
  }
}

TEST_CASE("defining statements") {
  auto index = build_ast_index(make_snapshot({{"t.mini", kTrace}}), "mini");
  auto at = [&](int line) { return stmt_at(index, "t.mini", line)->id; };
  // declared at 3 and redefined at 5, queried at 6
  CHECK(start_lines(defining_statements(index, "v", at(6))) == std::vector<int>{3, 5});
  CHECK(start_lines(defining_statements(index, "v", at(4))) == std::vector<int>{3});
  // file-scope declaration
  CHECK(start_lines(defining_statements(index, "limit", at(7))) == std::vector<int>{1});
  CHECK(defining_statements(index, "nothing", at(7)).empty());
  // parameters have no defining statement
  CHECK(defining_statements(index, "n", at(3)).empty());
  for (int line : {4, 5, 6, 7, 8, 10}) {
    for (const auto* s : defining_statements(index, "v", at(line))) CHECK(s->span.start < line);
  }
}

TEST_CASE("forward affected statements and callee signatures") {
  auto index = build_ast_index(make_snapshot({{"t.mini", kTrace}}), "mini");
  auto at = [&](int line) { return stmt_at(index, "t.mini", line)->id; };
  auto fw = forward_affected(index, "w", at(6));
  CHECK(start_lines(fw.statements) == std::vector<int>{7, 8, 10});
  CHECK(fw.callee_signatures == std::vector<std::string>{"fn g(k)"});
  auto none = forward_affected(index, "w", at(10));
  CHECK(none.statements.empty());
  CHECK(none.callee_signatures.empty());
  // stays inside the function
  CHECK(start_lines(forward_affected(index, "k", at(8)).statements).empty());
  CHECK(index.signature_of("g", "t.mini") == "fn g(k)");
  CHECK_FALSE(index.signature_of("missing", "t.mini").has_value());
}

TEST_CASE("pre-image units are indexed separately") {
  std::string post = read_file(fixture("corpus/repo/case01/src/auth.mini"));
  std::string pre = read_file(fixture("corpus/pre/case01/src/auth.mini"));
  auto index = build_ast_index(make_snapshot({{"src/auth.mini", post}}), "mini", {{"src/auth.mini", pre}});
  REQUIRE(index.unit("src/auth.mini", Image::kPost));
  REQUIRE(index.unit("src/auth.mini", Image::kPre));
  for (auto id : index.unit("src/auth.mini", Image::kPre)->statements) CHECK(index.statement(id).image == Image::kPre);
  auto dump = dump_ast_json(index);
  CHECK(dump.is_object());
}

TEST_CASE("frontend registry") {
  auto& reg = FrontendRegistry::instance();
  auto ids = reg.ids();
  CHECK(std::find(ids.begin(), ids.end(), "mini") != ids.end());
  auto mini = reg.find("mini");
  REQUIRE(mini);
  CHECK(mini->accepts("src/a.mini"));
  CHECK_FALSE(mini->accepts("src/a.cpp"));
  CHECK_FALSE(reg.find("nope"));
}
