// Reference frontend for the mini language: a small C-like statement
// language used to exercise the slicer without a full C++ front end.
//
//   file      := (function | declaration)*
//   function  := 'fn' IDENT '(' [IDENT (',' IDENT)*] ')' block
//   block     := '{' statement* '}'
//   statement := 'var' IDENT ['=' expr] ';'
//              | 'if' '(' expr ')' block ['else' (block | if)]
//              | 'while' '(' expr ')' block
//              | 'for' '(' [simple] ';' [expr] ';' [simple] ')' block
//              | 'return' [expr] ';'
//              | simple ';'
//
// Control statements span only their header (keyword through '{'), so an
// edit inside a block does not mark the enclosing condition as changed.

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ast/frontend.hpp"
#include "common/error.hpp"

namespace slicereview::ast {

namespace {

struct Token {
  enum class Kind { kIdent, kNumber, kString, kPunct, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;
  int line = 0;
};

bool is_keyword(const std::string& s) {
  static const std::set<std::string> kKeywords = {"var",    "fn",   "if",    "else",  "while",
                                                  "for",    "return", "true", "false", "null",
                                                  "break",  "continue"};
  return kKeywords.contains(s);
}

std::vector<Token> tokenize(std::string_view src) {
  static const std::vector<std::string> kMultiPunct = {"==", "!=", "<=", ">=", "&&", "||", "+=", "-=",
                                                       "*=", "/=", "%=", "++", "--", "->", "<<", ">>"};
  std::vector<Token> out;
  int line = 1;
  size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t b = i;
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
      out.push_back({Token::Kind::kIdent, std::string(src.substr(b, i - b)), line});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t b = i;
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '.')) ++i;
      out.push_back({Token::Kind::kNumber, std::string(src.substr(b, i - b)), line});
      continue;
    }
    if (c == '"' || c == '\'') {
      size_t b = i;
      int start_line = line;
      ++i;
      while (i < src.size() && src[i] != c) {
        if (src[i] == '\\') ++i;
        else if (src[i] == '\n') throw SourceParseError(start_line, "unterminated string literal");
        ++i;
      }
      if (i >= src.size()) throw SourceParseError(start_line, "unterminated string literal");
      ++i;
      out.push_back({Token::Kind::kString, std::string(src.substr(b, i - b)), start_line});
      continue;
    }
    std::string punct(1, c);
    for (const auto& p : kMultiPunct) {
      if (src.substr(i, p.size()) == p) {
        punct = p;
        break;
      }
    }
    i += punct.size();
    out.push_back({Token::Kind::kPunct, punct, line});
  }
  out.push_back({Token::Kind::kEnd, "", line});
  return out;
}

bool is_assign_op(const std::string& t) {
  return t == "=" || t == "+=" || t == "-=" || t == "*=" || t == "/=" || t == "%=";
}

class MiniParser {
 public:
  explicit MiniParser(std::string_view text) : toks_(tokenize(text)) {}

  AstFragment run() {
    while (!at_end()) {
      if (is_kw("fn")) {
        parse_function();
      } else if (is_kw("var")) {
        parse_statement();
      } else if (peek().text == "}") {
        throw SourceParseError(peek().line, "unbalanced braces: unexpected '}'");
      } else {
        throw SourceParseError(peek().line, "expected 'fn' or 'var' at file scope");
      }
    }
    return std::move(frag_);
  }

 private:
  using Range = std::pair<size_t, size_t>;  // [begin, end) token indices

  const Token& peek(size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Token::Kind::kEnd; }
  bool is_kw(const char* kw) const { return peek().kind == Token::Kind::kIdent && peek().text == kw; }
  bool is_punct(const char* p) const { return peek().kind == Token::Kind::kPunct && peek().text == p; }

  const Token& expect_punct(const char* p, const char* what) {
    if (!is_punct(p)) {
      throw SourceParseError(peek().line, std::string("expected '") + p + "' " + what);
    }
    return toks_[pos_++];
  }

  std::string expect_ident(const char* what) {
    if (peek().kind != Token::Kind::kIdent || is_keyword(peek().text)) {
      throw SourceParseError(peek().line, std::string("expected identifier ") + what);
    }
    return toks_[pos_++].text;
  }

  // Identifiers in a token range: calls go to callees, field names after
  // '.' or '->' are skipped, everything else is a read.
  void collect(Range r, std::set<std::string>& reads, std::set<std::string>& calls,
               std::optional<size_t> skip = std::nullopt) const {
    for (size_t k = r.first; k < r.second; ++k) {
      const Token& t = toks_[k];
      if (t.kind != Token::Kind::kIdent || is_keyword(t.text) || (skip && *skip == k)) continue;
      if (k + 1 < r.second && toks_[k + 1].text == "(") {
        calls.insert(t.text);
      } else if (k > r.first && (toks_[k - 1].text == "." || toks_[k - 1].text == "->")) {
        continue;
      } else {
        reads.insert(t.text);
      }
    }
  }

  // Tokens up to (not including) `terminator` at nesting depth 0.
  Range scan_until(const char* terminator, int start_line) {
    size_t b = pos_;
    int depth = 0;
    while (true) {
      const Token& t = peek();
      if (t.kind == Token::Kind::kEnd) throw SourceParseError(start_line, "unterminated statement");
      if (depth == 0 && t.kind == Token::Kind::kPunct && t.text == terminator) break;
      if (t.text == "(" || t.text == "[") ++depth;
      if (t.text == ")" || t.text == "]") {
        if (depth == 0) throw SourceParseError(t.line, "unbalanced ')'");
        --depth;
      }
      if (t.kind == Token::Kind::kPunct && (t.text == "{" || t.text == "}")) {
        throw SourceParseError(start_line, "unterminated statement");
      }
      ++pos_;
    }
    return {b, pos_};
  }

  StatementId emit(StatementKind kind, int start, int end, std::set<std::string> lv, std::set<std::string> rv,
                   std::set<std::string> calls) {
    StatementNode s;
    s.id = static_cast<StatementId>(frag_.statements.size());
    s.kind = kind;
    s.span = {start, end};
    s.lvalues = std::move(lv);
    s.rvalues = std::move(rv);
    s.callees = std::move(calls);
    s.parent_function = current_fn_;
    s.control_parents = control_stack_;
    s.position = s.id;
    if (current_fn_) frag_.functions[static_cast<size_t>(*current_fn_)].statement_ids.push_back(s.id);
    frag_.statements.push_back(std::move(s));
    return frag_.statements.back().id;
  }

  struct Simple {
    StatementKind kind = StatementKind::kOther;
    std::set<std::string> lv, rv, calls;
  };

  // An assignment, increment, call or bare expression.
  Simple analyze_simple(Range r) const {
    Simple out;
    if (r.first == r.second) return out;
    if (r.second - r.first == 2) {
      const Token& a = toks_[r.first];
      const Token& b = toks_[r.first + 1];
      const Token* target = nullptr;
      if ((b.text == "++" || b.text == "--") && a.kind == Token::Kind::kIdent) target = &a;
      if ((a.text == "++" || a.text == "--") && b.kind == Token::Kind::kIdent) target = &b;
      if (target && !is_keyword(target->text)) {
        out.kind = StatementKind::kAssignment;
        out.lv.insert(target->text);
        out.rv.insert(target->text);
        return out;
      }
    }
    std::optional<size_t> op;
    int depth = 0;
    for (size_t k = r.first; k < r.second; ++k) {
      const auto& t = toks_[k].text;
      if (t == "(" || t == "[") ++depth;
      if (t == ")" || t == "]") --depth;
      if (depth == 0 && toks_[k].kind == Token::Kind::kPunct && is_assign_op(t)) {
        op = k;
        break;
      }
    }
    if (op) {
      std::optional<size_t> base;
      for (size_t k = r.first; k < *op; ++k) {
        if (toks_[k].kind == Token::Kind::kIdent && !is_keyword(toks_[k].text)) {
          base = k;
          break;
        }
      }
      out.kind = StatementKind::kAssignment;
      if (base) {
        out.lv.insert(toks_[*base].text);
        if (toks_[*op].text != "=") out.rv.insert(toks_[*base].text);
      }
      collect({r.first, *op}, out.rv, out.calls, base);
      collect({*op + 1, r.second}, out.rv, out.calls);
      return out;
    }
    collect(r, out.rv, out.calls);
    out.kind = out.calls.empty() ? StatementKind::kOther : StatementKind::kCall;
    return out;
  }

  void parse_function() {
    const Token& kw = toks_[pos_++];
    if (current_fn_) throw SourceParseError(kw.line, "nested functions are not supported");
    std::string name = expect_ident("after 'fn'");
    expect_punct("(", "after function name");
    std::vector<std::string> params;
    if (!is_punct(")")) {
      params.push_back(expect_ident("in parameter list"));
      while (is_punct(",")) {
        ++pos_;
        params.push_back(expect_ident("in parameter list"));
      }
    }
    expect_punct(")", "to close parameter list");

    FunctionNode fn;
    fn.id = static_cast<FunctionId>(frag_.functions.size());
    fn.name = name;
    fn.span.start = kw.line;
    fn.signature = "fn " + name + "(";
    for (size_t i = 0; i < params.size(); ++i) fn.signature += (i ? ", " : "") + params[i];
    fn.signature += ")";
    frag_.functions.push_back(fn);

    current_fn_ = fn.id;
    int close_line = parse_block();
    frag_.functions[static_cast<size_t>(fn.id)].span.end = close_line;
    current_fn_.reset();
  }

  // Returns the line of the closing brace.
  int parse_block() {
    int open_line = expect_punct("{", "to open block").line;
    while (!is_punct("}")) {
      if (at_end()) {
        throw SourceParseError(open_line, "unbalanced braces: block opened here is never closed");
      }
      parse_statement();
    }
    return toks_[pos_++].line;
  }

  void parse_if() {
    int start = toks_[pos_++].line;
    expect_punct("(", "after 'if'");
    Range cond = scan_until(")", start);
    ++pos_;
    if (!is_punct("{")) throw SourceParseError(peek().line, "expected '{' after if condition");
    std::set<std::string> rv, calls;
    collect(cond, rv, calls);
    StatementId id = emit(StatementKind::kControl, start, peek().line, {}, std::move(rv), std::move(calls));
    control_stack_.push_back(id);
    parse_block();
    if (is_kw("else")) {
      ++pos_;
      if (is_kw("if")) parse_if();
      else parse_block();
    }
    control_stack_.pop_back();
  }

  void parse_statement() {
    const Token& first = peek();
    int start = first.line;

    if (is_kw("var")) {
      ++pos_;
      std::string name = expect_ident("after 'var'");
      std::set<std::string> rv, calls;
      if (is_punct("=")) {
        ++pos_;
        Range init = scan_until(";", start);
        collect(init, rv, calls);
      }
      int end = expect_punct(";", "after declaration").line;
      emit(StatementKind::kDeclaration, start, end, {name}, std::move(rv), std::move(calls));
      return;
    }
    if (is_kw("if")) {
      parse_if();
      return;
    }
    if (is_kw("while")) {
      ++pos_;
      expect_punct("(", "after 'while'");
      Range cond = scan_until(")", start);
      ++pos_;
      if (!is_punct("{")) throw SourceParseError(peek().line, "expected '{' after while condition");
      std::set<std::string> rv, calls;
      collect(cond, rv, calls);
      StatementId id = emit(StatementKind::kControl, start, peek().line, {}, std::move(rv), std::move(calls));
      control_stack_.push_back(id);
      parse_block();
      control_stack_.pop_back();
      return;
    }
    if (is_kw("for")) {
      ++pos_;
      expect_punct("(", "after 'for'");
      std::set<std::string> lv, rv, calls;
      if (is_kw("var")) {
        ++pos_;
        lv.insert(expect_ident("after 'var'"));
        if (is_punct("=")) {
          ++pos_;
          collect(scan_until(";", start), rv, calls);
        }
      } else {
        Simple init = analyze_simple(scan_until(";", start));
        lv.insert(init.lv.begin(), init.lv.end());
        rv.insert(init.rv.begin(), init.rv.end());
        calls.insert(init.calls.begin(), init.calls.end());
      }
      expect_punct(";", "in for header");
      collect(scan_until(";", start), rv, calls);
      expect_punct(";", "in for header");
      Simple step = analyze_simple(scan_until(")", start));
      lv.insert(step.lv.begin(), step.lv.end());
      rv.insert(step.rv.begin(), step.rv.end());
      calls.insert(step.calls.begin(), step.calls.end());
      ++pos_;
      if (!is_punct("{")) throw SourceParseError(peek().line, "expected '{' after for header");
      StatementId id = emit(StatementKind::kControl, start, peek().line, std::move(lv), std::move(rv),
                            std::move(calls));
      control_stack_.push_back(id);
      parse_block();
      control_stack_.pop_back();
      return;
    }
    if (is_kw("return")) {
      ++pos_;
      std::set<std::string> rv, calls;
      collect(scan_until(";", start), rv, calls);
      int end = expect_punct(";", "after return").line;
      emit(StatementKind::kReturn, start, end, {}, std::move(rv), std::move(calls));
      return;
    }
    if (is_kw("fn")) throw SourceParseError(start, "nested functions are not supported");
    if (is_kw("else")) throw SourceParseError(start, "'else' without 'if'");
    if (is_punct("{")) throw SourceParseError(start, "bare blocks are not supported");

    Simple s = analyze_simple(scan_until(";", start));
    int end = expect_punct(";", "after statement").line;
    emit(s.kind, start, end, std::move(s.lv), std::move(s.rv), std::move(s.calls));
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  AstFragment frag_;
  std::vector<StatementId> control_stack_;
  std::optional<FunctionId> current_fn_;
};

}  // namespace

AstFragment parse_mini_source(std::string_view text) { return MiniParser(text).run(); }

}  // namespace slicereview::ast
