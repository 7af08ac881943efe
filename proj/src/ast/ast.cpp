#include "ast/ast.hpp"

#include <algorithm>

#include "ast/frontend.hpp"
#include "common/error.hpp"
#include "common/text.hpp"
#include "ingest/snapshot.hpp"

namespace slicereview::ast {

const char* statement_kind_name(StatementKind kind) {
  switch (kind) {
    case StatementKind::kDeclaration: return "declaration";
    case StatementKind::kAssignment: return "assignment";
    case StatementKind::kCall: return "call";
    case StatementKind::kControl: return "control";
    case StatementKind::kReturn: return "return";
    case StatementKind::kOther: return "other";
  }
  return "other";
}

const char* image_name(Image image) { return image == Image::kPost ? "post" : "pre"; }

void AstIndex::add_fragment(const std::string& file, Image image, AstFragment fragment,
                            const std::vector<std::string>& source_lines) {
  const auto stmt_base = static_cast<StatementId>(statements_.size());
  const auto fn_base = static_cast<FunctionId>(functions_.size());

  FileUnit unit;
  unit.file = file;
  unit.image = image;

  for (auto& fn : fragment.functions) {
    fn.id += fn_base;
    fn.file = file;
    fn.image = image;
    for (auto& sid : fn.statement_ids) sid += stmt_base;
    unit.functions.push_back(fn.id);
    functions_.push_back(std::move(fn));
  }
  for (auto& s : fragment.statements) {
    s.position = s.id;
    s.id += stmt_base;
    s.file = file;
    s.image = image;
    if (s.parent_function) *s.parent_function += fn_base;
    for (auto& c : s.control_parents) c += stmt_base;
    s.text.clear();
    for (int line = s.span.start; line <= s.span.end; ++line) {
      if (line >= 1 && static_cast<size_t>(line) <= source_lines.size()) {
        s.text.push_back(source_lines[static_cast<size_t>(line - 1)]);
      }
    }
    unit.statements.push_back(s.id);
    for (const auto& v : s.lvalues) unit.defs[v].push_back(s.id);
    for (const auto& v : s.rvalues) unit.uses[v].push_back(s.id);
    statements_.push_back(std::move(s));
  }
  units_.push_back(std::move(unit));
}

const FileUnit* AstIndex::unit(const std::string& file, Image image) const {
  for (const auto& u : units_) {
    if (u.file == file && u.image == image) return &u;
  }
  return nullptr;
}

const FileUnit& AstIndex::unit_of(const StatementNode& s) const {
  const FileUnit* u = unit(s.file, s.image);
  if (!u) throw Error(ErrorCode::kInternal, "statement " + std::to_string(s.id) + " has no file unit");
  return *u;
}

std::optional<std::string> AstIndex::signature_of(const std::string& name, const std::string& prefer_file) const {
  const FunctionNode* best = nullptr;
  for (const auto& fn : functions_) {
    if (fn.name != name || fn.image != Image::kPost) continue;
    if (fn.file == prefer_file) return fn.signature;
    if (!best || fn.file < best->file) best = &fn;
  }
  if (best) return best->signature;
  return std::nullopt;
}

AstIndex build_ast_index(const ingest::RepoSnapshot& snapshot, const std::string& frontend_id,
                         const std::map<std::string, std::string>& pre_images) {
  auto frontend = FrontendRegistry::instance().find(frontend_id);
  if (!frontend) throw ConfigError("unknown frontend '" + frontend_id + "'");

  struct Job {
    std::string file;
    Image image;
    const std::string* text;
  };
  std::vector<Job> jobs;
  AstIndex index;
  for (const auto& f : snapshot.files) {
    if (!frontend->accepts(f.path)) {
      index.add_skipped(f.path);
      continue;
    }
    jobs.push_back({f.path, Image::kPost, &f.content});
  }
  for (const auto& [path, text] : pre_images) {
    if (frontend->accepts(path)) jobs.push_back({path, Image::kPre, &text});
  }

  for (const auto& job : jobs) {
    try {
      index.add_fragment(job.file, job.image, frontend->parse(*job.text), split_lines(*job.text));
    } catch (const SourceParseError& e) {
      std::string msg = e.what();
      if (job.image == Image::kPre) msg += " (pre-image)";
      index.add_error({job.file, e.line(), msg});
    }
  }
  return index;
}

namespace {

bool same_scope(const StatementNode& a, const StatementNode& b) { return a.parent_function == b.parent_function; }

void add_signatures(const AstIndex& index, const StatementNode& s, std::set<std::string>& out) {
  for (const auto& callee : s.callees) {
    if (auto sig = index.signature_of(callee, s.file)) out.insert(*sig);
  }
}

}  // namespace

std::vector<const StatementNode*> defining_statements(const AstIndex& index, const std::string& var,
                                                      StatementId at) {
  const StatementNode& q = index.statement(at);
  const FileUnit& unit = index.unit_of(q);
  auto it = unit.defs.find(var);
  if (it == unit.defs.end()) return {};

  std::vector<const StatementNode*> out;
  bool local_decl = false;
  for (StatementId id : it->second) {
    const StatementNode& s = index.statement(id);
    if (s.position < q.position && same_scope(s, q)) {
      out.push_back(&s);
      if (s.kind == StatementKind::kDeclaration) local_decl = true;
    }
  }
  // A global read inside a function still depends on its file-scope
  // declaration; only earlier declarations count so results keep preceding q.
  if (!local_decl && q.parent_function) {
    for (StatementId id : it->second) {
      const StatementNode& s = index.statement(id);
      if (!s.parent_function && s.kind == StatementKind::kDeclaration && s.position < q.position) {
        out.push_back(&s);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto* a, const auto* b) { return a->position < b->position; });
  return out;
}

ForwardTrace forward_affected(const AstIndex& index, const std::string& var, StatementId from) {
  const StatementNode& q = index.statement(from);
  const FileUnit& unit = index.unit_of(q);
  ForwardTrace trace;
  std::set<std::string> sigs;
  for (StatementId id : unit.statements) {
    const StatementNode& s = index.statement(id);
    if (s.position <= q.position || !same_scope(s, q)) continue;
    if (!s.rvalues.contains(var) && !s.lvalues.contains(var)) continue;
    trace.statements.push_back(&s);
    add_signatures(index, s, sigs);
  }
  trace.callee_signatures.assign(sigs.begin(), sigs.end());
  return trace;
}

nlohmann::json statement_to_json(const StatementNode& s) {
  nlohmann::json j;
  j["id"] = s.id;
  j["file"] = s.file;
  j["image"] = image_name(s.image);
  j["line_span"] = {s.span.start, s.span.end};
  j["kind"] = statement_kind_name(s.kind);
  j["lvalues"] = s.lvalues;
  j["rvalues"] = s.rvalues;
  j["callees"] = s.callees;
  j["parent_function"] = s.parent_function ? nlohmann::json(*s.parent_function) : nlohmann::json(nullptr);
  j["control_parents"] = s.control_parents;
  return j;
}

nlohmann::json dump_ast_json(const AstIndex& index) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& u : index.units()) {
    nlohmann::json fns = nlohmann::json::array();
    for (FunctionId id : u.functions) {
      const auto& fn = index.function(id);
      fns.push_back({{"id", fn.id},
                     {"name", fn.name},
                     {"signature", fn.signature},
                     {"line_span", {fn.span.start, fn.span.end}},
                     {"statement_ids", fn.statement_ids}});
    }
    nlohmann::json stmts = nlohmann::json::array();
    for (StatementId id : u.statements) stmts.push_back(statement_to_json(index.statement(id)));
    files.push_back({{"file", u.file},
                     {"image", image_name(u.image)},
                     {"functions", fns},
                     {"statements", stmts},
                     {"defs", u.defs},
                     {"uses", u.uses}});
  }
  nlohmann::json errors = nlohmann::json::array();
  for (const auto& e : index.errors()) errors.push_back({{"file", e.file}, {"line", e.line}, {"message", e.message}});
  return {{"files", files}, {"skipped", index.skipped()}, {"errors", errors}};
}

}  // namespace slicereview::ast
