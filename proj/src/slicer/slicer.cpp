#include "slicer/slicer.hpp"

#include <algorithm>
#include <deque>

#include "common/error.hpp"
#include "common/text.hpp"

namespace slicereview::slicer {

using ast::Image;
using ast::StatementId;
using ast::StatementNode;
using ingest::LineOp;

const char* slicing_option_name(SlicingOption option) {
  switch (option) {
    case SlicingOption::kOriginalDiff: return "diff";
    case SlicingOption::kParentFunction: return "function";
    case SlicingOption::kLeftFlow: return "leftflow";
    case SlicingOption::kFullFlow: return "fullflow";
  }
  return "diff";
}

SlicingOption parse_slicing_option(const std::string& name) {
  for (auto opt : {SlicingOption::kOriginalDiff, SlicingOption::kParentFunction, SlicingOption::kLeftFlow,
                   SlicingOption::kFullFlow}) {
    if (name == slicing_option_name(opt)) return opt;
  }
  throw ConfigError("unknown slicing option '" + name + "' (expected diff, function, leftflow or fullflow)");
}

void SliceCache::insert(Key key) {
  if (by_id_.contains(key.id)) return;
  by_id_.emplace(key.id, key);
  keys_.insert(std::move(key));
}

bool SliceCache::erase(StatementId id) {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return false;
  keys_.erase(it->second);
  by_id_.erase(it);
  return true;
}

std::vector<StatementId> SliceCache::ids() const {
  std::vector<StatementId> out;
  for (const auto& k : keys_) out.push_back(k.id);
  return out;
}

SliceContext::SliceContext(const ingest::RepoSnapshot& snapshot, const ingest::ChangedLineMap& changes,
                           const ast::AstIndex& index)
    : snapshot_(snapshot), changes_(changes), index_(index) {
  std::map<std::string, std::vector<SliceCache::Key>> per_file;
  for (const auto& unit : index_.units()) {
    for (StatementId id : unit.statements) {
      const auto& s = index_.statement(id);
      if (s.image == Image::kPre && !intersects_diff(s)) continue;
      per_file[s.file].push_back(key(s));
    }
  }
  for (auto& [file, keys] : per_file) {
    std::sort(keys.begin(), keys.end());
    auto& seq = sequence_[file];
    for (const auto& k : keys) {
      order_[k.id] = static_cast<long>(seq.size());
      seq.push_back(k.id);
    }
  }
  for (const auto& f : snapshot_.files) {
    if (index_.unit(f.path, Image::kPost)) lines_[f.path] = split_lines(f.content);
  }
}

long SliceContext::view_pos_of_line(const std::string& file, Image image, int line) const {
  const auto* fc = changes_.find(file);
  if (!fc) return line - 1;
  return image == Image::kPost ? fc->view_position_post(line) : fc->view_position_pre(line);
}

long SliceContext::view_pos(const StatementNode& s) const { return view_pos_of_line(s.file, s.image, s.span.start); }

SliceCache::Key SliceContext::key(const StatementNode& s) const {
  return {s.file, view_pos(s), s.image == Image::kPre ? 0 : 1, s.id};
}

bool SliceContext::intersects_diff(const StatementNode& s) const {
  const auto* fc = changes_.find(s.file);
  if (!fc) return false;
  return s.image == Image::kPost ? fc->intersects_adds(s.span.start, s.span.end)
                                 : fc->intersects_deletes(s.span.start, s.span.end);
}

LineOp SliceContext::op_of(const StatementNode& s) const {
  if (s.image == Image::kPre) return LineOp::kDelete;
  return intersects_diff(s) ? LineOp::kAdd : LineOp::kKeep;
}

long SliceContext::order_of(StatementId id) const {
  auto it = order_.find(id);
  return it == order_.end() ? -1 : it->second;
}

std::optional<StatementId> SliceContext::at_order(const std::string& file, long order) const {
  auto it = sequence_.find(file);
  if (it == sequence_.end() || order < 0 || order >= static_cast<long>(it->second.size())) return std::nullopt;
  return it->second[static_cast<size_t>(order)];
}

std::string SliceContext::scope_of(const StatementNode& s) const {
  return s.parent_function ? index_.function(*s.parent_function).name : std::string();
}

std::optional<StatementId> SliceContext::normalize(StatementId id) const {
  const auto& s = index_.statement(id);
  if (s.image == Image::kPost || intersects_diff(s)) return id;
  const auto* fc = changes_.find(s.file);
  const auto* post_unit = index_.unit(s.file, Image::kPost);
  if (!post_unit) return std::nullopt;
  std::optional<int> line = fc ? fc->pre_to_post(s.span.start) : std::optional<int>(s.span.start);
  if (!line) return std::nullopt;
  for (StatementId pid : post_unit->statements) {
    if (index_.statement(pid).span.contains(*line)) return pid;
  }
  return std::nullopt;
}

const std::vector<std::string>* SliceContext::post_lines(const std::string& file) const {
  auto it = lines_.find(file);
  return it == lines_.end() ? nullptr : &it->second;
}

void process_ast(const SliceContext& ctx, SliceCache& cache) {
  for (const auto& unit : ctx.index().units()) {
    for (StatementId id : unit.statements) {
      const auto& s = ctx.index().statement(id);
      if (ctx.intersects_diff(s)) cache.insert(ctx.key(s));
    }
  }
}

std::vector<StatementId> get_contiguous_diff_segment(const SliceContext& ctx, const SliceCache& cache) {
  if (cache.empty()) throw Error(ErrorCode::kInvalidArgument, "contiguous segment of an empty cache");
  const auto& first = *cache.keys().begin();
  const auto& head = ctx.index().statement(first.id);
  const std::string scope = ctx.scope_of(head);
  std::vector<StatementId> seed{first.id};
  for (long ord = ctx.order_of(first.id) + 1;; ++ord) {
    auto next = ctx.at_order(head.file, ord);
    if (!next || !cache.contains(*next) || ctx.scope_of(ctx.index().statement(*next)) != scope) break;
    seed.push_back(*next);
  }
  return seed;
}

namespace {

void add_defs(const ast::AstIndex& index, const std::string& var, StatementId at, std::set<StatementId>& out) {
  for (const auto* s : ast::defining_statements(index, var, at)) out.insert(s->id);
}

std::set<StatementId> original_diff(const ast::AstIndex& index, const StatementNode& d) {
  std::set<StatementId> out{d.id};
  for (const auto& r : d.rvalues) add_defs(index, r, d.id, out);
  return out;
}

// Backward closure: definitions of everything read, plus enclosing
// conditions, until nothing new turns up.
std::set<StatementId> left_flow(const ast::AstIndex& index, const StatementNode& d) {
  std::set<StatementId> out{d.id};
  for (const auto& l : d.lvalues) add_defs(index, l, d.id, out);
  std::deque<StatementId> work(out.begin(), out.end());
  while (!work.empty()) {
    const auto& s = index.statement(work.front());
    work.pop_front();
    std::set<StatementId> found(s.control_parents.begin(), s.control_parents.end());
    for (const auto& r : s.rvalues) add_defs(index, r, s.id, found);
    for (StatementId f : found) {
      if (out.insert(f).second) work.push_back(f);
    }
  }
  return out;
}

std::set<StatementId> parent_function(const ast::AstIndex& index, const StatementNode& d) {
  std::set<StatementId> out{d.id};
  if (!d.parent_function) {
    for (const auto& r : d.rvalues) {
      for (const auto* s : ast::defining_statements(index, r, d.id)) {
        if (!s->parent_function && s->kind == ast::StatementKind::kDeclaration) out.insert(s->id);
      }
    }
    return out;
  }
  // The same function in the other image brings in its deleted (or added)
  // statements, so a modified function lands in one slice.
  const std::string& name = index.function(*d.parent_function).name;
  for (Image image : {Image::kPost, Image::kPre}) {
    const auto* unit = index.unit(d.file, image);
    if (!unit) continue;
    for (auto fid : unit->functions) {
      const auto& fn = index.function(fid);
      if (fn.name == name) out.insert(fn.statement_ids.begin(), fn.statement_ids.end());
    }
  }
  return out;
}

Expansion expand_one(const SliceContext& ctx, StatementId id, SlicingOption option) {
  const auto& index = ctx.index();
  const auto& d = index.statement(id);
  std::set<StatementId> raw;
  switch (option) {
    case SlicingOption::kOriginalDiff: raw = original_diff(index, d); break;
    case SlicingOption::kParentFunction: raw = parent_function(index, d); break;
    case SlicingOption::kLeftFlow: raw = left_flow(index, d); break;
    case SlicingOption::kFullFlow: {
      raw = left_flow(index, d);
      for (const auto& r : d.rvalues) {
        for (const auto* s : ast::forward_affected(index, r, d.id).statements) raw.insert(s->id);
      }
      break;
    }
  }
  Expansion out;
  for (StatementId r : raw) {
    if (auto n = ctx.normalize(r)) out.statements.insert(*n);
  }
  out.statements.insert(id);
  if (option == SlicingOption::kFullFlow) {
    for (StatementId s : out.statements) {
      const auto& node = index.statement(s);
      for (const auto& callee : node.callees) {
        if (auto sig = index.signature_of(callee, node.file)) out.callee_signatures.insert(*sig);
      }
    }
  }
  return out;
}

void add_row(std::map<long, SliceRow>& rows, SliceRow row) { rows.emplace(row.view_pos, std::move(row)); }

void add_post_lines(const SliceContext& ctx, const std::string& file, int start, int end,
                    std::map<long, SliceRow>& rows) {
  const auto* lines = ctx.post_lines(file);
  const auto* fc = ctx.changes().find(file);
  for (int l = start; l <= end; ++l) {
    std::string content;
    if (lines && l >= 1 && static_cast<size_t>(l) <= lines->size()) content = (*lines)[static_cast<size_t>(l - 1)];
    LineOp op = fc && fc->adds.contains(l) ? LineOp::kAdd : LineOp::kKeep;
    add_row(rows, {op, l, ctx.view_pos_of_line(file, Image::kPost, l), std::move(content)});
  }
}

std::vector<SliceRow> build_rows(const SliceContext& ctx, const CodeSlice& slice) {
  const auto& index = ctx.index();
  const auto* fc = ctx.changes().find(slice.file);
  std::map<long, SliceRow> rows;
  for (const auto& m : slice.members) {
    const auto& s = index.statement(m.id);
    if (s.image == Image::kPost) {
      add_post_lines(ctx, s.file, s.span.start, s.span.end, rows);
      continue;
    }
    for (int p = s.span.start; p <= s.span.end; ++p) {
      size_t k = static_cast<size_t>(p - s.span.start);
      std::string content = k < s.text.size() ? s.text[k] : std::string();
      if (fc && fc->deletes.contains(p)) {
        add_row(rows, {LineOp::kDelete, p, ctx.view_pos_of_line(s.file, Image::kPre, p), std::move(content)});
      } else if (auto post = fc ? fc->pre_to_post(p) : std::optional<int>(p)) {
        add_post_lines(ctx, s.file, *post, *post, rows);
      }
    }
  }
  if (slice.option == SlicingOption::kParentFunction) {
    // Whole function bodies, braces and blank lines included.
    std::set<std::string> names;
    for (const auto& m : slice.members) {
      const auto& s = index.statement(m.id);
      if (s.parent_function) names.insert(index.function(*s.parent_function).name);
    }
    if (const auto* unit = index.unit(slice.file, Image::kPost)) {
      for (auto fid : unit->functions) {
        const auto& fn = index.function(fid);
        if (names.contains(fn.name)) add_post_lines(ctx, fn.file, fn.span.start, fn.span.end, rows);
      }
    }
  }
  std::vector<SliceRow> out;
  for (auto& [pos, row] : rows) out.push_back(std::move(row));
  return out;
}

}  // namespace

Expansion apply_slicing_algorithm(const std::vector<StatementId>& statements, SlicingOption option,
                                  const SliceContext& ctx) {
  Expansion out;
  for (StatementId id : statements) {
    auto e = expand_one(ctx, id, option);
    out.statements.insert(e.statements.begin(), e.statements.end());
    out.callee_signatures.insert(e.callee_signatures.begin(), e.callee_signatures.end());
  }
  return out;
}

CodeSlice generate_new_slice(const std::vector<StatementId>& seed, SliceCache& cache, SlicingOption option,
                             const SliceContext& ctx, int slice_id) {
  CodeSlice slice;
  slice.id = slice_id;
  slice.option = option;
  slice.seed = seed;
  if (!seed.empty()) slice.file = ctx.index().statement(seed.front()).file;

  std::set<StatementId> members(seed.begin(), seed.end());
  std::set<std::string> signatures;
  std::deque<StatementId> work(seed.begin(), seed.end());
  for (StatementId id : seed) cache.erase(id);
  while (!work.empty()) {
    StatementId id = work.front();
    work.pop_front();
    auto e = expand_one(ctx, id, option);
    signatures.insert(e.callee_signatures.begin(), e.callee_signatures.end());
    for (StatementId s : e.statements) {
      members.insert(s);
      if (cache.erase(s)) {
        work.push_back(s);
        slice.absorbed.push_back(s);
      }
    }
  }

  std::vector<SliceCache::Key> keys;
  for (StatementId id : members) keys.push_back(ctx.key(ctx.index().statement(id)));
  std::sort(keys.begin(), keys.end());
  for (const auto& k : keys) slice.members.push_back({k.id, ctx.op_of(ctx.index().statement(k.id))});
  slice.callee_signatures.assign(signatures.begin(), signatures.end());
  slice.rows = build_rows(ctx, slice);
  return slice;
}

std::vector<CodeSlice> code_slicing(const ingest::RepoSnapshot& snapshot, const ingest::ChangedLineMap& changes,
                                    const ast::AstIndex& index, SlicingOption option) {
  SliceContext ctx(snapshot, changes, index);
  SliceCache cache;
  process_ast(ctx, cache);
  std::vector<CodeSlice> slices;
  while (!cache.empty()) {
    auto seed = get_contiguous_diff_segment(ctx, cache);
    slices.push_back(generate_new_slice(seed, cache, option, ctx, static_cast<int>(slices.size()) + 1));
  }
  return slices;
}

std::map<std::string, std::string> pre_images_for(const ingest::RepoSnapshot& snapshot,
                                                  const std::vector<ingest::DiffHunk>& hunks) {
  std::map<std::string, std::string> out;
  auto changes = ingest::changed_lines(hunks);
  for (const auto& [file, fc] : changes.files) {
    if (fc.deletes.empty()) continue;
    const auto* post = snapshot.find(file);
    out[file] = ingest::reconstruct_pre_image(post ? std::string_view(post->content) : std::string_view(),
                                              fc.hunks);
  }
  return out;
}

nlohmann::json slice_to_json(const CodeSlice& slice, const ast::AstIndex& index) {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& m : slice.members) {
    const auto& s = index.statement(m.id);
    members.push_back({{"id", m.id},
                       {"op", ingest::line_op_name(m.op)},
                       {"image", ast::image_name(s.image)},
                       {"line_span", {s.span.start, s.span.end}},
                       {"kind", ast::statement_kind_name(s.kind)}});
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : slice.rows) {
    rows.push_back({{"op", ingest::line_op_name(r.op)}, {"line", r.line}, {"content", r.content}});
  }
  return {{"id", slice.id},
          {"file", slice.file},
          {"option", slicing_option_name(slice.option)},
          {"seed", slice.seed},
          {"absorbed", slice.absorbed},
          {"members", members},
          {"callee_signatures", slice.callee_signatures},
          {"rows", rows}};
}

nlohmann::json slices_to_json(const std::vector<CodeSlice>& slices, const ast::AstIndex& index) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : slices) out.push_back(slice_to_json(s, index));
  return out;
}

}  // namespace slicereview::slicer
