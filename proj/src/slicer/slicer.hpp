#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ast/ast.hpp"
#include "ingest/diff.hpp"
#include "ingest/snapshot.hpp"

namespace slicereview::slicer {

enum class SlicingOption { kOriginalDiff, kParentFunction, kLeftFlow, kFullFlow };

/// CLI spelling: diff, function, leftflow, fullflow.
const char* slicing_option_name(SlicingOption option);
/// Throws ConfigError on an unknown name.
SlicingOption parse_slicing_option(const std::string& name);

struct SliceMember {
  ast::StatementId id = -1;
  ingest::LineOp op = ingest::LineOp::kKeep;
};

/// One source line of a slice. keep/add rows carry post-image numbers,
/// delete rows pre-image numbers. view_pos orders rows of both images in a
/// single sequence; a jump of more than one marks omitted lines.
struct SliceRow {
  ingest::LineOp op = ingest::LineOp::kKeep;
  int line = 0;
  long view_pos = 0;
  std::string content;

  bool operator==(const SliceRow&) const = default;
};

struct CodeSlice {
  int id = 0;
  std::string file;
  SlicingOption option = SlicingOption::kOriginalDiff;
  std::vector<ast::StatementId> seed;
  std::vector<ast::StatementId> absorbed;  // cached statements pulled in by expansion
  std::vector<SliceMember> members;  // view order
  std::vector<std::string> callee_signatures;
  std::vector<SliceRow> rows;
};

/// Cached diff statements not yet assigned to a slice, ordered by file path,
/// then view position.
class SliceCache {
 public:
  struct Key {
    std::string file;
    long view_pos;
    int image;  // deletions sort ahead of the post-image line they preceded
    ast::StatementId id;
    auto operator<=>(const Key&) const = default;
  };

  void insert(Key key);
  bool erase(ast::StatementId id);
  bool contains(ast::StatementId id) const { return by_id_.contains(id); }
  bool empty() const { return keys_.empty(); }
  size_t size() const { return keys_.size(); }
  const std::set<Key>& keys() const { return keys_; }
  std::vector<ast::StatementId> ids() const;

 private:
  std::set<Key> keys_;
  std::map<ast::StatementId, Key> by_id_;
};

/// Everything slicing needs besides the cache: the index, the diff and the
/// per-file statement order that interleaves deleted pre-image statements
/// with the post image.
class SliceContext {
 public:
  SliceContext(const ingest::RepoSnapshot& snapshot, const ingest::ChangedLineMap& changes,
               const ast::AstIndex& index);

  const ast::AstIndex& index() const { return index_; }
  const ingest::ChangedLineMap& changes() const { return changes_; }
  const ingest::RepoSnapshot& snapshot() const { return snapshot_; }

  long view_pos(const ast::StatementNode& s) const;
  long view_pos_of_line(const std::string& file, ast::Image image, int line) const;
  SliceCache::Key key(const ast::StatementNode& s) const;
  ingest::LineOp op_of(const ast::StatementNode& s) const;
  bool intersects_diff(const ast::StatementNode& s) const;

  /// Index within the interleaved order of the statement's file, or -1 for
  /// pre-image statements that touch no deleted line.
  long order_of(ast::StatementId id) const;
  std::optional<ast::StatementId> at_order(const std::string& file, long order) const;
  /// Name of the enclosing function, empty at file scope.
  std::string scope_of(const ast::StatementNode& s) const;

  /// Maps a pre-image statement onto the post image: deleted statements stay
  /// as they are, surviving ones resolve to the post statement holding their
  /// first line. Post statements map to themselves.
  std::optional<ast::StatementId> normalize(ast::StatementId id) const;

  const std::vector<std::string>* post_lines(const std::string& file) const;

 private:
  const ingest::RepoSnapshot& snapshot_;
  const ingest::ChangedLineMap& changes_;
  const ast::AstIndex& index_;
  std::map<ast::StatementId, long> order_;
  std::map<std::string, std::vector<ast::StatementId>> sequence_;
  std::map<std::string, std::vector<std::string>> lines_;
};

struct Expansion {
  std::set<ast::StatementId> statements;
  std::set<std::string> callee_signatures;
};

/// Statements of every indexed file that intersect the diff: post-image
/// statements touching added lines, pre-image statements touching deleted
/// lines.
void process_ast(const SliceContext& ctx, SliceCache& cache);

/// Maximal run of cached statements adjacent in the interleaved order, within
/// one function (or file scope), starting at the smallest cache key.
/// Precondition: cache nonempty.
std::vector<ast::StatementId> get_contiguous_diff_segment(const SliceContext& ctx, const SliceCache& cache);

Expansion apply_slicing_algorithm(const std::vector<ast::StatementId>& statements, SlicingOption option,
                                  const SliceContext& ctx);

CodeSlice generate_new_slice(const std::vector<ast::StatementId>& seed, SliceCache& cache, SlicingOption option,
                             const SliceContext& ctx, int slice_id);

/// The whole loop: cache every diff statement, then carve slices until the
/// cache is empty. Slice ids count from 1.
std::vector<CodeSlice> code_slicing(const ingest::RepoSnapshot& snapshot, const ingest::ChangedLineMap& changes,
                                    const ast::AstIndex& index, SlicingOption option);

/// Pre-image text of every file with deletions, for build_ast_index.
std::map<std::string, std::string> pre_images_for(const ingest::RepoSnapshot& snapshot,
                                                  const std::vector<ingest::DiffHunk>& hunks);

nlohmann::json slice_to_json(const CodeSlice& slice, const ast::AstIndex& index);
nlohmann::json slices_to_json(const std::vector<CodeSlice>& slices, const ast::AstIndex& index);

}  // namespace slicereview::slicer
