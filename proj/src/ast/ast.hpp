#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace slicereview::ingest {
struct RepoSnapshot;
}

namespace slicereview::ast {

using StatementId = int;
using FunctionId = int;

enum class StatementKind { kDeclaration, kAssignment, kCall, kControl, kReturn, kOther };

const char* statement_kind_name(StatementKind kind);

/// Which side of the diff a statement was parsed from. Deleted lines only
/// exist in the pre-image.
enum class Image { kPost, kPre };

const char* image_name(Image image);

struct LineSpan {
  int start = 0;
  int end = 0;

  bool contains(int line) const { return line >= start && line <= end; }
  bool operator==(const LineSpan&) const = default;
};

struct StatementNode {
  StatementId id = -1;
  std::string file;
  Image image = Image::kPost;
  LineSpan span;
  StatementKind kind = StatementKind::kOther;
  std::set<std::string> lvalues;
  std::set<std::string> rvalues;
  std::set<std::string> callees;
  std::optional<FunctionId> parent_function;
  std::vector<StatementId> control_parents;  // outermost first
  int position = 0;                          // index in its file unit
  std::vector<std::string> text;             // source lines of span
};

struct FunctionNode {
  FunctionId id = -1;
  std::string name;
  std::string file;
  Image image = Image::kPost;
  LineSpan span;
  std::vector<StatementId> statement_ids;
  std::string signature;
};

/// Parser output for one file. Statement and function ids are local indices
/// into the two vectors; AstIndex rebases them when the fragment is added.
struct AstFragment {
  std::vector<StatementNode> statements;
  std::vector<FunctionNode> functions;
};

/// Statements and functions of one (file, image) pair in source order, with
/// def-use tables keyed by variable name.
struct FileUnit {
  std::string file;
  Image image = Image::kPost;
  std::vector<StatementId> statements;
  std::vector<FunctionId> functions;
  std::map<std::string, std::vector<StatementId>> defs;
  std::map<std::string, std::vector<StatementId>> uses;
};

struct FileError {
  std::string file;
  int line = 0;
  std::string message;
};

/// Immutable once built; safe for concurrent readers.
class AstIndex {
 public:
  void add_fragment(const std::string& file, Image image, AstFragment fragment,
                    const std::vector<std::string>& source_lines);
  void add_skipped(std::string file) { skipped_.push_back(std::move(file)); }
  void add_error(FileError error) { errors_.push_back(std::move(error)); }

  const StatementNode& statement(StatementId id) const { return statements_.at(static_cast<size_t>(id)); }
  const FunctionNode& function(FunctionId id) const { return functions_.at(static_cast<size_t>(id)); }
  const std::vector<StatementNode>& statements() const { return statements_; }
  const std::vector<FunctionNode>& functions() const { return functions_; }
  const std::vector<FileUnit>& units() const { return units_; }
  const FileUnit* unit(const std::string& file, Image image) const;
  const FileUnit& unit_of(const StatementNode& s) const;

  /// Signature of a function by name, preferring a definition in
  /// `prefer_file`, then the lexicographically first post-image file.
  std::optional<std::string> signature_of(const std::string& name, const std::string& prefer_file) const;

  const std::vector<std::string>& skipped() const { return skipped_; }
  const std::vector<FileError>& errors() const { return errors_; }
  bool empty() const { return statements_.empty(); }

 private:
  std::vector<StatementNode> statements_;
  std::vector<FunctionNode> functions_;
  std::vector<FileUnit> units_;
  std::vector<std::string> skipped_;
  std::vector<FileError> errors_;
};

/// Parses every snapshot file the named frontend accepts. Files the frontend
/// does not accept go to skipped(); parse failures go to errors() and the
/// file is left out. `pre_images` adds pre-image units for files touched by
/// deletions. Throws ConfigError for an unknown frontend id.
AstIndex build_ast_index(const ingest::RepoSnapshot& snapshot, const std::string& frontend_id,
                         const std::map<std::string, std::string>& pre_images = {});

/// Earlier statements of the same function (or file scope) that write `var`,
/// plus a file-scope declaration of `var` when the function declares none
/// before `at`. Source order. Unknown variables yield an empty list.
std::vector<const StatementNode*> defining_statements(const AstIndex& index, const std::string& var,
                                                      StatementId at);

struct ForwardTrace {
  std::vector<const StatementNode*> statements;
  std::vector<std::string> callee_signatures;  // sorted, unique
};

/// Later statements of the same function that read or write `var`, with the
/// signatures of functions those statements call.
ForwardTrace forward_affected(const AstIndex& index, const std::string& var, StatementId from);

nlohmann::json statement_to_json(const StatementNode& s);
nlohmann::json dump_ast_json(const AstIndex& index);

}  // namespace slicereview::ast
