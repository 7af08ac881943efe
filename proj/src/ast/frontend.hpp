#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "ast/ast.hpp"

namespace slicereview::ast {

/// Seam for language frontends. A production C++ frontend plugs in here; the
/// build ships only the mini-language reference frontend.
class FrontendAdapter {
 public:
  virtual ~FrontendAdapter() = default;
  virtual std::string id() const = 0;
  /// Decided by file extension.
  virtual bool accepts(std::string_view path) const = 0;
  /// Throws SourceParseError.
  virtual AstFragment parse(std::string_view text) const = 0;
};

class FrontendRegistry {
 public:
  static FrontendRegistry& instance();

  void add(std::shared_ptr<const FrontendAdapter> frontend);
  std::shared_ptr<const FrontendAdapter> find(const std::string& id) const;
  std::vector<std::string> ids() const;

 private:
  FrontendRegistry();
  mutable std::mutex mutex_;
  std::vector<std::shared_ptr<const FrontendAdapter>> frontends_;
};

/// Reference frontend for the `.mini` language (docs/mini-language.md).
AstFragment parse_mini_source(std::string_view text);

class MiniFrontend final : public FrontendAdapter {
 public:
  std::string id() const override { return "mini"; }
  bool accepts(std::string_view path) const override;
  AstFragment parse(std::string_view text) const override { return parse_mini_source(text); }
};

}  // namespace slicereview::ast
