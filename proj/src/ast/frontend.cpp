#include "ast/frontend.hpp"

#include <algorithm>

namespace slicereview::ast {

FrontendRegistry::FrontendRegistry() { frontends_.push_back(std::make_shared<MiniFrontend>()); }

FrontendRegistry& FrontendRegistry::instance() {
  static FrontendRegistry registry;
  return registry;
}

void FrontendRegistry::add(std::shared_ptr<const FrontendAdapter> frontend) {
  std::lock_guard lock(mutex_);
  auto id = frontend->id();
  std::erase_if(frontends_, [&](const auto& f) { return f->id() == id; });
  frontends_.push_back(std::move(frontend));
}

std::shared_ptr<const FrontendAdapter> FrontendRegistry::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  for (const auto& f : frontends_) {
    if (f->id() == id) return f;
  }
  return nullptr;
}

std::vector<std::string> FrontendRegistry::ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& f : frontends_) out.push_back(f->id());
  std::sort(out.begin(), out.end());
  return out;
}

bool MiniFrontend::accepts(std::string_view path) const {
  constexpr std::string_view ext = ".mini";
  return path.size() > ext.size() && path.substr(path.size() - ext.size()) == ext;
}

}  // namespace slicereview::ast
