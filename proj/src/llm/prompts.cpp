#include "llm/prompts.hpp"

#include "common/error.hpp"
#include "common/hash.hpp"

namespace slicereview::llm {

const std::string& prompt_text(const std::string& name) {
  const auto& table = detail::embedded_prompts();
  auto it = table.find(name);
  if (it == table.end()) throw ConfigError("no prompt named '" + name + "'");
  return it->second;
}

std::string fill_prompt(const std::string& name, const std::map<std::string, std::string>& vars) {
  const std::string& tpl = prompt_text(name);
  std::string out;
  size_t pos = 0;
  while (true) {
    size_t open = tpl.find("{{", pos);
    if (open == std::string::npos) break;
    size_t close = tpl.find("}}", open + 2);
    if (close == std::string::npos) break;
    std::string key = tpl.substr(open + 2, close - open - 2);
    auto it = vars.find(key);
    if (it == vars.end()) throw ConfigError("prompt '" + name + "' needs '" + key + "'");
    out.append(tpl, pos, open - pos);
    out += it->second;
    pos = close + 2;
  }
  out.append(tpl, pos);
  return out;
}

std::map<std::string, std::string> prompt_hashes() {
  std::map<std::string, std::string> out;
  for (const auto& [name, text] : detail::embedded_prompts()) out[name] = sha256_hex(text);
  return out;
}

}  // namespace slicereview::llm
