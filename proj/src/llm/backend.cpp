#include "llm/backend.hpp"

#include <algorithm>

#include "common/error.hpp"
#include "common/hash.hpp"
#include "common/text.hpp"

namespace slicereview::llm {

namespace {

int rough_tokens(const std::string& s) {
  // Whitespace-separated words; good enough for relative cost reporting.
  int n = 0;
  bool in_word = false;
  for (char c : s) {
    bool ws = c == ' ' || c == '\n' || c == '\t' || c == '\r';
    if (!ws && !in_word) ++n;
    in_word = !ws;
  }
  return n;
}

bool rule_matches(const nlohmann::json& rule, const ChatExchange& ex) {
  if (rule.contains("role") && rule["role"] != ex.role) return false;
  if (rule.contains("stage") && rule["stage"] != ex.stage) return false;
  if (rule.contains("participant") && rule["participant"] != ex.participant) return false;
  if (rule.contains("attempt") && rule["attempt"] != ex.attempt) return false;
  if (rule.contains("contains")) {
    auto needles = rule["contains"].is_array() ? rule["contains"] : nlohmann::json::array({rule["contains"]});
    for (const auto& n : needles) {
      const auto needle = n.get<std::string>();
      bool found = false;
      for (const auto& m : ex.messages) {
        if (m.content.find(needle) != std::string::npos) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
  }
  return true;
}

std::string pick_response(const nlohmann::json& r, int attempt) {
  if (r.is_string()) return r.get<std::string>();
  if (r.is_array() && !r.empty()) {
    size_t i = std::min(static_cast<size_t>(std::max(attempt, 0)), r.size() - 1);
    return r[i].is_string() ? r[i].get<std::string>() : r[i].dump();
  }
  // Inline JSON values are returned serialized, which keeps scripts readable.
  return r.dump();
}

}  // namespace

nlohmann::json exchange_to_json(const ChatExchange& exchange) {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : exchange.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return {{"role", exchange.role},
          {"stage", exchange.stage},
          {"participant", exchange.participant},
          {"attempt", exchange.attempt},
          {"model", exchange.model_id},
          {"temperature", exchange.temperature},
          {"max_tokens", exchange.max_output_tokens},
          {"hash", exchange_hash(exchange)},
          {"messages", msgs}};
}

std::string exchange_hash(const ChatExchange& exchange) {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : exchange.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return sha256_hex(msgs.dump());
}

MockBackend::MockBackend(nlohmann::json script) : script_(std::move(script)) {
  if (!script_.is_object()) throw ConfigError("mock script must be a JSON object");
  if (script_.contains("rules") && !script_["rules"].is_array()) throw ConfigError("mock 'rules' must be a list");
  if (script_.contains("responses") && !script_["responses"].is_object()) {
    throw ConfigError("mock 'responses' must map hashes to text");
  }
}

std::shared_ptr<MockBackend> MockBackend::from_file(const std::filesystem::path& path) {
  try {
    return std::make_shared<MockBackend>(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("mock script " + path.string() + ": " + e.what());
  }
}

ChatResult MockBackend::chat(const ChatExchange& exchange) {
  const std::string hash = exchange_hash(exchange);
  std::optional<std::string> text;
  if (auto it = script_.find("responses"); it != script_.end()) {
    if (auto r = it->find(hash); r != it->end()) text = pick_response(*r, exchange.attempt);
  }
  if (!text) {
    if (auto it = script_.find("rules"); it != script_.end()) {
      for (const auto& rule : *it) {
        if (rule_matches(rule, exchange) && rule.contains("response")) {
          text = pick_response(rule["response"], exchange.attempt);
          break;
        }
      }
    }
  }
  if (!text && script_.contains("default")) text = pick_response(script_["default"], exchange.attempt);
  if (!text) {
    std::lock_guard lock(mutex_);
    misses_.push_back(hash);
    throw BackendError(404, "mock script has no response for " + exchange.role + "/" + exchange.stage +
                                " (hash " + hash + ")");
  }
  ChatResult out;
  out.text = *text;
  for (const auto& m : exchange.messages) out.prompt_tokens += rough_tokens(m.content);
  out.completion_tokens = rough_tokens(out.text);
  return out;
}

std::vector<std::string> MockBackend::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

}  // namespace slicereview::llm
