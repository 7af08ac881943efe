#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "common/error.hpp"
#include "llm/backend.hpp"

namespace slicereview::llm {

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  const std::string& url = config_.endpoint;
  size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint must start with http:// or https://: " + url);
  std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported endpoint scheme: " + scheme);
  size_t path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/v1/chat/completions" : url.substr(path_start);
  if (config_.max_retries < 0) throw ConfigError("max_retries must be >= 0");
}

ChatResult HttpBackend::chat(const ChatExchange& exchange) {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : exchange.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  const std::string body = nlohmann::json{{"model", exchange.model_id},
                                          {"messages", msgs},
                                          {"temperature", exchange.temperature},
                                          {"max_tokens", exchange.max_output_tokens}}
                               .dump();

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  int last_status = 0;
  std::string last_error;
  int delay_ms = config_.backoff_initial_ms;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
      delay_ms = std::min(delay_ms * 2, config_.backoff_max_ms);
    }
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_write_timeout(config_.timeout_seconds, 0);
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_status = 0;
      last_error = httplib::to_string(res.error());
      continue;
    }
    last_status = res->status;
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw BackendError(res->status, "chat endpoint answered HTTP " + std::to_string(res->status) + ": " +
                                          res->body.substr(0, 200));
    }
    try {
      auto j = nlohmann::json::parse(res->body);
      ChatResult out;
      out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
      if (auto u = j.find("usage"); u != j.end() && u->is_object()) {
        out.prompt_tokens = u->value("prompt_tokens", 0);
        out.completion_tokens = u->value("completion_tokens", 0);
      }
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(200, std::string("malformed chat completion body: ") + e.what());
    }
  }
  throw BackendError(last_status, "chat endpoint " + config_.endpoint + " failed after " +
                                      std::to_string(config_.max_retries + 1) + " attempts: " + last_error);
}

}  // namespace slicereview::llm
