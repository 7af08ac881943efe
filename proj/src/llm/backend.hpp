#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace slicereview::llm {

struct ChatMessage {
  std::string role;  // system, user or assistant
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct ChatExchange {
  std::vector<ChatMessage> messages;
  std::string model_id;
  double temperature = 0.0;
  int max_output_tokens = 2048;

  // Routing metadata for the mock script and transcripts; never sent over
  // the wire and not part of the prompt hash.
  std::string role;
  std::string stage;
  int participant = 0;
  int attempt = 0;
};

struct ChatResult {
  std::string text;
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

/// SHA-256 over the canonical JSON of the messages only.
std::string exchange_hash(const ChatExchange& exchange);

nlohmann::json exchange_to_json(const ChatExchange& exchange);

/// Implementations must allow concurrent chat() calls.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string id() const = 0;
  /// Throws BackendError.
  virtual ChatResult chat(const ChatExchange& exchange) = 0;
};

/// Scripted responses for tests and offline runs. Lookup order:
///   1. "responses": exchange hash -> text
///   2. "rules": first rule whose role/stage/participant/attempt/contains
///      filters all match; "response" is a string or a list indexed by the
///      attempt number (the last entry repeats)
///   3. "default" text
/// and BackendError(404) when nothing matches.
class MockBackend final : public ChatBackend {
 public:
  explicit MockBackend(nlohmann::json script);
  static std::shared_ptr<MockBackend> from_file(const std::filesystem::path& path);

  std::string id() const override { return "mock"; }
  ChatResult chat(const ChatExchange& exchange) override;

  /// Hashes of exchanges that reached no scripted answer, in call order.
  std::vector<std::string> misses() const;

 private:
  nlohmann::json script_;
  mutable std::mutex mutex_;
  std::vector<std::string> misses_;
};

struct HttpBackendConfig {
  std::string endpoint;        // e.g. http://host:port/v1/chat/completions
  std::string api_key_env;     // name of the env var holding a bearer token
  int timeout_seconds = 120;
  int max_retries = 3;
  int backoff_initial_ms = 500;
  int backoff_max_ms = 8000;
};

/// OpenAI-compatible chat completion client. Connection failures and 429/5xx
/// are retried with exponential backoff; other non-200 answers fail at once.
class HttpBackend final : public ChatBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  std::string id() const override { return "http"; }
  ChatResult chat(const ChatExchange& exchange) override;

 private:
  HttpBackendConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

}  // namespace slicereview::llm
