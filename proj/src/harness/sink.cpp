#include "harness/sink.hpp"

#include <algorithm>
#include <cstdlib>

#include <httplib.h>

#include "common/error.hpp"
#include "common/text.hpp"

namespace slicereview::harness {

namespace fs = std::filesystem;
using llm::ReviewComment;

bool DeliveryResult::ok() const {
  return std::none_of(records.begin(), records.end(), [](const auto& r) { return r.status == "failed"; });
}

std::string comment_body(const ReviewComment& c) {
  std::string out = c.title;
  auto para = [&](const std::string& label, const std::string& text) {
    if (!text.empty()) out += "\n\n" + label + text;
  };
  para("Issue: ", c.issue);
  para("Root cause: ", c.root_cause);
  para("Suggestion: ", c.suggestion);
  if (c.example_code && !c.example_code->empty()) out += "\n\n```\n" + *c.example_code + "\n```";
  return out;
}

nlohmann::json delivery_to_json(const DeliveryResult& d) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : d.records) {
    nlohmann::json j = {{"comment_id", r.comment_id}, {"file", r.file},     {"start_line", r.start_line},
                        {"end_line", r.end_line},     {"body", r.body},     {"status", r.status}};
    if (r.http_status != 0) j["http_status"] = r.http_status;
    if (!r.error.empty()) j["error"] = r.error;
    recs.push_back(std::move(j));
  }
  return {{"mr_id", d.mr_id}, {"sink", d.sink}, {"records", recs}};
}

namespace {

DeliveryRecord anchored(const ReviewComment& c) {
  DeliveryRecord r;
  r.comment_id = c.id;
  r.file = c.file;
  r.start_line = c.start_line;
  r.end_line = c.end_line;
  r.body = comment_body(c);
  return r;
}

}  // namespace

DeliveryResult FileSink::post_comments(const std::string& mr_id, const std::vector<ReviewComment>& comments) {
  DeliveryResult out{mr_id, id(), {}};
  for (const auto& c : comments) {
    auto r = anchored(c);
    r.status = "written";
    out.records.push_back(std::move(r));
  }
  write_file(root_ / mr_id / "delivery.json", delivery_to_json(out).dump(2) + "\n");
  return out;
}

HttpPlatformSink::HttpPlatformSink(std::string endpoint, std::string token_env, int timeout_seconds)
    : token_env_(std::move(token_env)), timeout_seconds_(timeout_seconds) {
  size_t scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("sink endpoint must start with http:// or https://: " + endpoint);
  size_t path_start = endpoint.find('/', scheme_end + 3);
  scheme_host_port_ = endpoint.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : endpoint.substr(path_start);
}

DeliveryResult HttpPlatformSink::post_comments(const std::string& mr_id, const std::vector<ReviewComment>& comments) {
  DeliveryResult out{mr_id, id(), {}};
  if (comments.empty()) return out;

  httplib::Headers headers;
  if (!token_env_.empty()) {
    if (const char* tok = std::getenv(token_env_.c_str()); tok && *tok) {
      headers.emplace("Authorization", std::string("Bearer ") + tok);
    }
  }
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(timeout_seconds_, 0);
  client.set_read_timeout(timeout_seconds_, 0);

  for (const auto& c : comments) {
    auto r = anchored(c);
    const std::string body = nlohmann::json{{"mr_id", mr_id},
                                            {"file", r.file},
                                            {"start_line", r.start_line},
                                            {"end_line", r.end_line},
                                            {"body", r.body}}
                                 .dump();
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      r.status = "failed";
      r.error = httplib::to_string(res.error());
    } else {
      r.http_status = res->status;
      if (res->status >= 200 && res->status < 300) {
        r.status = "posted";
      } else {
        r.status = "failed";
        r.error = res->body.substr(0, 200);
      }
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

std::unique_ptr<ReviewSink> make_sink(const SinkSettings& s, const fs::path& output_root) {
  if (s.kind == "file") return std::make_unique<FileSink>(output_root);
  if (s.kind == "http_platform") return std::make_unique<HttpPlatformSink>(s.endpoint, s.token_env);
  throw ConfigError("unknown sink '" + s.kind + "'");
}

}  // namespace slicereview::harness
