#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "harness/config.hpp"
#include "llm/comment.hpp"

namespace slicereview::harness {

struct DeliveryRecord {
  std::string comment_id;
  std::string file;
  int start_line = 0;
  int end_line = 0;
  std::string body;
  std::string status;  // "written", "posted" or "failed"
  int http_status = 0;
  std::string error;
};

struct DeliveryResult {
  std::string mr_id;
  std::string sink;
  std::vector<DeliveryRecord> records;

  bool ok() const;
};

/// Text posted to the review platform: title line, then issue, root cause,
/// suggestion and optional example, separated by blank lines.
std::string comment_body(const llm::ReviewComment& c);

nlohmann::json delivery_to_json(const DeliveryResult& d);

class ReviewSink {
 public:
  virtual ~ReviewSink() = default;
  virtual std::string id() const = 0;
  /// Never throws for a per-comment failure; those land in the record.
  virtual DeliveryResult post_comments(const std::string& mr_id, const std::vector<llm::ReviewComment>& comments) = 0;
};

/// Writes root/mr_id/delivery.json.
class FileSink final : public ReviewSink {
 public:
  explicit FileSink(std::filesystem::path root) : root_(std::move(root)) {}
  std::string id() const override { return "file"; }
  DeliveryResult post_comments(const std::string& mr_id, const std::vector<llm::ReviewComment>& comments) override;

 private:
  std::filesystem::path root_;
};

/// One POST per comment with {mr_id, file, start_line, end_line, body}. A
/// failed comment is not retried and does not stop the others.
class HttpPlatformSink final : public ReviewSink {
 public:
  HttpPlatformSink(std::string endpoint, std::string token_env, int timeout_seconds = 30);
  std::string id() const override { return "http_platform"; }
  DeliveryResult post_comments(const std::string& mr_id, const std::vector<llm::ReviewComment>& comments) override;

 private:
  std::string scheme_host_port_;
  std::string path_;
  std::string token_env_;
  int timeout_seconds_;
};

std::unique_ptr<ReviewSink> make_sink(const SinkSettings& settings, const std::filesystem::path& output_root);

}  // namespace slicereview::harness
