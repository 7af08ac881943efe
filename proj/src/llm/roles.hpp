#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "llm/backend.hpp"
#include "llm/comment.hpp"
#include "render/render.hpp"

namespace slicereview::llm {

struct RoleConfig {
  std::string model = "mock";
  double temperature = 0.0;
  int max_output_tokens = 2048;
};

struct ExchangeRecord {
  ChatExchange request;
  std::string response;
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

struct RoleTranscript {
  std::string role;
  int participant = 0;
  std::vector<ExchangeRecord> exchanges;
  nlohmann::json parsed = nlohmann::json::array();
  int prompt_tokens = 0;
  int completion_tokens = 0;
  int retry_count = 0;
  std::vector<std::string> errors;
};

nlohmann::json transcript_to_json(const RoleTranscript& t);

/// What every role sees of the slice under review.
struct ReviewInput {
  int slice_id = 0;
  std::string file;
  render::RenderedSlice rendered;
  render::RenderMode mode = render::RenderMode::kInline;
  std::vector<std::string> callee_signatures;
  std::string guidance;
};

struct RoleOutput {
  std::vector<ReviewComment> comments;
  RoleTranscript transcript;
};

/// Up to this many re-asks follow an unparseable JSON answer.
inline constexpr int kJsonRetries = 2;

/// System prompt plus the five staged questions; the last answer is parsed
/// as the comment list. A final answer that stays unparseable yields no
/// comments and an error in the transcript. Throws BackendError.
RoleOutput run_reviewer(ChatBackend& backend, const RoleConfig& cfg, const ReviewInput& input, int reviewer_index);

enum class MergeStrategy { kModel, kDeterministic };

/// One reviewer set passes through unchanged. kDeterministic merges without
/// calling the backend (see merge_comment_sets).
RoleOutput run_meta_reviewer(ChatBackend& backend, const RoleConfig& cfg,
                             const std::vector<std::vector<ReviewComment>>& comment_sets, const ReviewInput& input,
                             MergeStrategy strategy);

/// Groups comments sharing file and category whose line ranges overlap
/// (transitively). A group keeps its earliest comment's text, spans the
/// union of the ranges, takes the rounded mean of each score, and counts its
/// distinct reviewers as support. Groups are ordered by mean q3, highest
/// first, ties by first appearance.
std::vector<ReviewComment> merge_comment_sets(const std::vector<std::vector<ReviewComment>>& comment_sets);

/// Replaces scores and text with the validator's answer, matched by id (or
/// by file and lines). Identity fields never change. Comments the validator
/// leaves out are dropped. Output is stably sorted by q3, highest first.
RoleOutput run_validator(ChatBackend& backend, const RoleConfig& cfg, const std::vector<ReviewComment>& comments,
                         const ReviewInput& input);

/// Identity when target is empty or equals source. Only title, issue,
/// root_cause and suggestion may change.
RoleOutput run_translator(ChatBackend& backend, const RoleConfig& cfg, const std::vector<ReviewComment>& comments,
                          const std::string& source_language, const std::string& target_language);

struct JudgeQuestion {
  std::vector<std::string> files;
  std::string lines;
  std::string description;
  std::string root_cause;
};

/// Asks whether `comment` identifies the key bug. Throws BackendError.
bool run_judge(ChatBackend& backend, const RoleConfig& cfg, const JudgeQuestion& question,
               const ReviewComment& comment, RoleTranscript& transcript);

}  // namespace slicereview::llm
