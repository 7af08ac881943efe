#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace slicereview::llm {

/// Q1 = how far from a nitpick, Q2 = how real, Q3 = how severe; 1..7 each.
struct ReviewComment {
  std::string id;
  std::string file;
  int start_line = 0;
  int end_line = 0;
  std::string title;
  std::string issue;
  std::string root_cause;
  std::string suggestion;
  std::optional<std::string> example_code;
  std::string category;
  int q1 = 1;
  int q2 = 1;
  int q3 = 1;
  std::string source_reviewer;
  int support_count = 1;

  bool operator==(const ReviewComment&) const = default;
};

/// Reason the comment breaks a type invariant, or nullopt.
std::optional<std::string> check_comment(const ReviewComment& c);

nlohmann::json comment_to_json(const ReviewComment& c);
/// Throws CommentParseError for a missing or mistyped required field or a
/// broken invariant. Unknown fields are ignored.
ReviewComment comment_from_json(const nlohmann::json& j);

nlohmann::json comments_to_json(const std::vector<ReviewComment>& comments);

struct ParsedComments {
  std::vector<ReviewComment> comments;
  std::vector<std::string> rejected;  // one reason per dropped record
};

/// The JSON array inside a ```json fence (or any fence), else the span from
/// the first '[' to the last ']'.
std::string extract_json_array_text(std::string_view text);

/// Throws CommentParseError when no JSON array can be parsed; bad records
/// are dropped one by one.
ParsedComments parse_comment_json(std::string_view text);

}  // namespace slicereview::llm
