#include "llm/comment.hpp"

#include "common/error.hpp"

namespace slicereview::llm {

namespace {

std::string required_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw CommentParseError(std::string("field '") + key + "' missing or not a string");
  return it->get<std::string>();
}

int required_int(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer()) {
    throw CommentParseError(std::string("field '") + key + "' missing or not an integer");
  }
  return it->get<int>();
}

std::string optional_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  return it != j.end() && it->is_string() ? it->get<std::string>() : std::string();
}

}  // namespace

std::optional<std::string> check_comment(const ReviewComment& c) {
  for (int q : {c.q1, c.q2, c.q3}) {
    if (q < 1 || q > 7) return "score outside 1..7";
  }
  if (c.start_line > c.end_line) return "start_line after end_line";
  if (c.file.empty()) return "empty file";
  if (c.issue.empty() || c.root_cause.empty() || c.suggestion.empty()) return "empty issue, root_cause or suggestion";
  if (c.support_count < 1) return "support_count below 1";
  return std::nullopt;
}

nlohmann::json comment_to_json(const ReviewComment& c) {
  nlohmann::json j = {{"id", c.id},
                      {"file", c.file},
                      {"start_line", c.start_line},
                      {"end_line", c.end_line},
                      {"title", c.title},
                      {"issue", c.issue},
                      {"root_cause", c.root_cause},
                      {"suggestion", c.suggestion},
                      {"category", c.category},
                      {"q1", c.q1},
                      {"q2", c.q2},
                      {"q3", c.q3},
                      {"source_reviewer", c.source_reviewer},
                      {"support_count", c.support_count}};
  j["example_code"] = c.example_code ? nlohmann::json(*c.example_code) : nlohmann::json(nullptr);
  return j;
}

ReviewComment comment_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw CommentParseError("comment record is not an object");
  ReviewComment c;
  c.id = optional_string(j, "id");
  c.file = required_string(j, "file");
  c.start_line = required_int(j, "start_line");
  c.end_line = required_int(j, "end_line");
  c.title = optional_string(j, "title");
  c.issue = required_string(j, "issue");
  c.root_cause = required_string(j, "root_cause");
  c.suggestion = required_string(j, "suggestion");
  if (auto it = j.find("example_code"); it != j.end() && it->is_string()) c.example_code = it->get<std::string>();
  c.category = optional_string(j, "category");
  c.q1 = required_int(j, "q1");
  c.q2 = required_int(j, "q2");
  c.q3 = required_int(j, "q3");
  c.source_reviewer = optional_string(j, "source_reviewer");
  if (auto it = j.find("support_count"); it != j.end() && it->is_number_integer()) c.support_count = it->get<int>();
  if (auto bad = check_comment(c)) throw CommentParseError(*bad);
  return c;
}

nlohmann::json comments_to_json(const std::vector<ReviewComment>& comments) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : comments) out.push_back(comment_to_json(c));
  return out;
}

std::string extract_json_array_text(std::string_view text) {
  size_t fence = text.find("```");
  if (fence != std::string_view::npos) {
    size_t body = text.find('\n', fence);
    size_t close = body == std::string_view::npos ? body : text.find("```", body);
    if (close != std::string_view::npos) return std::string(text.substr(body + 1, close - body - 1));
  }
  size_t open = text.find('[');
  size_t end = text.rfind(']');
  if (open == std::string_view::npos || end == std::string_view::npos || end < open) return {};
  return std::string(text.substr(open, end - open + 1));
}

ParsedComments parse_comment_json(std::string_view text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(extract_json_array_text(text));
  } catch (const nlohmann::json::exception& e) {
    throw CommentParseError(std::string("no parseable JSON array: ") + e.what());
  }
  if (!arr.is_array()) throw CommentParseError("expected a JSON array of comments");
  ParsedComments out;
  for (size_t i = 0; i < arr.size(); ++i) {
    try {
      out.comments.push_back(comment_from_json(arr[i]));
    } catch (const CommentParseError& e) {
      out.rejected.push_back("record " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace slicereview::llm
