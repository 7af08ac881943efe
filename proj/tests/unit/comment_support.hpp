#pragma once

#include <string>

#include "llm/comment.hpp"

inline slicereview::llm::ReviewComment scored(const std::string& id, int q1, int q2, int q3,
                                              const std::string& reviewer = "reviewer-1", int start = 1,
                                              int end = 1, const std::string& category = "logic",
                                              const std::string& file = "a.mini") {
  slicereview::llm::ReviewComment c;
  c.id = id;
  c.file = file;
  c.start_line = start;
  c.end_line = end;
  c.title = id;
  c.issue = "issue " + id;
  c.root_cause = "cause";
  c.suggestion = "fix";
  c.category = category;
  c.q1 = q1;
  c.q2 = q2;
  c.q3 = q3;
  c.source_reviewer = reviewer;
  return c;
}

inline std::vector<std::string> ids_of(const std::vector<slicereview::llm::ReviewComment>& cs) {
  std::vector<std::string> out;
  for (const auto& c : cs) out.push_back(c.id);
  return out;
}
