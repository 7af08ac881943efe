#include "filter/filter.hpp"

#include <algorithm>

#include "common/error.hpp"

namespace slicereview::filter {

using llm::ReviewComment;

namespace {

std::vector<ReviewComment> keep_above(const std::vector<ReviewComment>& comments, int threshold) {
  std::vector<ReviewComment> out;
  std::copy_if(comments.begin(), comments.end(), std::back_inserter(out),
               [threshold](const ReviewComment& c) { return c.q1 > threshold && c.q2 > threshold; });
  return out;
}

void sort_by_q3(std::vector<ReviewComment>& comments) {
  std::stable_sort(comments.begin(), comments.end(),
                   [](const ReviewComment& a, const ReviewComment& b) { return a.q3 > b.q3; });
}

}  // namespace

void validate(const FilterConfig& cfg) {
  auto in_scale = [](int t) { return t >= 1 && t <= 7; };
  if (!in_scale(cfg.coarse_threshold)) throw ConfigError("coarse_threshold must be in 1..7");
  if (!in_scale(cfg.validator_threshold)) throw ConfigError("validator_threshold must be in 1..7");
  if (cfg.top_k < 1) throw ConfigError("top_k must be at least 1");
  if (cfg.min_support < 1) throw ConfigError("min_support must be at least 1");
}

std::vector<ReviewComment> coarse_filter(const std::vector<ReviewComment>& comments, const FilterConfig& cfg) {
  return keep_above(comments, cfg.coarse_threshold);
}

std::vector<ReviewComment> topk_truncate(const std::vector<ReviewComment>& comments, int k) {
  std::vector<ReviewComment> out = comments;
  sort_by_q3(out);
  if (k >= 0 && out.size() > static_cast<size_t>(k)) out.resize(static_cast<size_t>(k));
  return out;
}

std::vector<ReviewComment> merge_support_filter(const std::vector<ReviewComment>& comments, const FilterConfig& cfg,
                                                int reviewer_count) {
  if (reviewer_count <= 1) return comments;
  std::vector<ReviewComment> out;
  std::copy_if(comments.begin(), comments.end(), std::back_inserter(out),
               [&cfg](const ReviewComment& c) { return c.support_count >= cfg.min_support; });
  return out;
}

std::vector<ReviewComment> post_validate_filter(const std::vector<ReviewComment>& comments, const FilterConfig& cfg) {
  auto out = keep_above(comments, cfg.validator_threshold);
  sort_by_q3(out);
  return out;
}

}  // namespace slicereview::filter
