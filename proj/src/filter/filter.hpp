#pragma once

#include <vector>

#include "llm/comment.hpp"

namespace slicereview::filter {

struct FilterConfig {
  int coarse_threshold = 4;
  int top_k = 5;
  int min_support = 2;
  int validator_threshold = 4;
};

/// Throws ConfigError when a field is out of range.
void validate(const FilterConfig& cfg);

/// Keeps comments with q1 and q2 both above the threshold, in order.
std::vector<llm::ReviewComment> coarse_filter(const std::vector<llm::ReviewComment>& comments, const FilterConfig& cfg);

/// Stable sort by q3 (highest first), then the first k.
std::vector<llm::ReviewComment> topk_truncate(const std::vector<llm::ReviewComment>& comments, int k);

/// Drops comments raised by fewer than min_support reviewers. A single
/// reviewer run has nothing to corroborate, so the filter passes everything.
std::vector<llm::ReviewComment> merge_support_filter(const std::vector<llm::ReviewComment>& comments,
                                                     const FilterConfig& cfg, int reviewer_count);

/// The coarse predicate at validator_threshold, then a stable q3 sort.
std::vector<llm::ReviewComment> post_validate_filter(const std::vector<llm::ReviewComment>& comments,
                                                     const FilterConfig& cfg);

}  // namespace slicereview::filter
