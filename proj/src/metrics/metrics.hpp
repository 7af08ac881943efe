#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "llm/comment.hpp"

namespace slicereview::metrics {

struct LineRange {
  int start = 0;
  int end = 0;

  bool operator==(const LineRange&) const = default;
};

struct KeyBug {
  std::vector<std::string> files;
  std::vector<LineRange> line_ranges;
  std::string description;
  std::string root_cause;
  std::string category;

  bool operator==(const KeyBug&) const = default;
};

struct FaultCase {
  std::string mr_id;
  std::string repo_id;
  std::string commit_id;
  std::optional<std::string> fix_commit_id;
  std::string repo;  // snapshot directory or git work tree
  std::string diff;  // unified diff file
  KeyBug key_bug;

  bool operator==(const FaultCase&) const = default;
};

struct MatchResult {
  bool recalled = false;
  std::vector<std::string> matched_ids;
  bool judge_fell_back = false;  // llm_judge failed, heuristic used
};

struct MatcherConfig {
  std::string id = "heuristic";  // or llm_judge
  int slack = 2;
  int min_q2 = 5;
};

/// Decides one comment under llm_judge; throws BackendError on failure.
using JudgeFn = std::function<bool(const llm::ReviewComment&)>;

/// Throws ConfigError for an unknown matcher id.
MatchResult match_key_bug(const std::vector<llm::ReviewComment>& comments, const FaultCase& fault,
                          const MatcherConfig& cfg, const JudgeFn& judge = {});

/// Heuristic predicate for a single comment.
bool heuristic_match(const llm::ReviewComment& c, const KeyBug& bug, const MatcherConfig& cfg);

struct MrResult {
  std::string mr_id;
  std::string category;
  std::vector<llm::ReviewComment> comments;
  MatchResult match;
  std::vector<bool> line_validity;  // parallel to comments
};

/// Line numbers shown to reviewers, per file.
using LineTables = std::map<std::string, std::set<int>>;

/// Valid iff start <= end and both lines appear in the file's line table.
bool lines_valid(const llm::ReviewComment& c, const LineTables& tables);

using Percent = std::optional<double>;

/// Percent of MRs whose key bug was recalled; undefined for no MRs.
Percent compute_kbi(const std::vector<MrResult>& results);
/// Share of one MR's comments that miss the key bug, 0..100. No comments
/// means no false alarms.
double mr_false_alarm_rate(const MrResult& r);
/// How FAR1 treats an MR that produced no comments: as 0 (default) or left
/// out of the mean.
enum class EmptyMrFar { kZero, kExclude };

/// variant 1 averages all MRs, variant 2 only recalled ones (undefined when
/// none were recalled). Throws InvalidArgument for other variants.
Percent compute_far(const std::vector<MrResult>& results, int variant, EmptyMrFar empty = EmptyMrFar::kZero);
/// Harmonic mean of kbi and 100 - far; undefined when either input is or
/// when both operands are zero.
Percent compute_cpi(Percent kbi, Percent far);
/// Mean per-MR share of comments with valid lines, over MRs that have
/// comments.
Percent compute_lsr(const std::vector<MrResult>& results);

struct FailedMr {
  std::string mr_id;
  std::string error;

  bool operator==(const FailedMr&) const = default;
};

struct MrRow {
  std::string mr_id;
  std::string category;
  int comments = 0;
  int matched = 0;
  bool recalled = false;
  double far = 0.0;
  Percent lsr;

  bool operator==(const MrRow&) const = default;
};

/// Failed MRs are listed but not counted in N.
struct MetricsReport {
  int n = 0;
  int m = 0;
  Percent kbi, far1, cpi1, far2, cpi2, lsr;
  std::vector<MrRow> per_mr;
  std::vector<FailedMr> failed;
  std::vector<std::string> warnings;
  nlohmann::json config = nlohmann::json::object();

  bool operator==(const MetricsReport&) const = default;
};

MetricsReport build_report(const std::vector<MrResult>& results, const nlohmann::json& config,
                           std::vector<FailedMr> failed = {}, EmptyMrFar empty = EmptyMrFar::kZero);

/// Two decimals, or "--" when undefined.
std::string format_percent(Percent p);

/// Metric cells are strings exactly as printed in the text table.
nlohmann::json report_to_json(const MetricsReport& report);
/// Inverse of report_to_json; values come back rounded to two decimals.
/// Throws DatasetError on a malformed document.
MetricsReport report_from_json(const nlohmann::json& j);
/// Summary row (N, M, KBI, FAR1, CPI1, FAR2, CPI2, LSR) then the per-MR table.
std::string report_to_text(const MetricsReport& report);

}  // namespace slicereview::metrics
