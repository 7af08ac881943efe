#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "ast/ast.hpp"
#include "harness/config.hpp"
#include "harness/sink.hpp"
#include "llm/backend.hpp"
#include "metrics/metrics.hpp"
#include "slicer/slicer.hpp"

namespace slicereview::harness {

/// Slices of one merge request plus the index they point into.
struct SlicedMr {
  ingest::RepoSnapshot snapshot;
  ast::AstIndex index;
  std::vector<slicer::CodeSlice> slices;
  std::vector<std::string> warnings;  // binary diff entries, unparsed files
};

/// snapshot -> diff -> AST -> slices. Throws on any stage failure.
SlicedMr slice_merge_request(const std::filesystem::path& repo, const std::string& commit_id,
                             const std::filesystem::path& diff_path, slicer::SlicingOption option,
                             const std::string& frontend_id);

struct MrStats {
  std::string mr_id;
  long wall_ms = 0;
  int slices = 0;
  int exchanges = 0;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  int comments = 0;
};

nlohmann::json stats_to_json(const std::vector<MrStats>& stats);

struct PipelineResult {
  metrics::MetricsReport report;
  std::vector<MrStats> stats;  // completed MRs, dataset order
};

std::shared_ptr<llm::ChatBackend> make_backend(const BackendSettings& settings);

/// Runs every fault case and writes
///   output/<mr_id>/{slices,transcripts,comments,delivery,stats}.json
///   output/{report.json,report.txt,stats.json}
/// A failing MR is recorded in the report and skipped. Throws ConfigError
/// for a bad config and DatasetError when no MR completes (after writing the
/// report).
PipelineResult run_pipeline(const RunConfig& cfg);
/// Same, with injected backend and sink.
PipelineResult run_pipeline(const RunConfig& cfg, llm::ChatBackend& backend, ReviewSink& sink);

/// Recomputes the report from stored comments.json files under output_dir
/// without calling any model. MRs without stored comments count as failed.
/// The llm_judge matcher falls back to the heuristic here.
metrics::MetricsReport evaluate_stored(const RunConfig& cfg, const std::filesystem::path& output_dir);

}  // namespace slicereview::harness
