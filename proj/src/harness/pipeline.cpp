#include "harness/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <future>
#include <mutex>
#include <optional>
#include <thread>

#include "common/error.hpp"
#include "common/text.hpp"
#include "filter/filter.hpp"
#include "harness/dataset.hpp"
#include "harness/report.hpp"
#include "ingest/diff.hpp"
#include "ingest/snapshot.hpp"
#include "llm/roles.hpp"
#include "render/render.hpp"

namespace slicereview::harness {

namespace fs = std::filesystem;
using llm::ReviewComment;
using metrics::FaultCase;

SlicedMr slice_merge_request(const fs::path& repo, const std::string& commit_id, const fs::path& diff_path,
                             slicer::SlicingOption option, const std::string& frontend_id) {
  SlicedMr out;
  out.snapshot = ingest::load_snapshot(repo, commit_id);
  const std::string diff_text = read_file(diff_path);
  auto hunks = ingest::parse_unified_diff(diff_text, &out.warnings);
  auto changes = ingest::changed_lines(hunks);
  out.index = ast::build_ast_index(out.snapshot, frontend_id, slicer::pre_images_for(out.snapshot, hunks));
  for (const auto& e : out.index.errors()) {
    out.warnings.push_back(e.file + ":" + std::to_string(e.line) + ": " + e.message);
  }
  out.slices = slicer::code_slicing(out.snapshot, changes, out.index, option);
  return out;
}

nlohmann::json stats_to_json(const std::vector<MrStats>& stats) {
  nlohmann::json rows = nlohmann::json::array();
  long wall = 0;
  int prompt = 0, completion = 0;
  for (const auto& s : stats) {
    rows.push_back({{"mr_id", s.mr_id},
                    {"wall_ms", s.wall_ms},
                    {"slices", s.slices},
                    {"exchanges", s.exchanges},
                    {"prompt_tokens", s.prompt_tokens},
                    {"completion_tokens", s.completion_tokens},
                    {"comments", s.comments}});
    wall += s.wall_ms;
    prompt += s.prompt_tokens;
    completion += s.completion_tokens;
  }
  return {{"mrs", rows}, {"total", {{"wall_ms", wall}, {"prompt_tokens", prompt}, {"completion_tokens", completion}}}};
}

std::shared_ptr<llm::ChatBackend> make_backend(const BackendSettings& s) {
  if (s.kind == "mock") return llm::MockBackend::from_file(s.mock_script);
  if (s.kind == "http") return std::make_shared<llm::HttpBackend>(s.http);
  throw ConfigError("unknown backend '" + s.kind + "'");
}

namespace {

struct MrOutcome {
  metrics::MrResult result;
  MrStats stats;
};

void account(MrStats& stats, const llm::RoleTranscript& t) {
  stats.exchanges += static_cast<int>(t.exchanges.size());
  stats.prompt_tokens += t.prompt_tokens;
  stats.completion_tokens += t.completion_tokens;
}

nlohmann::json tables_to_json(const metrics::LineTables& tables) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [file, lines] : tables) j[file] = std::vector<int>(lines.begin(), lines.end());
  return j;
}

metrics::LineTables tables_from_json(const nlohmann::json& j) {
  metrics::LineTables out;
  for (const auto& [file, lines] : j.items()) {
    auto v = lines.get<std::vector<int>>();
    out[file] = std::set<int>(v.begin(), v.end());
  }
  return out;
}

nlohmann::json match_to_json(const metrics::MatchResult& m) {
  return {{"recalled", m.recalled}, {"matched_ids", m.matched_ids}, {"judge_fell_back", m.judge_fell_back}};
}

std::vector<bool> validity(const std::vector<ReviewComment>& comments, const metrics::LineTables& tables) {
  std::vector<bool> out;
  for (const auto& c : comments) out.push_back(metrics::lines_valid(c, tables));
  return out;
}

llm::MergeStrategy meta_strategy(const RunConfig& cfg, const llm::ChatBackend& backend) {
  if (cfg.meta_strategy == "model") return llm::MergeStrategy::kModel;
  if (cfg.meta_strategy == "deterministic") return llm::MergeStrategy::kDeterministic;
  // Scripted runs merge without a model so fixtures need no meta answers.
  return backend.id() == "mock" ? llm::MergeStrategy::kDeterministic : llm::MergeStrategy::kModel;
}

class MrRunner {
 public:
  MrRunner(const RunConfig& cfg, llm::ChatBackend& backend, ReviewSink& sink, const fs::path& out_root)
      : cfg_(cfg), backend_(backend), sink_(sink), out_root_(out_root) {}

  MrOutcome run(const FaultCase& fault) {
    auto t0 = std::chrono::steady_clock::now();
    const fs::path dir = out_root_ / fault.mr_id;
    MrOutcome out;
    out.stats.mr_id = fault.mr_id;

    SlicedMr sliced = slice_merge_request(fault.repo, fault.commit_id, fault.diff, cfg_.slicing, cfg_.frontend);
    auto slices_json = slicer::slices_to_json(sliced.slices, sliced.index);
    write_file(dir / "slices.json", nlohmann::json{{"mr_id", fault.mr_id},
                                                   {"slicing", slicer::slicing_option_name(cfg_.slicing)},
                                                   {"slices", slices_json},
                                                   {"skipped", sliced.index.skipped()},
                                                   {"warnings", sliced.warnings}}
                                            .dump(2) + "\n");
    out.stats.slices = static_cast<int>(sliced.slices.size());

    nlohmann::json transcripts = nlohmann::json::array();
    nlohmann::json cascades = nlohmann::json::array();
    std::vector<ReviewComment> final_comments;
    metrics::LineTables tables;

    for (const auto& slice : sliced.slices) {
      llm::ReviewInput input;
      input.slice_id = slice.id;
      input.file = slice.file;
      input.rendered = render::render_slice(slice, cfg_.render_mode);
      input.mode = cfg_.render_mode;
      input.callee_signatures = slice.callee_signatures;
      input.guidance = cfg_.guidance;
      for (const auto& row : input.rendered.line_table) {
        if (!row.ellipsis) tables[slice.file].insert(row.line);
      }

      auto record = [&](const llm::RoleTranscript& t) {
        account(out.stats, t);
        auto j = llm::transcript_to_json(t);
        j["slice_id"] = slice.id;
        transcripts.push_back(std::move(j));
      };

      std::vector<llm::RoleOutput> reviews = review(input);
      std::vector<std::vector<ReviewComment>> sets;
      nlohmann::json per_reviewer = nlohmann::json::array();
      for (const auto& r : reviews) {
        record(r.transcript);
        auto coarse = filter::coarse_filter(r.comments, cfg_.filter);
        auto top = filter::topk_truncate(coarse, cfg_.filter.top_k);
        per_reviewer.push_back({{"raw", r.comments.size()}, {"coarse", coarse.size()}, {"top_k", top.size()}});
        sets.push_back(std::move(top));
      }

      auto meta = llm::run_meta_reviewer(backend_, cfg_.meta_role, sets, input, meta_strategy(cfg_, backend_));
      record(meta.transcript);
      auto kept = filter::merge_support_filter(meta.comments, cfg_.filter, cfg_.reviewers);
      nlohmann::json cascade = {{"slice_id", slice.id},
                                {"file", slice.file},
                                {"reviewers", per_reviewer},
                                {"meta", meta.comments.size()},
                                {"support", kept.size()}};

      if (cfg_.validator && !kept.empty()) {
        auto val = llm::run_validator(backend_, cfg_.validator_role, kept, input);
        record(val.transcript);
        kept = filter::post_validate_filter(val.comments, cfg_.filter);
      }
      cascade["validated"] = kept.size();

      if (!cfg_.target_language.empty() && cfg_.target_language != cfg_.source_language && !kept.empty()) {
        auto tr = llm::run_translator(backend_, cfg_.translator_role, kept, cfg_.source_language, cfg_.target_language);
        record(tr.transcript);
        kept = std::move(tr.comments);
      }
      cascade["final"] = kept.size();
      cascades.push_back(std::move(cascade));
      final_comments.insert(final_comments.end(), kept.begin(), kept.end());
    }

    DeliveryResult delivery = sink_.post_comments(fault.mr_id, final_comments);
    if (sink_.id() != "file") write_file(dir / "delivery.json", delivery_to_json(delivery).dump(2) + "\n");

    llm::RoleTranscript judge_log;
    judge_log.role = "judge";
    metrics::JudgeFn judge;
    if (cfg_.matcher.id == "llm_judge") {
      llm::JudgeQuestion q;
      q.files = fault.key_bug.files;
      for (const auto& r : fault.key_bug.line_ranges) {
        q.lines += (q.lines.empty() ? "" : ", ") + std::to_string(r.start) + "-" + std::to_string(r.end);
      }
      q.description = fault.key_bug.description;
      q.root_cause = fault.key_bug.root_cause;
      judge = [&, q](const ReviewComment& c) { return llm::run_judge(backend_, cfg_.judge_role, q, c, judge_log); };
    }
    out.result.match = metrics::match_key_bug(final_comments, fault, cfg_.matcher, judge);
    if (!judge_log.exchanges.empty() || !judge_log.errors.empty()) {
      account(out.stats, judge_log);
      auto j = llm::transcript_to_json(judge_log);
      j["slice_id"] = nullptr;
      transcripts.push_back(std::move(j));
    }

    out.result.mr_id = fault.mr_id;
    out.result.category = fault.key_bug.category;
    out.result.line_validity = validity(final_comments, tables);
    out.result.comments = final_comments;
    out.stats.comments = static_cast<int>(final_comments.size());

    write_file(dir / "transcripts.json", transcripts.dump(2) + "\n");
    write_file(dir / "comments.json", nlohmann::json{{"mr_id", fault.mr_id},
                                                     {"category", fault.key_bug.category},
                                                     {"comments", llm::comments_to_json(final_comments)},
                                                     {"line_validity", out.result.line_validity},
                                                     {"match", match_to_json(out.result.match)},
                                                     {"cascade", cascades},
                                                     {"line_tables", tables_to_json(tables)}}
                                              .dump(2) + "\n");
    out.stats.wall_ms = static_cast<long>(
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count());
    write_file(dir / "stats.json", stats_to_json({out.stats})["mrs"][0].dump(2) + "\n");
    return out;
  }

 private:
  std::vector<llm::RoleOutput> review(const llm::ReviewInput& input) {
    std::vector<llm::RoleOutput> out;
    if (cfg_.reviewers == 1) {
      out.push_back(llm::run_reviewer(backend_, cfg_.reviewer_role, input, 1));
      return out;
    }
    std::vector<std::future<llm::RoleOutput>> pending;
    for (int i = 1; i <= cfg_.reviewers; ++i) {
      pending.push_back(std::async(std::launch::async, [this, &input, i] {
        return llm::run_reviewer(backend_, cfg_.reviewer_role, input, i);
      }));
    }
    // get() in order so the first failure surfaces after every task is done.
    std::optional<Error> failure;
    for (auto& f : pending) {
      try {
        out.push_back(f.get());
      } catch (const Error& e) {
        if (!failure) failure = e;
      }
    }
    if (failure) throw *failure;
    return out;
  }

  const RunConfig& cfg_;
  llm::ChatBackend& backend_;
  ReviewSink& sink_;
  fs::path out_root_;
};

std::string describe(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return std::string(error_code_name(err->code())) + ": " + e.what();
  return std::string("internal: ") + e.what();
}

std::vector<std::string> dataset_warnings(const FaultDataset& ds) {
  std::vector<std::string> out;
  for (const auto& v : ds.violations) out.push_back("dataset " + v.file + ": " + v.error);
  return out;
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& cfg) {
  validate_config(cfg);
  auto backend = make_backend(cfg.backend);
  auto sink = make_sink(cfg.sink, cfg.output_dir);
  return run_pipeline(cfg, *backend, *sink);
}

PipelineResult run_pipeline(const RunConfig& cfg, llm::ChatBackend& backend, ReviewSink& sink) {
  validate_config(cfg);
  FaultDataset ds = load_fault_dataset(cfg.dataset);
  const fs::path out_root = cfg.output_dir;

  const size_t n = ds.cases.size();
  std::vector<std::optional<MrOutcome>> outcomes(n);
  std::vector<std::string> errors(n);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    MrRunner runner(cfg, backend, sink, out_root);
    for (size_t i = next++; i < n; i = next++) {
      try {
        outcomes[i] = runner.run(ds.cases[i]);
      } catch (const std::exception& e) {
        errors[i] = describe(e);
      }
    }
  };
  const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(n)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  PipelineResult out;
  std::vector<metrics::MrResult> results;
  std::vector<metrics::FailedMr> failed;
  for (size_t i = 0; i < n; ++i) {
    if (outcomes[i]) {
      results.push_back(std::move(outcomes[i]->result));
      out.stats.push_back(outcomes[i]->stats);
    } else {
      failed.push_back({ds.cases[i].mr_id, errors[i]});
    }
  }
  out.report = metrics::build_report(results, config_to_json(cfg), failed, cfg.empty_mr_far);
  auto warnings = dataset_warnings(ds);
  out.report.warnings.insert(out.report.warnings.begin(), warnings.begin(), warnings.end());

  emit_report(out.report, out_root, true);
  write_file(out_root / "stats.json", stats_to_json(out.stats).dump(2) + "\n");
  if (results.empty()) {
    throw DatasetError("no merge request completed" +
                       (failed.empty() ? std::string() : " (first failure: " + failed.front().mr_id + ": " +
                                                             failed.front().error + ")"));
  }
  return out;
}

metrics::MetricsReport evaluate_stored(const RunConfig& cfg, const fs::path& output_dir) {
  if (cfg.dataset.empty()) throw ConfigError("run.dataset is not set");
  FaultDataset ds = load_fault_dataset(cfg.dataset);
  std::vector<metrics::MrResult> results;
  std::vector<metrics::FailedMr> failed;
  for (const auto& fault : ds.cases) {
    const fs::path file = output_dir / fault.mr_id / "comments.json";
    std::error_code ec;
    if (!fs::is_regular_file(file, ec)) {
      failed.push_back({fault.mr_id, "no stored comments"});
      continue;
    }
    try {
      auto j = nlohmann::json::parse(read_file(file));
      metrics::MrResult r;
      r.mr_id = fault.mr_id;
      r.category = fault.key_bug.category;
      for (const auto& c : j.at("comments")) r.comments.push_back(llm::comment_from_json(c));
      r.match = metrics::match_key_bug(r.comments, fault, cfg.matcher);
      r.line_validity = validity(r.comments, tables_from_json(j.at("line_tables")));
      results.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      failed.push_back({fault.mr_id, std::string("dataset: malformed comments.json: ") + e.what()});
    } catch (const Error& e) {
      failed.push_back({fault.mr_id, describe(e)});
    }
  }
  auto report = metrics::build_report(results, config_to_json(cfg), failed, cfg.empty_mr_far);
  auto warnings = dataset_warnings(ds);
  report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
  return report;
}

}  // namespace slicereview::harness
