// Command-line front end. Talks to the library only through the C API.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slicereview/slicereview.h"

namespace {

int report_error(sr_status st, const std::string& what) {
  std::cerr << "slicereview: " << what << ": " << sr_last_error() << "\n";
  return static_cast<int>(st);
}

// Takes ownership of a library string.
std::string take(char* s) {
  std::string out = s ? s : "";
  sr_string_free(s);
  return out;
}

struct Overrides {
  std::vector<std::pair<std::string, std::string>> settings;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(flag, [this, key](const std::string& v) { settings.emplace_back(key, v); },
                                          help);
  }
};

sr_status apply(sr_config* cfg, const Overrides& o, const std::vector<std::string>& raw) {
  for (const auto& [k, v] : o.settings) {
    if (sr_status st = sr_config_set(cfg, k.c_str(), v.c_str()); st != SR_OK) return st;
  }
  for (const auto& kv : raw) {
    auto eq = kv.find('=');
    std::string key = kv.substr(0, eq);
    std::string value = eq == std::string::npos ? "" : kv.substr(eq + 1);
    if (sr_status st = sr_config_set(cfg, key.c_str(), value.c_str()); st != SR_OK) return st;
  }
  return SR_OK;
}

void add_run_flags(CLI::App* app, Overrides& o) {
  o.add(app, "--dataset", "run.dataset", "Directory of fault case JSON files");
  o.add(app, "--output", "run.output", "Output directory");
  o.add(app, "--slicing", "run.slicing", "diff, function, leftflow or fullflow");
  o.add(app, "--position", "run.position", "none, relative or inline");
  o.add(app, "--reviewers", "run.reviewers", "Number of reviewers");
  o.add(app, "--validator", "run.validator", "true or false");
  o.add(app, "--workers", "run.workers", "Merge requests processed in parallel");
  o.add(app, "--top-k", "filter.top_k", "Comments kept per reviewer");
  o.add(app, "--coarse-threshold", "filter.coarse_threshold", "Q1/Q2 must exceed this");
  o.add(app, "--min-support", "filter.min_support", "Reviewers needed to keep a merged comment");
  o.add(app, "--validator-threshold", "filter.validator_threshold", "Q1/Q2 bar after validation");
  o.add(app, "--matcher", "matcher.id", "heuristic or llm_judge");
  o.add(app, "--translate", "translate.target", "Target language tag");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slice-based defect review pipeline"};
  app.set_version_flag("--version", std::string(sr_version()));
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Review every fault case in the dataset and write the report");
  std::string run_config;
  std::vector<std::string> run_set;
  bool quiet = false;
  Overrides run_over;
  run->add_option("-c,--config", run_config, "Config file (INI or .json)");
  add_run_flags(run, run_over);
  run->add_option("--set", run_set, "Extra section.key=value overrides");
  run->add_flag("-q,--quiet", quiet, "Do not print the report table");

  // slice
  auto* slice = app.add_subcommand("slice", "Print the slices of one diff");
  std::string repo, commit, diff, slicing = "leftflow", position = "inline", frontend = "mini", out_file;
  bool dump_ast = false;
  slice->add_option("--repo", repo, "Snapshot directory or git work tree")->required();
  slice->add_option("--commit", commit, "Revision id")->required();
  slice->add_option("--diff", diff, "Unified diff file")->required();
  slice->add_option("--slicing", slicing, "diff, function, leftflow or fullflow")->capture_default_str();
  slice->add_option("--position", position, "none, relative or inline")->capture_default_str();
  slice->add_option("--frontend", frontend, "Language frontend id")->capture_default_str();
  slice->add_flag("--dump-ast", dump_ast, "Print the statement index instead");
  slice->add_option("-o,--out", out_file, "Write JSON here instead of stdout");

  // eval
  auto* eval = app.add_subcommand("eval", "Recompute metrics from a finished run");
  std::string eval_config, run_dir, report_dir;
  std::vector<std::string> eval_set;
  Overrides eval_over;
  eval->add_option("-c,--config", eval_config, "Config file (INI or .json)");
  eval->add_option("--run-dir", run_dir, "Output directory of the earlier run")->required();
  eval_over.add(eval, "--dataset", "run.dataset", "Directory of fault case JSON files");
  eval_over.add(eval, "--slack", "matcher.slack", "Line slack for the heuristic matcher");
  eval_over.add(eval, "--min-q2", "matcher.min_q2", "Minimum Q2 for a match");
  eval->add_option("--set", eval_set, "Extra section.key=value overrides");
  eval->add_option("--report-dir", report_dir, "Also write report.json and report.txt here");

  // cpi
  auto* cpi = app.add_subcommand("cpi", "Harmonic index of KBI and 100 - FAR");
  double kbi = 0.0, far = 0.0;
  cpi->add_option("kbi", kbi, "KBI percent")->required();
  cpi->add_option("far", far, "FAR percent")->required();

  CLI11_PARSE(app, argc, argv);

  auto load = [](const std::string& path, sr_config** cfg) {
    return path.empty() ? sr_config_new(cfg) : sr_config_load(path.c_str(), cfg);
  };

  if (*run) {
    sr_config* cfg = nullptr;
    if (sr_status st = load(run_config, &cfg); st != SR_OK) return report_error(st, "config");
    if (sr_status st = apply(cfg, run_over, run_set); st != SR_OK) {
      sr_config_free(cfg);
      return report_error(st, "config");
    }
    sr_report* rep = nullptr;
    sr_status st = sr_run_pipeline(cfg, &rep);
    sr_config_free(cfg);
    if (rep && !quiet) {
      char* text = nullptr;
      if (sr_report_to_text(rep, &text) == SR_OK) std::cout << take(text);
    }
    sr_report_free(rep);
    if (st != SR_OK) return report_error(st, "run");
    return 0;
  }

  if (*slice) {
    char* json = nullptr;
    sr_status st = dump_ast ? sr_dump_ast(repo.c_str(), commit.c_str(), diff.c_str(), frontend.c_str(), &json)
                            : sr_slice(repo.c_str(), commit.c_str(), diff.c_str(), slicing.c_str(), position.c_str(),
                                       frontend.c_str(), &json);
    if (st != SR_OK) return report_error(st, dump_ast ? "dump-ast" : "slice");
    std::string text = take(json) + "\n";
    if (out_file.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_file, std::ios::binary);
      if (!(out << text)) {
        std::cerr << "slicereview: cannot write " << out_file << "\n";
        return SR_ERR_IO;
      }
    }
    return 0;
  }

  if (*eval) {
    sr_config* cfg = nullptr;
    if (sr_status st = load(eval_config, &cfg); st != SR_OK) return report_error(st, "config");
    if (sr_status st = apply(cfg, eval_over, eval_set); st != SR_OK) {
      sr_config_free(cfg);
      return report_error(st, "config");
    }
    sr_report* rep = nullptr;
    sr_status st = sr_eval(cfg, run_dir.c_str(), &rep);
    sr_config_free(cfg);
    if (st != SR_OK) return report_error(st, "eval");
    if (!report_dir.empty()) {
      if (sr_status wst = sr_report_write(rep, report_dir.c_str()); wst != SR_OK) {
        sr_report_free(rep);
        return report_error(wst, "eval");
      }
    }
    char* text = nullptr;
    if (sr_report_to_text(rep, &text) == SR_OK) std::cout << take(text);
    sr_report_free(rep);
    return 0;
  }

  if (*cpi) {
    double value = 0.0;
    int defined = 0;
    if (sr_status st = sr_compute_cpi(kbi, far, &value, &defined); st != SR_OK) return report_error(st, "cpi");
    if (defined) {
      std::printf("%.2f\n", value);
    } else {
      std::printf("--\n");
    }
    return 0;
  }
  return 0;
}
