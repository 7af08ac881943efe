#include "slicereview/slicereview.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "common/error.hpp"
#include "harness/config.hpp"
#include "harness/pipeline.hpp"
#include "harness/report.hpp"
#include "metrics/metrics.hpp"
#include "render/render.hpp"

struct sr_config {
  slicereview::harness::RunConfig cfg;
};

struct sr_report {
  slicereview::metrics::MetricsReport report;
};

namespace {

thread_local std::string g_last_error;

sr_status fail(sr_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Maps every exception onto a status so nothing crosses the C boundary.
template <typename F>
sr_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return SR_OK;
  } catch (const slicereview::Error& e) {
    return fail(static_cast<sr_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SR_ERR_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* name) {
  if (!p) throw slicereview::Error(slicereview::ErrorCode::kInvalidArgument, std::string(name) + " is NULL");
}

}  // namespace

extern "C" {

const char* sr_version(void) { return "0.3.0"; }

const char* sr_last_error(void) { return g_last_error.c_str(); }

void sr_string_free(char* s) { std::free(s); }

sr_status sr_config_new(sr_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new sr_config();
  });
}

sr_status sr_config_load(const char* path, sr_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto cfg = std::make_unique<sr_config>();
    slicereview::harness::load_config_into(cfg->cfg, path);
    *out = cfg.release();
  });
}

sr_status sr_config_set(sr_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg, "cfg");
    require(key, "key");
    require(value, "value");
    slicereview::harness::apply_setting(cfg->cfg, key, value);
  });
}

sr_status sr_config_to_json(const sr_config* cfg, char** out_json) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out_json, "out_json");
    *out_json = dup(slicereview::harness::config_to_json(cfg->cfg).dump(2));
  });
}

sr_status sr_config_validate(const sr_config* cfg) {
  return guarded([&] {
    require(cfg, "cfg");
    slicereview::harness::validate_config(cfg->cfg);
  });
}

void sr_config_free(sr_config* cfg) { delete cfg; }

sr_status sr_run_pipeline(const sr_config* cfg, sr_report** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out, "out");
    *out = nullptr;
    try {
      auto result = slicereview::harness::run_pipeline(cfg->cfg);
      *out = new sr_report{std::move(result.report)};
    } catch (const slicereview::DatasetError&) {
      // No MR completed; hand back what was written so callers can show it.
      std::error_code ec;
      auto path = std::filesystem::path(cfg->cfg.output_dir) / "report.json";
      if (std::filesystem::is_regular_file(path, ec)) {
        try {
          *out = new sr_report{slicereview::harness::load_report(path)};
        } catch (const slicereview::Error&) {
        }
      }
      throw;
    }
  });
}

sr_status sr_eval(const sr_config* cfg, const char* output_dir, sr_report** out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(output_dir, "output_dir");
    require(out, "out");
    *out = new sr_report{slicereview::harness::evaluate_stored(cfg->cfg, output_dir)};
  });
}

sr_status sr_report_load(const char* path, sr_report** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new sr_report{slicereview::harness::load_report(path)};
  });
}

sr_status sr_report_write(const sr_report* report, const char* dir) {
  return guarded([&] {
    require(report, "report");
    require(dir, "dir");
    slicereview::harness::emit_report(report->report, dir, true);
  });
}

sr_status sr_report_to_json(const sr_report* report, char** out_json) {
  return guarded([&] {
    require(report, "report");
    require(out_json, "out_json");
    *out_json = dup(slicereview::metrics::report_to_json(report->report).dump(2));
  });
}

sr_status sr_report_to_text(const sr_report* report, char** out_text) {
  return guarded([&] {
    require(report, "report");
    require(out_text, "out_text");
    *out_text = dup(slicereview::metrics::report_to_text(report->report));
  });
}

sr_status sr_report_metric(const sr_report* report, const char* name, double* value, int* defined) {
  return guarded([&] {
    require(report, "report");
    require(name, "name");
    require(value, "value");
    require(defined, "defined");
    const auto& r = report->report;
    const std::string n = name;
    slicereview::metrics::Percent p;
    if (n == "KBI") p = r.kbi;
    else if (n == "FAR1") p = r.far1;
    else if (n == "CPI1") p = r.cpi1;
    else if (n == "FAR2") p = r.far2;
    else if (n == "CPI2") p = r.cpi2;
    else if (n == "LSR") p = r.lsr;
    else throw slicereview::Error(slicereview::ErrorCode::kInvalidArgument, "unknown metric '" + n + "'");
    *defined = p.has_value();
    *value = p.value_or(0.0);
  });
}

void sr_report_free(sr_report* report) { delete report; }

sr_status sr_slice(const char* repo, const char* commit_id, const char* diff_path, const char* option,
                   const char* mode, const char* frontend, char** out_json) {
  return guarded([&] {
    require(repo, "repo");
    require(commit_id, "commit_id");
    require(diff_path, "diff_path");
    require(out_json, "out_json");
    auto opt = slicereview::slicer::parse_slicing_option(option ? option : "leftflow");
    auto render_mode = slicereview::render::parse_render_mode(mode ? mode : "inline");
    auto mr = slicereview::harness::slice_merge_request(repo, commit_id, diff_path, opt, frontend ? frontend : "mini");
    nlohmann::json slices = nlohmann::json::array();
    for (const auto& s : mr.slices) {
      auto j = slicereview::slicer::slice_to_json(s, mr.index);
      auto rendered = slicereview::render::render_slice(s, render_mode);
      j["rendered"] = rendered.body;
      if (rendered.position_appendix) j["positions"] = *rendered.position_appendix;
      slices.push_back(std::move(j));
    }
    nlohmann::json doc = {{"slicing", slicereview::slicer::slicing_option_name(opt)},
                          {"position", slicereview::render::render_mode_name(render_mode)},
                          {"slices", slices},
                          {"warnings", mr.warnings}};
    *out_json = dup(doc.dump(2));
  });
}

sr_status sr_dump_ast(const char* repo, const char* commit_id, const char* diff_path, const char* frontend,
                      char** out_json) {
  return guarded([&] {
    require(repo, "repo");
    require(commit_id, "commit_id");
    require(diff_path, "diff_path");
    require(out_json, "out_json");
    auto mr = slicereview::harness::slice_merge_request(repo, commit_id, diff_path,
                                                        slicereview::slicer::SlicingOption::kOriginalDiff,
                                                        frontend ? frontend : "mini");
    *out_json = dup(slicereview::ast::dump_ast_json(mr.index).dump(2));
  });
}

sr_status sr_compute_cpi(double kbi, double far, double* cpi, int* defined) {
  return guarded([&] {
    require(cpi, "cpi");
    require(defined, "defined");
    auto p = slicereview::metrics::compute_cpi(kbi, far);
    *defined = p.has_value();
    *cpi = p.value_or(0.0);
  });
}

}  // extern "C"
