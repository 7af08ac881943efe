#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "filter/filter.hpp"
#include "llm/backend.hpp"
#include "llm/roles.hpp"
#include "metrics/metrics.hpp"
#include "render/render.hpp"
#include "slicer/slicer.hpp"

namespace slicereview::harness {

struct BackendSettings {
  std::string kind = "mock";  // mock or http
  std::string mock_script;
  llm::HttpBackendConfig http;
};

struct SinkSettings {
  std::string kind = "file";  // file or http_platform
  std::string endpoint;
  std::string token_env;
};

/// Defaults follow the best practical setting: LeftFlow, three reviewers,
/// top-5, validator on.
struct RunConfig {
  std::string dataset;
  std::string output_dir = "output";
  slicer::SlicingOption slicing = slicer::SlicingOption::kLeftFlow;
  render::RenderMode render_mode = render::RenderMode::kInline;
  std::string frontend = "mini";
  int reviewers = 3;
  bool validator = true;
  int workers = 1;
  std::string guidance;
  filter::FilterConfig filter;
  BackendSettings backend;
  llm::RoleConfig reviewer_role{"mock", 0.7, 2048};
  llm::RoleConfig meta_role{"mock", 0.0, 2048};
  llm::RoleConfig validator_role{"mock", 0.0, 2048};
  llm::RoleConfig translator_role{"mock", 0.0, 2048};
  llm::RoleConfig judge_role{"mock", 0.0, 16};
  std::string meta_strategy = "auto";  // auto, model or deterministic
  metrics::MatcherConfig matcher;
  metrics::EmptyMrFar empty_mr_far = metrics::EmptyMrFar::kZero;
  std::string source_language = "en";
  std::string target_language;  // empty: no translation
  SinkSettings sink;
};

/// Sets one option by its "section.key" name, e.g. "filter.top_k" or
/// "run.slicing". Throws ConfigError for an unknown key or bad value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Every accepted "section.key" name.
std::vector<std::string> setting_keys();

/// INI-style file ("[section]" headers, "key = value", '#' or ';' comment
/// lines), or a JSON object of sections when the name ends in ".json".
/// Relative paths resolve against the file's directory. Throws ConfigError.
RunConfig load_config(const std::filesystem::path& path);
void load_config_into(RunConfig& cfg, const std::filesystem::path& path);

/// Range checks plus existence of the dataset and mock script. Throws
/// ConfigError.
void validate_config(const RunConfig& cfg);

/// Provenance echo for reports. Leaves out the output directory so that
/// reports written to different places stay comparable.
nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace slicereview::harness
