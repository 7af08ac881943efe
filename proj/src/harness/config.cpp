#include "harness/config.hpp"

#include <charconv>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "common/error.hpp"
#include "common/text.hpp"
#include "llm/prompts.hpp"

namespace slicereview::harness {

namespace fs = std::filesystem;

namespace {

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string one_of(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (v == a) return v;
  }
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw ConfigError(key + ": expected one of " + list + ", got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"run.dataset", [](RunConfig& c, auto&, auto& v) { c.dataset = v; }},
      {"run.output", [](RunConfig& c, auto&, auto& v) { c.output_dir = v; }},
      {"run.slicing", [](RunConfig& c, auto&, auto& v) { c.slicing = slicer::parse_slicing_option(v); }},
      {"run.position", [](RunConfig& c, auto&, auto& v) { c.render_mode = render::parse_render_mode(v); }},
      {"run.frontend", [](RunConfig& c, auto&, auto& v) { c.frontend = v; }},
      {"run.reviewers", [](RunConfig& c, auto& k, auto& v) { c.reviewers = to_int(k, v); }},
      {"run.validator", [](RunConfig& c, auto& k, auto& v) { c.validator = to_bool(k, v); }},
      {"run.workers", [](RunConfig& c, auto& k, auto& v) { c.workers = to_int(k, v); }},
      {"run.guidance", [](RunConfig& c, auto&, auto& v) { c.guidance = v; }},
      {"filter.coarse_threshold", [](RunConfig& c, auto& k, auto& v) { c.filter.coarse_threshold = to_int(k, v); }},
      {"filter.top_k", [](RunConfig& c, auto& k, auto& v) { c.filter.top_k = to_int(k, v); }},
      {"filter.min_support", [](RunConfig& c, auto& k, auto& v) { c.filter.min_support = to_int(k, v); }},
      {"filter.validator_threshold",
       [](RunConfig& c, auto& k, auto& v) { c.filter.validator_threshold = to_int(k, v); }},
      {"backend.kind", [](RunConfig& c, auto& k, auto& v) { c.backend.kind = one_of(k, v, {"mock", "http"}); }},
      {"backend.mock_script", [](RunConfig& c, auto&, auto& v) { c.backend.mock_script = v; }},
      {"backend.endpoint", [](RunConfig& c, auto&, auto& v) { c.backend.http.endpoint = v; }},
      {"backend.api_key_env", [](RunConfig& c, auto&, auto& v) { c.backend.http.api_key_env = v; }},
      {"backend.timeout", [](RunConfig& c, auto& k, auto& v) { c.backend.http.timeout_seconds = to_int(k, v); }},
      {"backend.max_retries", [](RunConfig& c, auto& k, auto& v) { c.backend.http.max_retries = to_int(k, v); }},
      {"backend.backoff_ms", [](RunConfig& c, auto& k, auto& v) { c.backend.http.backoff_initial_ms = to_int(k, v); }},
      {"models.reviewer", [](RunConfig& c, auto&, auto& v) { c.reviewer_role.model = v; }},
      {"models.meta", [](RunConfig& c, auto&, auto& v) { c.meta_role.model = v; }},
      {"models.validator", [](RunConfig& c, auto&, auto& v) { c.validator_role.model = v; }},
      {"models.translator", [](RunConfig& c, auto&, auto& v) { c.translator_role.model = v; }},
      {"models.judge", [](RunConfig& c, auto&, auto& v) { c.judge_role.model = v; }},
      {"temperature.reviewer", [](RunConfig& c, auto& k, auto& v) { c.reviewer_role.temperature = to_double(k, v); }},
      {"temperature.meta", [](RunConfig& c, auto& k, auto& v) { c.meta_role.temperature = to_double(k, v); }},
      {"temperature.validator",
       [](RunConfig& c, auto& k, auto& v) { c.validator_role.temperature = to_double(k, v); }},
      {"temperature.translator",
       [](RunConfig& c, auto& k, auto& v) { c.translator_role.temperature = to_double(k, v); }},
      {"meta.strategy",
       [](RunConfig& c, auto& k, auto& v) { c.meta_strategy = one_of(k, v, {"auto", "model", "deterministic"}); }},
      {"matcher.id", [](RunConfig& c, auto& k, auto& v) { c.matcher.id = one_of(k, v, {"heuristic", "llm_judge"}); }},
      {"matcher.slack", [](RunConfig& c, auto& k, auto& v) { c.matcher.slack = to_int(k, v); }},
      {"matcher.min_q2", [](RunConfig& c, auto& k, auto& v) { c.matcher.min_q2 = to_int(k, v); }},
      {"metrics.empty_mr_far",
       [](RunConfig& c, auto& k, auto& v) {
         c.empty_mr_far = one_of(k, v, {"zero", "exclude"}) == "zero" ? metrics::EmptyMrFar::kZero
                                                                      : metrics::EmptyMrFar::kExclude;
       }},
      {"translate.source", [](RunConfig& c, auto&, auto& v) { c.source_language = v; }},
      {"translate.target", [](RunConfig& c, auto&, auto& v) { c.target_language = v; }},
      {"sink.kind", [](RunConfig& c, auto& k, auto& v) { c.sink.kind = one_of(k, v, {"file", "http_platform"}); }},
      {"sink.endpoint", [](RunConfig& c, auto&, auto& v) { c.sink.endpoint = v; }},
      {"sink.token_env", [](RunConfig& c, auto&, auto& v) { c.sink.token_env = v; }},
  };
  return table;
}

// TOML habits: quoted values and trailing " # comment".
std::string clean_value(std::string v) {
  v = trim(v);
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) return v.substr(1, v.size() - 2);
  if (auto hash = v.find(" #"); hash != std::string::npos) v = trim(v.substr(0, hash));
  return v;
}

std::string resolve(const fs::path& base, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (base / p).lexically_normal().string();
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& [name, set] : setters()) {
    if (name == key) {
      set(cfg, key, value);
      return;
    }
  }
  throw ConfigError("unknown setting '" + key + "'");
}

std::vector<std::string> setting_keys() {
  std::vector<std::string> out;
  for (const auto& [name, set] : setters()) out.push_back(name);
  return out;
}

void load_config_into(RunConfig& cfg, const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  std::vector<std::pair<std::string, std::string>> entries;
  if (path.extension() == ".json") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(path.string() + ": expected an object of sections");
    for (const auto& [section, body] : j.items()) {
      if (!body.is_object()) throw ConfigError(path.string() + ": section '" + section + "' must be an object");
      for (const auto& [key, v] : body.items()) {
        entries.emplace_back(section + "." + key, v.is_string() ? v.get<std::string>() : v.dump());
      }
    }
  } else {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
      boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError(path.string() + ": line " + std::to_string(e.line()) + ": " + e.message());
    }
    for (const auto& [section, body] : tree) {
      if (body.empty()) throw ConfigError(path.string() + ": '" + section + "' is outside any [section]");
      for (const auto& [key, v] : body) entries.emplace_back(section + "." + key, clean_value(v.data()));
    }
  }

  const fs::path base = path.parent_path();
  for (const auto& [key, value] : entries) {
    bool is_path = key == "run.dataset" || key == "run.output" || key == "backend.mock_script";
    apply_setting(cfg, key, is_path ? resolve(base, value) : value);
  }
}

RunConfig load_config(const fs::path& path) {
  RunConfig cfg;
  load_config_into(cfg, path);
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  filter::validate(cfg.filter);
  if (cfg.reviewers < 1) throw ConfigError("run.reviewers must be at least 1");
  if (cfg.workers < 1) throw ConfigError("run.workers must be at least 1");
  if (cfg.matcher.slack < 0) throw ConfigError("matcher.slack must be >= 0");
  if (cfg.dataset.empty()) throw ConfigError("run.dataset is not set");
  std::error_code ec;
  if (!fs::is_directory(cfg.dataset, ec)) throw ConfigError("dataset directory not found: " + cfg.dataset);
  if (cfg.backend.kind == "mock") {
    if (cfg.backend.mock_script.empty()) throw ConfigError("backend.mock_script is required for the mock backend");
    if (!fs::is_regular_file(cfg.backend.mock_script, ec)) {
      throw ConfigError("mock script not found: " + cfg.backend.mock_script);
    }
  } else if (cfg.backend.http.endpoint.empty()) {
    throw ConfigError("backend.endpoint is required for the http backend");
  }
  if (cfg.sink.kind == "http_platform" && cfg.sink.endpoint.empty()) {
    throw ConfigError("sink.endpoint is required for the http_platform sink");
  }
}

nlohmann::json config_to_json(const RunConfig& cfg) {
  auto role = [](const llm::RoleConfig& r) {
    return nlohmann::json{{"model", r.model}, {"temperature", r.temperature}, {"max_output_tokens", r.max_output_tokens}};
  };
  nlohmann::json backend = {{"kind", cfg.backend.kind}};
  if (cfg.backend.kind == "mock") {
    backend["mock_script"] = fs::path(cfg.backend.mock_script).filename().string();
  } else {
    backend["endpoint"] = cfg.backend.http.endpoint;
    backend["max_retries"] = cfg.backend.http.max_retries;
  }
  return {{"dataset", fs::path(cfg.dataset).filename().string()},
          {"slicing", slicer::slicing_option_name(cfg.slicing)},
          {"position", render::render_mode_name(cfg.render_mode)},
          {"frontend", cfg.frontend},
          {"reviewers", cfg.reviewers},
          {"validator", cfg.validator},
          {"filter",
           {{"coarse_threshold", cfg.filter.coarse_threshold},
            {"top_k", cfg.filter.top_k},
            {"min_support", cfg.filter.min_support},
            {"validator_threshold", cfg.filter.validator_threshold}}},
          {"backend", backend},
          {"roles",
           {{"reviewer", role(cfg.reviewer_role)},
            {"meta", role(cfg.meta_role)},
            {"validator", role(cfg.validator_role)},
            {"translator", role(cfg.translator_role)}}},
          {"meta_strategy", cfg.meta_strategy},
          {"matcher", {{"id", cfg.matcher.id}, {"slack", cfg.matcher.slack}, {"min_q2", cfg.matcher.min_q2}}},
          {"empty_mr_far", cfg.empty_mr_far == metrics::EmptyMrFar::kZero ? "zero" : "exclude"},
          {"translate", {{"source", cfg.source_language}, {"target", cfg.target_language}}},
          {"sink", cfg.sink.kind},
          {"prompts", llm::prompt_hashes()}};
}

}  // namespace slicereview::harness
