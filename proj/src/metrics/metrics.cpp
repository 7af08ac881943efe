#include "metrics/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "common/text.hpp"

namespace slicereview::metrics {

using llm::ReviewComment;

bool heuristic_match(const ReviewComment& c, const KeyBug& bug, const MatcherConfig& cfg) {
  if (c.q2 < cfg.min_q2) return false;
  if (std::find(bug.files.begin(), bug.files.end(), c.file) == bug.files.end()) return false;
  return std::any_of(bug.line_ranges.begin(), bug.line_ranges.end(), [&](const LineRange& r) {
    return c.start_line <= r.end + cfg.slack && c.end_line >= r.start - cfg.slack;
  });
}

MatchResult match_key_bug(const std::vector<ReviewComment>& comments, const FaultCase& fault,
                          const MatcherConfig& cfg, const JudgeFn& judge) {
  if (cfg.id != "heuristic" && cfg.id != "llm_judge") throw ConfigError("unknown matcher '" + cfg.id + "'");
  MatchResult out;
  bool use_judge = cfg.id == "llm_judge";
  if (use_judge && !judge) {
    out.judge_fell_back = true;
    use_judge = false;
  }
  if (use_judge) {
    try {
      for (const auto& c : comments) {
        if (judge(c)) out.matched_ids.push_back(c.id);
      }
    } catch (const Error&) {
      out.matched_ids.clear();
      out.judge_fell_back = true;
      use_judge = false;
    }
  }
  if (!use_judge) {
    for (const auto& c : comments) {
      if (heuristic_match(c, fault.key_bug, cfg)) out.matched_ids.push_back(c.id);
    }
  }
  out.recalled = !out.matched_ids.empty();
  return out;
}

bool lines_valid(const ReviewComment& c, const LineTables& tables) {
  if (c.start_line > c.end_line) return false;
  auto it = tables.find(c.file);
  return it != tables.end() && it->second.contains(c.start_line) && it->second.contains(c.end_line);
}

Percent compute_kbi(const std::vector<MrResult>& results) {
  if (results.empty()) return std::nullopt;
  auto recalled = std::count_if(results.begin(), results.end(), [](const MrResult& r) { return r.match.recalled; });
  return 100.0 * static_cast<double>(recalled) / static_cast<double>(results.size());
}

double mr_false_alarm_rate(const MrResult& r) {
  if (r.comments.empty()) return 0.0;
  double total = static_cast<double>(r.comments.size());
  double matched = static_cast<double>(r.match.recalled ? r.match.matched_ids.size() : 0);
  return 100.0 * (total - matched) / total;
}

Percent compute_far(const std::vector<MrResult>& results, int variant, EmptyMrFar empty) {
  if (variant != 1 && variant != 2) throw Error(ErrorCode::kInvalidArgument, "FAR variant must be 1 or 2");
  double sum = 0.0;
  int count = 0;
  for (const auto& r : results) {
    if (variant == 2 && !r.match.recalled) continue;
    if (empty == EmptyMrFar::kExclude && r.comments.empty()) continue;
    sum += mr_false_alarm_rate(r);
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

Percent compute_cpi(Percent kbi, Percent far) {
  if (!kbi || !far) return std::nullopt;
  double precision = 100.0 - *far;
  double denom = *kbi + precision;
  if (std::abs(denom) < 1e-12) return std::nullopt;
  return 2.0 * *kbi * precision / denom;
}

Percent compute_lsr(const std::vector<MrResult>& results) {
  double sum = 0.0;
  int count = 0;
  for (const auto& r : results) {
    if (r.comments.empty()) continue;
    auto valid = std::count(r.line_validity.begin(), r.line_validity.end(), true);
    sum += 100.0 * static_cast<double>(valid) / static_cast<double>(r.comments.size());
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

MetricsReport build_report(const std::vector<MrResult>& results, const nlohmann::json& config,
                           std::vector<FailedMr> failed, EmptyMrFar empty) {
  MetricsReport rep;
  rep.n = static_cast<int>(results.size());
  rep.m = static_cast<int>(std::count_if(results.begin(), results.end(), [](const auto& r) { return r.match.recalled; }));
  rep.kbi = compute_kbi(results);
  rep.far1 = compute_far(results, 1, empty);
  rep.far2 = compute_far(results, 2, empty);
  rep.cpi1 = compute_cpi(rep.kbi, rep.far1);
  rep.cpi2 = compute_cpi(rep.kbi, rep.far2);
  rep.lsr = compute_lsr(results);
  rep.config = config;
  rep.failed = std::move(failed);
  if (rep.n == 0) rep.warnings.push_back("no merge request completed");
  for (const auto& r : results) {
    if (r.match.judge_fell_back) rep.warnings.push_back(r.mr_id + ": llm_judge unavailable, heuristic matcher used");
    MrRow row;
    row.mr_id = r.mr_id;
    row.category = r.category;
    row.comments = static_cast<int>(r.comments.size());
    row.matched = static_cast<int>(r.match.matched_ids.size());
    row.recalled = r.match.recalled;
    row.far = mr_false_alarm_rate(r);
    row.lsr = compute_lsr({r});
    rep.per_mr.push_back(std::move(row));
  }
  return rep;
}

std::string format_percent(Percent p) { return p ? format_fixed(*p, 2) : "--"; }

namespace {

Percent parse_percent(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) throw DatasetError(std::string("report field '") + key + "' missing");
  auto s = j[key].get<std::string>();
  if (s == "--") return std::nullopt;
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DatasetError(std::string("report field '") + key + "' is not a number: " + s);
  }
}

std::string pad(const std::string& s, size_t width) { return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' '); }

}  // namespace

nlohmann::json report_to_json(const MetricsReport& r) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& row : r.per_mr) {
    per.push_back({{"mr_id", row.mr_id},
                   {"category", row.category},
                   {"comments", row.comments},
                   {"matched", row.matched},
                   {"recalled", row.recalled},
                   {"far", format_fixed(row.far, 2)},
                   {"lsr", format_percent(row.lsr)}});
  }
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& f : r.failed) failed.push_back({{"mr_id", f.mr_id}, {"error", f.error}});
  return {{"metrics",
           {{"N", r.n},
            {"M", r.m},
            {"KBI", format_percent(r.kbi)},
            {"FAR1", format_percent(r.far1)},
            {"CPI1", format_percent(r.cpi1)},
            {"FAR2", format_percent(r.far2)},
            {"CPI2", format_percent(r.cpi2)},
            {"LSR", format_percent(r.lsr)}}},
          {"per_mr", per},
          {"failed", failed},
          {"warnings", r.warnings},
          {"config", r.config}};
}

MetricsReport report_from_json(const nlohmann::json& j) {
  try {
    MetricsReport r;
    const auto& m = j.at("metrics");
    r.n = m.at("N").get<int>();
    r.m = m.at("M").get<int>();
    r.kbi = parse_percent(m, "KBI");
    r.far1 = parse_percent(m, "FAR1");
    r.cpi1 = parse_percent(m, "CPI1");
    r.far2 = parse_percent(m, "FAR2");
    r.cpi2 = parse_percent(m, "CPI2");
    r.lsr = parse_percent(m, "LSR");
    for (const auto& row : j.at("per_mr")) {
      MrRow mr;
      mr.mr_id = row.at("mr_id").get<std::string>();
      mr.category = row.at("category").get<std::string>();
      mr.comments = row.at("comments").get<int>();
      mr.matched = row.at("matched").get<int>();
      mr.recalled = row.at("recalled").get<bool>();
      auto far = parse_percent(row, "far");
      if (!far) throw DatasetError("per-MR far cannot be undefined");
      mr.far = *far;
      mr.lsr = parse_percent(row, "lsr");
      r.per_mr.push_back(std::move(mr));
    }
    for (const auto& f : j.at("failed")) r.failed.push_back({f.at("mr_id").get<std::string>(), f.at("error").get<std::string>()});
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.config = j.at("config");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(std::string("malformed report: ") + e.what());
  }
}

std::string report_to_text(const MetricsReport& r) {
  std::string out;
  const std::vector<std::string> head = {"N", "M", "KBI", "FAR1", "CPI1", "FAR2", "CPI2", "LSR"};
  const std::vector<std::string> vals = {std::to_string(r.n),   std::to_string(r.m),    format_percent(r.kbi),
                                         format_percent(r.far1), format_percent(r.cpi1), format_percent(r.far2),
                                         format_percent(r.cpi2), format_percent(r.lsr)};
  std::string line1, line2;
  for (size_t i = 0; i < head.size(); ++i) {
    size_t w = i < 2 ? 5 : 8;
    line1 += pad(head[i], w);
    line2 += pad(vals[i], w);
  }
  out += trim(line1) + "\n" + trim(line2) + "\n";

  if (!r.per_mr.empty()) {
    size_t idw = 6;
    for (const auto& row : r.per_mr) idw = std::max(idw, row.mr_id.size() + 2);
    out += "\n" + pad("MR", idw) + pad("CATEGORY", 13) + pad("COMMENTS", 10) + pad("MATCHED", 9) + pad("RECALLED", 10) +
           pad("FAR", 8) + "LSR\n";
    for (const auto& row : r.per_mr) {
      out += pad(row.mr_id, idw) + pad(row.category.empty() ? "-" : row.category, 13) +
             pad(std::to_string(row.comments), 10) + pad(std::to_string(row.matched), 9) +
             pad(row.recalled ? "yes" : "no", 10) + pad(format_fixed(row.far, 2), 8) + format_percent(row.lsr) + "\n";
    }
  }
  if (!r.failed.empty()) {
    out += "\nFailed:\n";
    for (const auto& f : r.failed) out += "  " + f.mr_id + ": " + f.error + "\n";
  }
  for (const auto& w : r.warnings) out += "warning: " + w + "\n";
  return out;
}

}  // namespace slicereview::metrics
