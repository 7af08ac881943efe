// Acceptance checks. Prints one PASS, FAIL or SKIP line per criterion with
// its wall time; diagnostics for failures go above the verdict line.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iterator>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "common/error.hpp"
#include "common/hash.hpp"
#include "filter/filter.hpp"
#include "harness/config.hpp"
#include "harness/pipeline.hpp"
#include "llm/backend.hpp"
#include "llm/roles.hpp"
#include "metrics/metrics.hpp"
#include "render/render.hpp"
#include "slice_scenarios.hpp"

using namespace slicereview;
namespace fs = std::filesystem;
using slicer::SlicingOption;

namespace {

constexpr SlicingOption kOptions[] = {SlicingOption::kOriginalDiff, SlicingOption::kParentFunction,
                                      SlicingOption::kLeftFlow, SlicingOption::kFullFlow};

fs::path fixture(const std::string& rel) { return fs::path(SR_FIXTURES) / rel; }

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("slicereview-acceptance-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

enum class Verdict { kPass, kFail, kSkip };

struct Outcome {
  Verdict verdict = Verdict::kPass;
  std::string detail;
};

// Collects failure messages; at most `cap` are echoed.
struct Failures {
  int count = 0;
  int cap = 10;
  void add(const std::string& msg) {
    if (count++ < cap) std::cout << "  - " << msg << "\n";
  }
};

int failed_criteria = 0;

void run(int number, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {Verdict::kFail, std::string("unexpected exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (out.verdict == Verdict::kPass && secs > budget_s) {
    out = {Verdict::kFail, out.detail + "; over the " + std::to_string(budget_s) + " s budget"};
  }
  const char* tag = out.verdict == Verdict::kPass ? "PASS" : out.verdict == Verdict::kFail ? "FAIL" : "SKIP";
  if (out.verdict == Verdict::kFail) ++failed_criteria;
  std::ostringstream t;
  t.setf(std::ios::fixed);
  t.precision(3);
  t << secs;
  std::cout << tag << " " << number << " " << name << " (" << t.str() << " s): " << out.detail << "\n" << std::flush;
}

// 1. CPI from every printed (KBI, FAR) pair.

metrics::Percent cell(const std::string& s) { return s == "--" ? metrics::Percent{} : metrics::Percent{std::stod(s)}; }

// Compared at the printed precision: two decimals, then the 0.02 tolerance.
bool close_printed(double computed, double printed) {
  return std::abs(std::round(computed * 100.0) / 100.0 - printed) <= 0.02 + 1e-9;
}

Outcome metric_arithmetic() {
  // Main-text tables that print KBI, FAR and CPI side by side.
  const std::set<std::string> in_scope = {"baselines", "review_num", "self-correction", "cot", "comment-filter",
                                          "position"};
  std::ifstream in(fixture("metrics/cpi_rows.tsv"));
  if (!in) return {Verdict::kFail, "fixture missing"};
  int checked = 0, bad = 0, extra_checked = 0, extra_bad = 0;
  Failures fails{0, 40};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string part; std::getline(ss, part, '\t');) f.push_back(part);
    if (f.size() != 7) return {Verdict::kFail, "malformed row: " + line};
    auto got = metrics::compute_cpi(cell(f[4]), cell(f[5]));
    auto want = cell(f[6]);
    bool ok = got.has_value() == want.has_value() && (!want || close_printed(*got, *want));
    bool scoped = in_scope.contains(f[0]);
    (scoped ? checked : extra_checked)++;
    if (ok) continue;
    (scoped ? bad : extra_bad)++;
    std::string msg = f[0] + " / " + f[1] + " / " + f[2] + " CPI" + f[3] + ": KBI " + f[4] + ", FAR " + f[5] +
                      " printed " + f[6] + ", computed " + metrics::format_percent(got);
    if (scoped) {
      fails.add(msg);
    } else {
      std::cout << "  (appendix) " << msg << "\n";
    }
  }
  for (auto [kbi, far, want] : {std::tuple{20.00, 75.37, 22.07}, std::tuple{31.11, 87.81, 17.51}}) {
    auto got = metrics::compute_cpi(kbi, far);
    ++checked;
    if (!got || !close_printed(*got, want)) {
      ++bad;
      fails.add("worked example " + std::to_string(kbi) + ", " + std::to_string(far));
    }
  }
  std::string detail = std::to_string(checked - bad) + "/" + std::to_string(checked) +
                       " printed CPI values reproduced within 0.02; appendix tables " +
                       std::to_string(extra_checked - extra_bad) + "/" + std::to_string(extra_checked) +
                       " (informational)";
  return {bad == 0 ? Verdict::kPass : Verdict::kFail, detail};
}

// 2. Filter cascade properties on random comment lists.

std::vector<llm::ReviewComment> random_list(std::mt19937& rng) {
  std::uniform_int_distribution<int> len(0, 15), q(1, 7), sup(1, 3), line(1, 60), who(1, 3);
  std::vector<llm::ReviewComment> out(len(rng));
  for (size_t i = 0; i < out.size(); ++i) {
    auto& c = out[i];
    c.id = "c" + std::to_string(i);
    c.file = "f.mini";
    c.start_line = line(rng);
    c.end_line = c.start_line + line(rng) % 3;
    c.title = c.id;
    c.issue = "issue";
    c.category = "logic";
    c.q1 = q(rng);
    c.q2 = q(rng);
    c.q3 = q(rng);
    c.support_count = sup(rng);
    c.source_reviewer = "reviewer-" + std::to_string(who(rng));
  }
  return out;
}

std::vector<llm::ReviewComment> by_q3(std::vector<llm::ReviewComment> v) {
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.q3 > b.q3; });
  return v;
}

Outcome filter_cascade() {
  std::mt19937 rng(20240611);
  filter::FilterConfig cfg;
  Failures fails;
  const int kLists = 10000;
  for (int n = 0; n < kLists; ++n) {
    auto list = random_list(rng);
    auto tag = "list " + std::to_string(n);

    std::vector<llm::ReviewComment> keep;
    std::copy_if(list.begin(), list.end(), std::back_inserter(keep), [](const auto& c) { return c.q1 > 4 && c.q2 > 4; });
    auto coarse = filter::coarse_filter(list, cfg);
    if (coarse != keep) fails.add(tag + ": coarse filter differs from q1>4 and q2>4");
    if (filter::coarse_filter(coarse, cfg) != coarse) fails.add(tag + ": coarse filter not idempotent");

    int k = static_cast<int>(rng() % 9);
    auto sorted = by_q3(list);
    auto top = filter::topk_truncate(list, k);
    auto want = std::vector<llm::ReviewComment>(sorted.begin(), sorted.begin() + std::min<size_t>(k, sorted.size()));
    if (top != want) fails.add(tag + ": top-" + std::to_string(k) + " is not the stable q3 prefix");
    auto longer = filter::topk_truncate(list, k + 1);
    if (!std::equal(top.begin(), top.end(), longer.begin())) fails.add(tag + ": top-k not a prefix of top-(k+1)");

    std::vector<llm::ReviewComment> supported;
    std::copy_if(list.begin(), list.end(), std::back_inserter(supported), [](const auto& c) { return c.support_count >= 2; });
    if (filter::merge_support_filter(list, cfg, 3) != supported) fails.add(tag + ": support filter kept a lone comment");
    if (filter::merge_support_filter(list, cfg, 1) != list) fails.add(tag + ": single reviewer list changed");

    auto validated = filter::post_validate_filter(list, cfg);
    if (validated != by_q3(keep)) fails.add(tag + ": post-validation threshold differs");
    if (filter::post_validate_filter(validated, cfg) != validated) fails.add(tag + ": post-validation not idempotent");
  }
  return {fails.count == 0 ? Verdict::kPass : Verdict::kFail,
          std::to_string(kLists) + " random lists, " + std::to_string(fails.count) + " violations"};
}

// 3. Slicer against hand traces plus invariants on random programs.

// A random mini program: a few functions over a small variable pool with
// nested conditions and loops. Simple statements are marked added or
// deleted at random; brace lines are always kept so both images parse.
std::vector<ScenarioFile> random_program(std::mt19937& rng) {
  const std::vector<std::string> vars = {"a", "b", "c", "d", "e"};
  auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };
  auto chance = [&](int pct) { return static_cast<int>(rng() % 100) < pct; };
  std::vector<std::string> lines;
  auto simple = [&](const std::string& indent) {
    std::string stmt;
    switch (rng() % 5) {
      case 0: stmt = "var " + pick(vars) + " = " + pick(vars) + " + " + std::to_string(rng() % 9) + ";"; break;
      case 1: stmt = pick(vars) + " = " + pick(vars) + " * " + pick(vars) + ";"; break;
      case 2: stmt = "emit(" + pick(vars) + ", " + pick(vars) + ");"; break;
      case 3: stmt = pick(vars) + " = helper(" + pick(vars) + ");"; break;
      default: stmt = pick(vars) + " = " + pick(vars) + ";"; break;
    }
    char mark = chance(15) ? '+' : chance(8) ? '-' : ' ';
    lines.push_back(std::string(1, mark) + indent + stmt);
  };
  std::function<void(int, std::string)> block = [&](int depth, const std::string& indent) {
    int n = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i) {
      if (depth < 3 && chance(25)) {
        bool loop = chance(40);
        lines.push_back(" " + indent + (loop ? "while (" : "if (") + pick(vars) + " > " + pick(vars) + ") {");
        block(depth + 1, indent + "  ");
        if (!loop && chance(30)) {
          lines.push_back(" " + indent + "} else {");
          block(depth + 1, indent + "  ");
        }
        lines.push_back(" " + indent + "}");
      } else {
        simple(indent);
      }
    }
  };
  if (chance(50)) lines.push_back(std::string(chance(20) ? "+" : " ") + "var e = 1;");
  lines.push_back(" fn helper(k) {");
  lines.push_back("   return k;");
  lines.push_back(" }");
  int fns = 1 + static_cast<int>(rng() % 3);
  for (int f = 0; f < fns; ++f) {
    lines.push_back(" fn f" + std::to_string(f) + "(a, b) {");
    block(0, "  ");
    lines.push_back("   return " + pick(vars) + ";");
    lines.push_back(" }");
  }
  return {{"r.mini", lines}};
}

Outcome slicer_equivalence() {
  Failures fails;
  int traced = 0;
  for (const auto& t : scenarios::traced()) {
    auto s = make_scenario(*t.files);
    ++traced;
    for (const auto& [opt, want] : t.expect) {
      auto got = scenarios::slice_lines(*s, opt);
      if (got != want) fails.add(std::string(t.name) + " under " + slicer::slicing_option_name(opt) + " differs");
    }
    if (t.expect.size() != 4) fails.add(std::string(t.name) + " lacks an option");
  }

  std::mt19937 rng(7);
  const int kPrograms = 1000;
  int expansions = 0, slices = 0, with_changes = 0;
  for (int p = 0; p < kPrograms; ++p) {
    auto files = random_program(rng);
    auto s = make_scenario(files);
    auto tag = "program " + std::to_string(p);
    if (!s->index.errors().empty()) {
      fails.add(tag + " did not parse: " + s->index.errors()[0].message);
      continue;
    }
    slicer::SliceCache cache;
    slicer::process_ast(*s->ctx, cache);
    auto initial = cache.ids();
    std::sort(initial.begin(), initial.end());
    if (!initial.empty()) ++with_changes;

    for (auto id : initial) {
      std::vector<ast::StatementId> in{id};
      auto lf = slicer::apply_slicing_algorithm(in, SlicingOption::kLeftFlow, *s->ctx).statements;
      auto ff = slicer::apply_slicing_algorithm(in, SlicingOption::kFullFlow, *s->ctx).statements;
      ++expansions;
      if (!std::includes(ff.begin(), ff.end(), lf.begin(), lf.end())) fails.add(tag + ": full flow misses left flow");
    }
    for (auto opt : kOptions) {
      auto out = s->slice(opt);
      slices += static_cast<int>(out.size());
      if (out.size() > initial.size()) fails.add(tag + ": more slices than changed statements");
      std::vector<ast::StatementId> owned;
      for (const auto& sl : out) {
        if (sl.seed.empty()) fails.add(tag + ": slice without seed");
        owned.insert(owned.end(), sl.seed.begin(), sl.seed.end());
        owned.insert(owned.end(), sl.absorbed.begin(), sl.absorbed.end());
        for (auto id : sl.seed) {
          if (std::none_of(sl.members.begin(), sl.members.end(), [&](const auto& m) { return m.id == id; })) {
            fails.add(tag + ": seed missing from its slice");
          }
        }
      }
      std::sort(owned.begin(), owned.end());
      if (owned != initial) {
        fails.add(tag + " under " + slicer::slicing_option_name(opt) + ": slices do not partition the changes");
      }
    }
  }
  std::string detail = std::to_string(traced) + " traced scenarios x 4 options; " + std::to_string(kPrograms) +
                       " random programs (" + std::to_string(with_changes) + " with changes, " +
                       std::to_string(expansions) + " expansions, " + std::to_string(slices) + " slices); " +
                       std::to_string(fails.count) + " violations";
  return {fails.count == 0 && traced >= 8 ? Verdict::kPass : Verdict::kFail, detail};
}

// 4. Inline rendering parses back to the slice rows.

Outcome render_round_trip() {
  Failures fails;
  int checked = 0, with_gaps = 0;
  auto check = [&](const std::string& tag, const slicer::CodeSlice& s) {
    auto r = render::render_slice(s, render::RenderMode::kInline);
    std::vector<render::LineRow> want;
    for (const auto& row : s.rows) want.push_back({row.op, row.line, row.content, false});
    auto parsed = render::parse_inline(r.body);
    if (parsed != want) fails.add(tag + ": parsed rows differ from the slice rows");
    std::vector<render::LineRow> table;
    int gaps = 0;
    for (const auto& row : r.line_table) {
      if (row.ellipsis) {
        ++gaps;
      } else {
        table.push_back(row);
      }
    }
    if (table != want) fails.add(tag + ": line table differs from the slice rows");
    size_t marks = 0;
    for (size_t pos = 0; (pos = r.body.find("...|...", pos)) != std::string::npos; ++pos) ++marks;
    if (static_cast<int>(marks) != gaps) fails.add(tag + ": ellipsis rows do not match the line table");
    with_gaps += gaps > 0;
    ++checked;
  };
  for (const char* c : {"case01", "case02", "case03"}) {
    auto snap = ingest::load_snapshot(fixture("corpus/repo"), c);
    auto hunks = ingest::parse_unified_diff(read_file(fixture(std::string("corpus/diffs/") + c + ".diff")));
    auto changes = ingest::changed_lines(hunks);
    auto index = ast::build_ast_index(snap, "mini", slicer::pre_images_for(snap, hunks));
    for (auto opt : kOptions) {
      for (const auto& s : slicer::code_slicing(snap, changes, index, opt)) {
        check(std::string(c) + "/" + slicer::slicing_option_name(opt), s);
      }
    }
  }
  for (const auto& t : scenarios::traced()) {
    auto sc = make_scenario(*t.files);
    for (auto opt : kOptions) {
      for (const auto& s : sc->slice(opt)) check(std::string(t.name) + "/" + slicer::slicing_option_name(opt), s);
    }
  }
  std::string detail = std::to_string(checked) + " slices (" + std::to_string(with_gaps) + " with gaps), " +
                       std::to_string(fails.count) + " mismatches";
  return {fails.count == 0 && with_gaps > 0 ? Verdict::kPass : Verdict::kFail, detail};
}

// 5. Two mock runs over the corpus.

Outcome end_to_end() {
  std::vector<std::string> hashes;
  metrics::MetricsReport last;
  for (const char* name : {"run-a", "run-b"}) {
    auto cfg = harness::load_config(fixture("corpus/run.ini"));
    cfg.output_dir = scratch(name).string();
    last = harness::run_pipeline(cfg).report;
    hashes.push_back(sha256_hex(read_file(fs::path(cfg.output_dir) / "report.json")));
  }
  auto kbi = metrics::format_percent(last.kbi);
  auto lsr = metrics::format_percent(last.lsr);
  std::string detail = "report sha256 " + hashes[0].substr(0, 16) + (hashes[0] == hashes[1] ? " == " : " != ") +
                       hashes[1].substr(0, 16) + ", KBI " + kbi + ", LSR " + lsr;
  bool ok = hashes[0] == hashes[1] && kbi == "33.33" && lsr == "100.00" && last.n == 3;
  return {ok ? Verdict::kPass : Verdict::kFail, detail};
}

// 6. False alarm conventions.

metrics::MrResult mr_with(int comments, int matched) {
  metrics::MrResult r;
  r.mr_id = "mr" + std::to_string(comments) + "-" + std::to_string(matched);
  for (int i = 0; i < comments; ++i) {
    llm::ReviewComment c;
    c.id = r.mr_id + "-" + std::to_string(i);
    r.comments.push_back(c);
    r.line_validity.push_back(true);
  }
  for (int i = 0; i < matched; ++i) r.match.matched_ids.push_back(r.comments[i].id);
  r.match.recalled = matched > 0;
  return r;
}

Outcome far_conventions() {
  Failures fails;
  auto miss = mr_with(3, 0);
  if (metrics::mr_false_alarm_rate(miss) != 100.0) fails.add("unrecalled MR does not count 100");
  auto far1 = metrics::compute_far({miss, mr_with(4, 1)}, 1);
  if (!far1 || std::abs(*far1 - 87.5) > 1e-9) fails.add("FAR1 of {100, 75} is not 87.50");

  auto none = metrics::build_report({miss, mr_with(2, 0)}, nlohmann::json::object());
  auto j = metrics::report_to_json(none)["metrics"];
  if (none.m != 0) fails.add("M should be 0");
  if (j["FAR2"] != "--" || j["CPI2"] != "--") fails.add("M = 0 does not render FAR2/CPI2 as --");
  if (j["FAR1"] != "100.00") fails.add("FAR1 with no recalls is not 100.00");
  auto text = metrics::report_to_text(none);
  std::istringstream rows(text);
  std::string head, summary;
  std::getline(rows, head);
  std::getline(rows, summary);
  std::istringstream cells(summary);
  std::vector<std::string> v{std::istream_iterator<std::string>(cells), {}};
  if (v.size() < 8 || v[5] != "--" || v[6] != "--") fails.add("text table does not show -- for FAR2/CPI2");
  return {fails.count == 0 ? Verdict::kPass : Verdict::kFail, std::to_string(fails.count) + " violations"};
}

// 7. One slice against a live chat endpoint.

Outcome live_smoke() {
  const char* endpoint = std::getenv("SLICEREVIEW_LIVE_ENDPOINT");
  if (!endpoint || !*endpoint) return {Verdict::kSkip, "SLICEREVIEW_LIVE_ENDPOINT not set"};
  const char* model = std::getenv("SLICEREVIEW_LIVE_MODEL");
  llm::HttpBackendConfig http;
  http.endpoint = endpoint;
  http.api_key_env = "SLICEREVIEW_LIVE_API_KEY";
  http.timeout_seconds = 120;
  http.max_retries = 1;

  auto snap = ingest::load_snapshot(fixture("corpus/repo"), "case01");
  auto hunks = ingest::parse_unified_diff(read_file(fixture("corpus/diffs/case01.diff")));
  auto index = ast::build_ast_index(snap, "mini", slicer::pre_images_for(snap, hunks));
  auto slices = slicer::code_slicing(snap, ingest::changed_lines(hunks), index, SlicingOption::kLeftFlow);
  const auto& slice = slices.back();
  llm::ReviewInput input;
  input.slice_id = slice.id;
  input.file = slice.file;
  input.rendered = render::render_slice(slice, render::RenderMode::kInline);
  input.callee_signatures = slice.callee_signatures;
  try {
    llm::HttpBackend backend(http);
    auto out = llm::run_reviewer(backend, {model ? model : "default", 0.0, 2048}, input, 1);
    for (const auto& c : out.comments) {
      if (auto err = llm::check_comment(c)) return {Verdict::kFail, "schema violation: " + *err};
    }
    if (out.comments.empty()) return {Verdict::kFail, "no comment parsed from the endpoint's answer"};
    return {Verdict::kPass, std::to_string(out.comments.size()) + " schema-valid comments"};
  } catch (const BackendError& e) {
    return {Verdict::kPass, std::string("clean BackendError: ") + e.what()};
  }
}

}  // namespace

int main() {
  run(1, "metric arithmetic", 1, metric_arithmetic);
  run(2, "filter cascade", 10, filter_cascade);
  run(3, "slicer oracle", 30, slicer_equivalence);
  run(4, "render round-trip", 5, render_round_trip);
  run(5, "end-to-end determinism", 60, end_to_end);
  run(6, "false alarm conventions", 1, far_conventions);
  run(7, "live backend smoke", 600, live_smoke);
  return failed_criteria == 0 ? 0 : 1;
}
