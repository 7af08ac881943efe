#include "llm/roles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "common/error.hpp"
#include "common/text.hpp"
#include "llm/prompts.hpp"

namespace slicereview::llm {

nlohmann::json transcript_to_json(const RoleTranscript& t) {
  nlohmann::json exchanges = nlohmann::json::array();
  for (const auto& e : t.exchanges) {
    auto j = exchange_to_json(e.request);
    j["response"] = e.response;
    j["prompt_tokens"] = e.prompt_tokens;
    j["completion_tokens"] = e.completion_tokens;
    exchanges.push_back(std::move(j));
  }
  return {{"role", t.role},
          {"participant", t.participant},
          {"exchanges", exchanges},
          {"parsed", t.parsed},
          {"prompt_tokens", t.prompt_tokens},
          {"completion_tokens", t.completion_tokens},
          {"retry_count", t.retry_count},
          {"errors", t.errors}};
}

namespace {

// One multi-turn chat: every answer is appended so later stages see the
// earlier reasoning.
class Conversation {
 public:
  Conversation(ChatBackend& backend, const RoleConfig& cfg, RoleTranscript& transcript, std::string system)
      : backend_(backend), cfg_(cfg), t_(transcript) {
    messages_.push_back({"system", std::move(system)});
  }

  std::string ask(const std::string& stage, std::string user, int attempt = 0) {
    messages_.push_back({"user", std::move(user)});
    ChatExchange ex;
    ex.messages = messages_;
    ex.model_id = cfg_.model;
    ex.temperature = cfg_.temperature;
    ex.max_output_tokens = cfg_.max_output_tokens;
    ex.role = t_.role;
    ex.stage = stage;
    ex.participant = t_.participant;
    ex.attempt = attempt;
    ChatResult r = backend_.chat(ex);
    t_.exchanges.push_back({ex, r.text, r.prompt_tokens, r.completion_tokens});
    t_.prompt_tokens += r.prompt_tokens;
    t_.completion_tokens += r.completion_tokens;
    messages_.push_back({"assistant", r.text});
    return r.text;
  }

  // Parses the answer as a comment array, re-asking with a format reminder
  // up to kJsonRetries times. Throws CommentParseError when all fail.
  ParsedComments ask_json(const std::string& stage, std::string user) {
    std::string text = ask(stage, std::move(user));
    for (int attempt = 1;; ++attempt) {
      try {
        auto parsed = parse_comment_json(text);
        for (const auto& r : parsed.rejected) t_.errors.push_back("rejected " + r);
        return parsed;
      } catch (const CommentParseError& e) {
        t_.errors.push_back(std::string("stage ") + stage + ": " + e.what());
        if (attempt > kJsonRetries) throw;
        ++t_.retry_count;
        text = ask(stage, fill_prompt("format_reminder", {{"error", e.what()}}), attempt);
      }
    }
  }

 private:
  ChatBackend& backend_;
  const RoleConfig& cfg_;
  RoleTranscript& t_;
  std::vector<ChatMessage> messages_;
};

std::string position_note(render::RenderMode mode) {
  switch (mode) {
    case render::RenderMode::kInline:
      return "Each code line starts with its line number: ' N|' is unchanged, '+N|' added, '-N|' deleted (old "
             "numbering). A '...|...' row marks omitted lines.";
    case render::RenderMode::kRelativeList:
      return "Code lines are shown without numbers; a separate list gives each code line's change type and file "
             "line number.";
    case render::RenderMode::kNoPosition:
      return "Line numbers are not shown.";
  }
  return "";
}

std::map<std::string, std::string> slice_vars(const ReviewInput& in) {
  std::string callees;
  if (!in.callee_signatures.empty()) {
    callees = "Called functions:\n";
    for (const auto& s : in.callee_signatures) callees += "  " + s + "\n";
  }
  std::string positions;
  if (in.rendered.position_appendix) {
    positions = "Line positions (code line: change line):\n" + *in.rendered.position_appendix;
  }
  return {{"file", in.file},
          {"code", in.rendered.body},
          {"callees", callees},
          {"positions", positions},
          {"guidance", in.guidance.empty() ? std::string("(none)") : in.guidance},
          {"position_note", position_note(in.mode)}};
}

int rounded_mean(const std::vector<int>& xs) {
  double sum = std::accumulate(xs.begin(), xs.end(), 0.0);
  return static_cast<int>(std::floor(sum / static_cast<double>(xs.size()) + 0.5));
}

void sort_by_q3(std::vector<ReviewComment>& comments) {
  std::stable_sort(comments.begin(), comments.end(),
                   [](const ReviewComment& a, const ReviewComment& b) { return a.q3 > b.q3; });
}

}  // namespace

RoleOutput run_reviewer(ChatBackend& backend, const RoleConfig& cfg, const ReviewInput& input, int reviewer_index) {
  RoleOutput out;
  out.transcript.role = "reviewer";
  out.transcript.participant = reviewer_index;
  auto vars = slice_vars(input);
  vars["reviewer_index"] = std::to_string(reviewer_index);

  Conversation chat(backend, cfg, out.transcript, fill_prompt("reviewer_system", vars));
  chat.ask("understand", fill_prompt("reviewer_understand", vars));
  chat.ask("analyze", fill_prompt("reviewer_analyze", vars));
  chat.ask("reevaluate", fill_prompt("reviewer_reevaluate", vars));
  chat.ask("organize", fill_prompt("reviewer_organize", vars));
  ParsedComments parsed;
  try {
    parsed = chat.ask_json("final", fill_prompt("reviewer_final", vars));
  } catch (const CommentParseError&) {
    return out;
  }
  const std::string who = "reviewer-" + std::to_string(reviewer_index);
  for (size_t k = 0; k < parsed.comments.size(); ++k) {
    auto c = parsed.comments[k];
    c.id = "s" + std::to_string(input.slice_id) + "-r" + std::to_string(reviewer_index) + "-" + std::to_string(k);
    c.source_reviewer = who;
    c.support_count = 1;
    out.comments.push_back(std::move(c));
  }
  out.transcript.parsed = comments_to_json(out.comments);
  return out;
}

std::vector<ReviewComment> merge_comment_sets(const std::vector<std::vector<ReviewComment>>& comment_sets) {
  std::vector<ReviewComment> flat;
  for (const auto& set : comment_sets) flat.insert(flat.end(), set.begin(), set.end());

  std::vector<size_t> parent(flat.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (size_t i = 0; i < flat.size(); ++i) {
    for (size_t j = i + 1; j < flat.size(); ++j) {
      const auto& a = flat[i];
      const auto& b = flat[j];
      if (a.file == b.file && a.category == b.category && a.start_line <= b.end_line && b.start_line <= a.end_line) {
        size_t ra = find(i), rb = find(j);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
    }
  }

  std::map<size_t, std::vector<size_t>> groups;  // root is the earliest member
  for (size_t i = 0; i < flat.size(); ++i) groups[find(i)].push_back(i);

  struct Merged {
    ReviewComment comment;
    double mean_q3;
  };
  std::vector<Merged> merged;
  for (const auto& [root, members] : groups) {
    ReviewComment c = flat[root];
    std::vector<int> q1, q2, q3;
    std::set<std::string> reviewers;
    for (size_t m : members) {
      c.start_line = std::min(c.start_line, flat[m].start_line);
      c.end_line = std::max(c.end_line, flat[m].end_line);
      q1.push_back(flat[m].q1);
      q2.push_back(flat[m].q2);
      q3.push_back(flat[m].q3);
      reviewers.insert(flat[m].source_reviewer);
    }
    c.q1 = rounded_mean(q1);
    c.q2 = rounded_mean(q2);
    c.q3 = rounded_mean(q3);
    c.support_count = static_cast<int>(reviewers.size());
    c.source_reviewer.clear();
    for (const auto& r : reviewers) c.source_reviewer += (c.source_reviewer.empty() ? "" : ",") + r;
    double mean = std::accumulate(q3.begin(), q3.end(), 0.0) / static_cast<double>(q3.size());
    merged.push_back({std::move(c), mean});
  }
  std::stable_sort(merged.begin(), merged.end(), [](const Merged& a, const Merged& b) { return a.mean_q3 > b.mean_q3; });

  std::vector<ReviewComment> out;
  for (auto& m : merged) out.push_back(std::move(m.comment));
  return out;
}

RoleOutput run_meta_reviewer(ChatBackend& backend, const RoleConfig& cfg,
                             const std::vector<std::vector<ReviewComment>>& comment_sets, const ReviewInput& input,
                             MergeStrategy strategy) {
  RoleOutput out;
  out.transcript.role = "meta_reviewer";
  bool any = std::any_of(comment_sets.begin(), comment_sets.end(), [](const auto& s) { return !s.empty(); });
  if (!any) return out;
  if (comment_sets.size() == 1) {
    out.comments = comment_sets.front();
    for (auto& c : out.comments) c.support_count = 1;
    out.transcript.parsed = comments_to_json(out.comments);
    return out;
  }
  if (strategy == MergeStrategy::kDeterministic) {
    out.comments = merge_comment_sets(comment_sets);
    out.transcript.parsed = comments_to_json(out.comments);
    return out;
  }

  nlohmann::json all = nlohmann::json::array();
  for (const auto& set : comment_sets) {
    for (const auto& c : set) all.push_back(comment_to_json(c));
  }
  auto vars = slice_vars(input);
  vars["comments"] = all.dump(2);
  Conversation chat(backend, cfg, out.transcript, fill_prompt("meta_system", vars));
  chat.ask("analyze", fill_prompt("meta_analyze", vars));
  ParsedComments parsed;
  try {
    parsed = chat.ask_json("organize", fill_prompt("meta_organize", vars));
  } catch (const CommentParseError&) {
    return out;
  }
  const int reviewers = static_cast<int>(comment_sets.size());
  for (size_t k = 0; k < parsed.comments.size(); ++k) {
    auto c = parsed.comments[k];
    c.support_count = std::clamp(c.support_count, 1, reviewers);
    if (c.id.empty()) c.id = "s" + std::to_string(input.slice_id) + "-m-" + std::to_string(k);
    if (c.source_reviewer.empty()) c.source_reviewer = "meta_reviewer";
    out.comments.push_back(std::move(c));
  }
  sort_by_q3(out.comments);
  out.transcript.parsed = comments_to_json(out.comments);
  return out;
}

RoleOutput run_validator(ChatBackend& backend, const RoleConfig& cfg, const std::vector<ReviewComment>& comments,
                         const ReviewInput& input) {
  RoleOutput out;
  out.transcript.role = "validator";
  if (comments.empty()) return out;

  auto vars = slice_vars(input);
  vars["comments"] = comments_to_json(comments).dump(2);
  Conversation chat(backend, cfg, out.transcript, fill_prompt("validator_system", vars));
  chat.ask("validate", fill_prompt("validator_validate", vars));
  chat.ask("refine", fill_prompt("validator_refine", vars));
  ParsedComments parsed;
  try {
    parsed = chat.ask_json("final", fill_prompt("validator_final", vars));
  } catch (const CommentParseError&) {
    return out;
  }

  std::vector<const ReviewComment*> answer(comments.size(), nullptr);
  for (const auto& v : parsed.comments) {
    auto match = std::find_if(comments.begin(), comments.end(), [&](const ReviewComment& c) {
      return !v.id.empty() ? c.id == v.id
                           : c.file == v.file && c.start_line == v.start_line && c.end_line == v.end_line;
    });
    if (match == comments.end()) {
      out.transcript.errors.push_back("validator answered for unknown comment '" + v.id + "'");
      continue;
    }
    auto& slot = answer[static_cast<size_t>(match - comments.begin())];
    if (!slot) slot = &v;
  }
  for (size_t i = 0; i < comments.size(); ++i) {
    if (!answer[i]) {
      out.transcript.errors.push_back("validator dropped comment '" + comments[i].id + "'");
      continue;
    }
    const auto& in = comments[i];
    const auto& v = *answer[i];
    ReviewComment c = in;
    c.q1 = v.q1;
    c.q2 = v.q2;
    c.q3 = v.q3;
    if (!v.title.empty()) c.title = v.title;
    c.issue = v.issue;
    c.root_cause = v.root_cause;
    c.suggestion = v.suggestion;
    if (v.example_code) c.example_code = v.example_code;
    out.comments.push_back(std::move(c));
  }
  sort_by_q3(out.comments);
  out.transcript.parsed = comments_to_json(out.comments);
  return out;
}

RoleOutput run_translator(ChatBackend& backend, const RoleConfig& cfg, const std::vector<ReviewComment>& comments,
                          const std::string& source_language, const std::string& target_language) {
  RoleOutput out;
  out.transcript.role = "translator";
  if (comments.empty() || target_language.empty() || target_language == source_language) {
    out.comments = comments;
    return out;
  }
  std::map<std::string, std::string> vars = {{"language", target_language},
                                             {"comments", comments_to_json(comments).dump(2)}};
  Conversation chat(backend, cfg, out.transcript, fill_prompt("translator_system", vars));
  ParsedComments parsed;
  try {
    chat.ask("requirements", fill_prompt("translator_requirements", vars));
    parsed = chat.ask_json("output", fill_prompt("translator_output", vars));
  } catch (const CommentParseError&) {
    out.transcript.errors.push_back("translation unreadable; comments delivered untranslated");
    out.comments = comments;
    return out;
  }
  for (size_t i = 0; i < comments.size(); ++i) {
    ReviewComment c = comments[i];
    auto t = std::find_if(parsed.comments.begin(), parsed.comments.end(),
                          [&](const ReviewComment& r) { return !r.id.empty() && r.id == c.id; });
    const ReviewComment* src = t != parsed.comments.end() ? &*t
                               : i < parsed.comments.size() && parsed.comments[i].id.empty() ? &parsed.comments[i]
                                                                                             : nullptr;
    if (!src) {
      out.transcript.errors.push_back("no translation for comment '" + c.id + "'");
    } else {
      c.title = src->title;
      c.issue = src->issue;
      c.root_cause = src->root_cause;
      c.suggestion = src->suggestion;
    }
    out.comments.push_back(std::move(c));
  }
  out.transcript.parsed = comments_to_json(out.comments);
  return out;
}

bool run_judge(ChatBackend& backend, const RoleConfig& cfg, const JudgeQuestion& question,
               const ReviewComment& comment, RoleTranscript& transcript) {
  transcript.role = "judge";
  std::string files;
  for (const auto& f : question.files) files += (files.empty() ? "" : ", ") + f;
  std::map<std::string, std::string> vars = {{"files", files},
                                             {"lines", question.lines},
                                             {"description", question.description},
                                             {"root_cause", question.root_cause},
                                             {"file", comment.file},
                                             {"start_line", std::to_string(comment.start_line)},
                                             {"end_line", std::to_string(comment.end_line)},
                                             {"issue", comment.issue},
                                             {"comment_root_cause", comment.root_cause}};
  Conversation chat(backend, cfg, transcript, "You judge whether code review comments find a known bug.");
  std::string answer = trim(chat.ask("judge", fill_prompt("judge", vars)));
  std::transform(answer.begin(), answer.end(), answer.begin(), [](unsigned char ch) { return std::toupper(ch); });
  return starts_with(answer, "YES");
}

}  // namespace slicereview::llm
