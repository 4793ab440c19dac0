#pragma once

// Metrics over agent traces and gold data: pass rate, judge-based success
// and win rates, correct path rate, numeric accuracy with relative
// tolerance, tool-related error rates and the selection-accuracy sweep.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "easytool/agent.hpp"
#include "easytool/error.hpp"
#include "easytool/prompts.hpp"
#include "easytool/provider.hpp"
#include "easytool/retrieval.hpp"

namespace easytool {

struct GoldRecord {
  std::string request;
  std::optional<std::vector<std::string>> gold_tool_path;
  std::optional<nlohmann::json> gold_answer;
  std::optional<std::set<std::string>> relevant_tools;
};

inline GoldRecord gold_from_json(const nlohmann::json& root) {
  GoldRecord g;
  g.request = root.at("request").get<std::string>();
  if (root.contains("gold_tool_path") && !root["gold_tool_path"].is_null())
    g.gold_tool_path = root["gold_tool_path"].get<std::vector<std::string>>();
  if (root.contains("gold_answer") && !root["gold_answer"].is_null())
    g.gold_answer = root["gold_answer"];
  if (root.contains("relevant_tools") && !root["relevant_tools"].is_null()) {
    std::set<std::string> rel;
    for (const auto& t : root["relevant_tools"]) rel.insert(t.get<std::string>());
    g.relevant_tools = std::move(rel);
  }
  if (!g.gold_tool_path && !g.gold_answer && !g.relevant_tools)
    throw Error(ErrorCode::MissingGold, "gold record with no gold field: " + g.request);
  return g;
}

struct ErrorBreakdown {
  std::size_t tool_name_errors = 0;
  std::size_t parameter_errors = 0;
  std::size_t total_calls = 0;
};

struct EvaluationReport {
  double pass_rate = 0.0;
  std::optional<double> success_rate;
  std::optional<double> win_rate;
  std::optional<double> cp_rate;
  std::optional<double> accuracy;
  double tool_error_rate = 0.0;
  ErrorBreakdown error_breakdown;
  std::size_t n = 0;
};

inline ordered_json report_to_json(const EvaluationReport& r) {
  ordered_json out;
  out["pass_rate"] = r.pass_rate;
  out["success_rate"] = r.success_rate ? ordered_json(*r.success_rate) : ordered_json(nullptr);
  out["win_rate"] = r.win_rate ? ordered_json(*r.win_rate) : ordered_json(nullptr);
  out["cp_rate"] = r.cp_rate ? ordered_json(*r.cp_rate) : ordered_json(nullptr);
  out["accuracy"] = r.accuracy ? ordered_json(*r.accuracy) : ordered_json(nullptr);
  out["tool_error_rate"] = r.tool_error_rate;
  out["error_breakdown"]["ToolNameError"] = r.error_breakdown.tool_name_errors;
  out["error_breakdown"]["ParameterError"] = r.error_breakdown.parameter_errors;
  out["error_breakdown"]["total_calls"] = r.error_breakdown.total_calls;
  out["n"] = r.n;
  return out;
}

// ---------------------------------------------------------------------------
// Pass rate: completed-and-answered traces over all traces.

inline double pass_rate(const std::vector<AgentTrace>& traces) {
  if (traces.empty()) throw Error(ErrorCode::EmptyInput, "no traces");
  std::size_t answered = 0;
  for (const auto& t : traces)
    if (t.terminated_reason == TerminatedReason::Answered) ++answered;
  return 100.0 * static_cast<double>(answered) / static_cast<double>(traces.size());
}

// ---------------------------------------------------------------------------
// Success rate via a judge provider.

inline std::string render_success_prompt(const std::string& question,
                                         const std::string& answer,
                                         const PromptLibrary& lib = {}) {
  return render_template(lib.judge_success, {{"question", question}, {"answer", answer}});
}

// Parses {"Reason": ..., "Choice": ...}; Choice is matched case-insensitively.
inline std::optional<bool> parse_judge_choice(const std::string& completion) {
  try {
    nlohmann::json parsed = nlohmann::json::parse(extract_brace_block(completion));
    if (!parsed.contains("Choice") || !parsed["Choice"].is_string()) return std::nullopt;
    std::string c = parsed["Choice"].get<std::string>();
    for (auto& ch : c) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (c == "yes") return true;
    if (c == "no") return false;
    return std::nullopt;
  } catch (...) {
    return std::nullopt;
  }
}

inline double success_rate(const std::vector<AgentTrace>& traces, CompletionProvider& judge,
                           const PromptLibrary& lib = {}) {
  if (traces.empty()) throw Error(ErrorCode::EmptyInput, "no traces");
  std::size_t successes = 0;
  for (const auto& t : traces) {
    if (!t.final_answer) continue;  // unanswered counts as failure
    std::string prompt = render_success_prompt(t.request, *t.final_answer, lib);
    for (int attempt = 0; attempt <= kMaxRepairs; ++attempt) {
      std::string out = judge.complete(prompt, DecodingConfig{});
      auto verdict = parse_judge_choice(out);
      if (verdict) {
        if (*verdict) ++successes;
        break;
      }
      // Unparseable verdicts count against the evaluated system.
      prompt += "\nThe previous output was not parsible JSON. Output: ";
    }
  }
  return 100.0 * static_cast<double>(successes) / static_cast<double>(traces.size());
}

// ---------------------------------------------------------------------------
// Win rate with seeded presentation-order randomization.

struct WinRateResult {
  double rate = 0.0;  // percentage of pairs where the A side wins
  std::vector<bool> a_presented_first;
  std::size_t flagged_ties = 0;
};

namespace detail {

inline std::string path_summary(const AgentTrace& t) {
  std::string tools = "[";
  bool first = true;
  for (const auto& s : t.steps) {
    if (s.outcome != StepOutcome::Success) continue;
    if (!first) tools += ", ";
    tools += s.call.tool_id;
    first = false;
  }
  tools += "]";
  return "tools used: " + tools +
         "; answer: " + (t.final_answer ? *t.final_answer : "(no answer)");
}

}  // namespace detail

inline WinRateResult win_rate(
    const std::vector<std::pair<AgentTrace, AgentTrace>>& pairs, CompletionProvider& judge,
    unsigned seed = 0, const PromptLibrary& lib = {}) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyInput, "no trace pairs");
  std::mt19937 rng(seed);
  WinRateResult result;
  double a_score = 0.0;
  for (const auto& [a, b] : pairs) {
    bool a_first = std::uniform_int_distribution<int>(0, 1)(rng) == 0;
    result.a_presented_first.push_back(a_first);

    // An answered trace beats an unanswered one without consulting the judge.
    if (a.final_answer.has_value() != b.final_answer.has_value()) {
      if (a.final_answer) a_score += 1.0;
      continue;
    }

    const AgentTrace& first = a_first ? a : b;
    const AgentTrace& second = a_first ? b : a;
    std::string prompt = render_template(lib.judge_win,
                                         {{"question", a.request},
                                          {"path_a", detail::path_summary(first)},
                                          {"path_b", detail::path_summary(second)}});
    std::optional<bool> first_wins;
    for (int attempt = 0; attempt <= kMaxRepairs && !first_wins; ++attempt) {
      std::string out = judge.complete(prompt, DecodingConfig{});
      try {
        nlohmann::json parsed = nlohmann::json::parse(extract_brace_block(out));
        std::string c = parsed.value("Choice", "");
        if (c == "A" || c == "a") first_wins = true;
        else if (c == "B" || c == "b") first_wins = false;
      } catch (...) {
      }
      if (!first_wins) prompt += "\nThe previous output was not a valid choice. Output: ";
    }
    if (!first_wins) {
      a_score += 0.5;
      ++result.flagged_ties;
      continue;
    }
    bool a_wins = a_first ? *first_wins : !*first_wins;
    if (a_wins) a_score += 1.0;
  }
  result.rate = 100.0 * a_score / static_cast<double>(pairs.size());
  return result;
}

// ---------------------------------------------------------------------------
// Correct path rate: the generated tool path must contain the gold path as a
// (not necessarily contiguous) subsequence.

inline bool is_subsequence(const std::vector<std::string>& needle,
                           const std::vector<std::string>& haystack) {
  std::size_t i = 0;
  for (const auto& h : haystack) {
    if (i < needle.size() && needle[i] == h) ++i;
  }
  return i == needle.size();
}

inline std::vector<std::string> successful_tool_path(const AgentTrace& t) {
  std::vector<std::string> path;
  for (const auto& s : t.steps)
    if (s.outcome == StepOutcome::Success) path.push_back(s.call.tool_id);
  return path;
}

inline double correct_path_rate(const std::vector<AgentTrace>& traces,
                                const std::vector<GoldRecord>& golds) {
  if (traces.empty()) throw Error(ErrorCode::EmptyInput, "no traces");
  std::map<std::string, const GoldRecord*> by_request;
  for (const auto& g : golds) by_request[g.request] = &g;
  std::size_t correct = 0;
  for (const auto& t : traces) {
    auto it = by_request.find(t.request);
    if (it == by_request.end() || !it->second->gold_tool_path)
      throw Error(ErrorCode::MissingGold, "no gold tool path for request: " + t.request);
    if (is_subsequence(*it->second->gold_tool_path, successful_tool_path(t))) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(traces.size());
}

// ---------------------------------------------------------------------------
// Numeric accuracy with 0.1% relative tolerance.

// Last number in the text, after stripping thousands separators.
inline std::optional<double> extract_last_number(const std::string& text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == ',' && i > 0 && i + 1 < text.size() &&
        std::isdigit(static_cast<unsigned char>(text[i - 1])) &&
        std::isdigit(static_cast<unsigned char>(text[i + 1])))
      continue;
    cleaned.push_back(text[i]);
  }
  static const std::regex number_re(R"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)");
  std::optional<double> last;
  for (auto it = std::sregex_iterator(cleaned.begin(), cleaned.end(), number_re);
       it != std::sregex_iterator(); ++it) {
    try {
      last = std::stod(it->str());
    } catch (...) {
    }
  }
  return last;
}

inline bool numeric_accuracy(double answer, double gold) {
  if (!std::isfinite(gold)) throw Error(ErrorCode::DomainError, "gold is not finite");
  if (gold == 0.0) return answer == 0.0;
  return std::fabs(answer - gold) <= 0.001 * std::fabs(gold);
}

inline bool numeric_accuracy(const std::string& answer_text, double gold) {
  auto answer = extract_last_number(answer_text);
  if (!answer) return false;
  return numeric_accuracy(*answer, gold);
}

inline double numeric_accuracy_rate(const std::vector<AgentTrace>& traces,
                                    const std::vector<GoldRecord>& golds) {
  if (traces.empty()) throw Error(ErrorCode::EmptyInput, "no traces");
  std::map<std::string, const GoldRecord*> by_request;
  for (const auto& g : golds) by_request[g.request] = &g;
  std::size_t correct = 0;
  for (const auto& t : traces) {
    auto it = by_request.find(t.request);
    if (it == by_request.end() || !it->second->gold_answer)
      throw Error(ErrorCode::MissingGold, "no gold answer for request: " + t.request);
    if (!t.final_answer) continue;
    if (!it->second->gold_answer->is_number()) continue;
    if (numeric_accuracy(*t.final_answer, it->second->gold_answer->get<double>())) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(traces.size());
}

// ---------------------------------------------------------------------------
// Tool-related error rates.

struct ToolErrorRate {
  double rate = 0.0;
  ErrorBreakdown breakdown;
};

// Call-level: erroneous steps over all tool-call steps. Per-task: tasks with
// at least one tool-related error over all tasks.
inline ToolErrorRate tool_error_rate(const std::vector<AgentTrace>& traces,
                                     bool per_task = false) {
  if (traces.empty()) throw Error(ErrorCode::EmptyInput, "no traces");
  ToolErrorRate out;
  std::size_t tasks_with_error = 0;
  for (const auto& t : traces) {
    bool any_error = false;
    for (const auto& s : t.steps) {
      ++out.breakdown.total_calls;
      if (s.outcome == StepOutcome::ToolNameError) {
        ++out.breakdown.tool_name_errors;
        any_error = true;
      } else if (s.outcome == StepOutcome::ParameterError) {
        ++out.breakdown.parameter_errors;
        any_error = true;
      }
    }
    if (any_error) ++tasks_with_error;
  }
  if (per_task) {
    out.rate = 100.0 * static_cast<double>(tasks_with_error) /
               static_cast<double>(traces.size());
  } else {
    if (out.breakdown.total_calls == 0)
      throw Error(ErrorCode::EmptyInput, "traces contain no tool-call steps");
    std::size_t errors = out.breakdown.tool_name_errors + out.breakdown.parameter_errors;
    out.rate =
        100.0 * static_cast<double>(errors) / static_cast<double>(out.breakdown.total_calls);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Selection accuracy vs. candidate pool size.

struct SweepRequest {
  std::string request;
  std::string gold_tool;
};

struct SweepPick {
  std::string picked;
  std::size_t gold_position = 0;  // position of the gold tool in the shuffled pool
};

struct SweepPoint {
  std::size_t pool_size = 0;
  double accuracy = 0.0;
  std::vector<SweepPick> picks;
};

inline std::vector<SweepPoint> selection_accuracy_sweep(
    const std::vector<SweepRequest>& requests, const std::vector<std::size_t>& pool_sizes,
    const RetrievalIndex& index, const EmbeddingProvider& embedder,
    CompletionProvider& selector,
    const std::map<std::string, ToolInstruction>* instructions, const ToolRegistry* registry,
    unsigned seed = 0, const PromptLibrary& lib = {}) {
  std::vector<SweepPoint> points;
  for (std::size_t n : pool_sizes) {
    if (n < 1) throw Error(ErrorCode::DomainError, "pool size must be >= 1");
    SweepPoint point;
    point.pool_size = n;
    std::size_t correct = 0;
    std::mt19937 rng(seed + static_cast<unsigned>(n));
    for (const auto& req : requests) {
      const IndexEntry* gold = nullptr;
      for (const auto& e : index.entries)
        if (e.tool_id == req.gold_tool) gold = &e;
      if (!gold)
        throw Error(ErrorCode::MissingGold, "gold tool not in inventory: " + req.gold_tool);

      // Pool: the gold tool plus its n-1 nearest distractors by description
      // similarity.
      std::vector<std::string> pool = {req.gold_tool};
      for (const auto& r : top_k(index, gold->description, index.entries.size(), embedder)) {
        if (pool.size() >= n) break;
        if (r.tool_id != req.gold_tool) pool.push_back(r.tool_id);
      }
      std::shuffle(pool.begin(), pool.end(), rng);

      SweepPick pick;
      for (std::size_t i = 0; i < pool.size(); ++i)
        if (pool[i] == req.gold_tool) pick.gold_position = i;

      if (pool.size() == 1) {
        pick.picked = pool.front();
      } else {
        std::string block;
        for (const auto& id : pool) {
          std::string desc = id;
          if (instructions) {
            auto it = instructions->find(id);
            if (it != instructions->end()) desc = it->second.description;
          } else if (registry) {
            if (const ToolDocumentation* d = registry->find_tool(id))
              desc = doc_to_json(*d).dump();
          }
          block += "--- tool: " + id + " ---\n" + desc + "\n";
        }
        std::string prompt = render_template(
            lib.selection, {{"subtask", req.request}, {"candidates", block}});
        std::string out = selector.complete(prompt, DecodingConfig{});
        try {
          nlohmann::json parsed = nlohmann::json::parse(extract_brace_block(out));
          pick.picked = parsed.value("tool", "");
        } catch (...) {
          pick.picked = detail::trim(out);
        }
        // Scripted sweep selectors may answer positionally ("first").
        if (pick.picked == "first" && !pool.empty()) pick.picked = pool.front();
      }
      if (pick.picked == req.gold_tool) ++correct;
      point.picks.push_back(std::move(pick));
    }
    point.accuracy =
        requests.empty() ? 0.0
                         : 100.0 * static_cast<double>(correct) /
                               static_cast<double>(requests.size());
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace easytool
