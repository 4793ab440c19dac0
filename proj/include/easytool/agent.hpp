#pragma once

// Four-stage agent runtime: task planning, tool retrieval, tool selection
// and tool execution with failure-driven reselection up to a maximum trial
// count. One session is strictly single-threaded; the index and registry it
// reads are immutable.

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "easytool/doc.hpp"
#include "easytool/error.hpp"
#include "easytool/executor.hpp"
#include "easytool/instruct.hpp"
#include "easytool/prompts.hpp"
#include "easytool/provider.hpp"
#include "easytool/retrieval.hpp"

namespace easytool {

enum class InstructionMode { RawDocumentation, EasyToolInstruction };

inline const char* instruction_mode_name(InstructionMode m) {
  return m == InstructionMode::RawDocumentation ? "raw" : "easytool";
}

inline InstructionMode instruction_mode_from_name(const std::string& s) {
  if (s == "raw") return InstructionMode::RawDocumentation;
  if (s == "easytool") return InstructionMode::EasyToolInstruction;
  throw Error(ErrorCode::ConfigError, "unknown instruction mode '" + s + "'");
}

struct AgentConfig {
  int max_trials = 3;
  int top_k = 5;
  int step_budget = 30;
  InstructionMode instruction_mode = InstructionMode::EasyToolInstruction;
};

struct Subtask {
  int id = 0;
  std::string text;
  std::vector<int> depends_on;

  bool operator==(const Subtask&) const = default;
};

enum class StepOutcome { Success, ToolNameError, ParameterError, ExecutionFailure };

inline const char* step_outcome_name(StepOutcome o) {
  switch (o) {
    case StepOutcome::Success: return "Success";
    case StepOutcome::ToolNameError: return "ToolNameError";
    case StepOutcome::ParameterError: return "ParameterError";
    case StepOutcome::ExecutionFailure: return "ExecutionFailure";
  }
  return "Unknown";
}

inline StepOutcome step_outcome_from_name(const std::string& s) {
  if (s == "Success") return StepOutcome::Success;
  if (s == "ToolNameError") return StepOutcome::ToolNameError;
  if (s == "ParameterError") return StepOutcome::ParameterError;
  if (s == "ExecutionFailure") return StepOutcome::ExecutionFailure;
  throw Error(ErrorCode::MalformedDocument, "unknown step outcome '" + s + "'");
}

enum class TerminatedReason { Answered, BudgetExhausted, TrialsExhausted };

inline const char* terminated_reason_name(TerminatedReason r) {
  switch (r) {
    case TerminatedReason::Answered: return "Answered";
    case TerminatedReason::BudgetExhausted: return "BudgetExhausted";
    case TerminatedReason::TrialsExhausted: return "TrialsExhausted";
  }
  return "Unknown";
}

inline TerminatedReason terminated_reason_from_name(const std::string& s) {
  if (s == "Answered") return TerminatedReason::Answered;
  if (s == "BudgetExhausted") return TerminatedReason::BudgetExhausted;
  if (s == "TrialsExhausted") return TerminatedReason::TrialsExhausted;
  throw Error(ErrorCode::MalformedDocument, "unknown terminated reason '" + s + "'");
}

struct AgentStep {
  int subtask_id = 0;
  int attempt = 0;
  std::vector<std::string> candidates;
  ToolCall call;
  StepOutcome outcome = StepOutcome::ExecutionFailure;
  std::string raw_result;
};

struct AgentTrace {
  std::string request;
  AgentConfig config;
  std::vector<Subtask> subtasks;
  std::vector<AgentStep> steps;
  std::optional<std::string> final_answer;
  TerminatedReason terminated_reason = TerminatedReason::TrialsExhausted;
};

// ---------------------------------------------------------------------------
// Planning

inline std::vector<Subtask> parse_plan(const std::string& completion) {
  nlohmann::json parsed = nlohmann::json::parse(extract_brace_block(completion));
  if (!parsed.contains("subtasks") || !parsed["subtasks"].is_array() ||
      parsed["subtasks"].empty())
    throw Error(ErrorCode::PlanningFailed, "plan has no subtasks");
  std::vector<Subtask> plan;
  for (const auto& s : parsed["subtasks"]) {
    Subtask t;
    t.id = s.at("id").get<int>();
    t.text = s.at("text").get<std::string>();
    if (s.contains("depends_on"))
      for (const auto& d : s["depends_on"]) t.depends_on.push_back(d.get<int>());
    plan.push_back(std::move(t));
  }
  // Ids contiguous from 1, dependencies valid and acyclic.
  std::set<int> ids;
  for (const auto& t : plan) ids.insert(t.id);
  for (int i = 1; i <= static_cast<int>(plan.size()); ++i)
    if (!ids.count(i))
      throw Error(ErrorCode::PlanningFailed, "subtask ids are not contiguous from 1");
  if (ids.size() != plan.size())
    throw Error(ErrorCode::PlanningFailed, "duplicate subtask ids");
  for (const auto& t : plan)
    for (int d : t.depends_on)
      if (!ids.count(d) || d == t.id)
        throw Error(ErrorCode::PlanningFailed, "invalid dependency in plan");
  // Cycle check via iterative removal of dependency-satisfied nodes.
  std::set<int> done;
  bool progressed = true;
  while (progressed && done.size() < plan.size()) {
    progressed = false;
    for (const auto& t : plan) {
      if (done.count(t.id)) continue;
      bool ready = true;
      for (int d : t.depends_on)
        if (!done.count(d)) ready = false;
      if (ready) {
        done.insert(t.id);
        progressed = true;
      }
    }
  }
  if (done.size() != plan.size())
    throw Error(ErrorCode::PlanningFailed, "dependency cycle in plan");
  return plan;
}

inline std::vector<Subtask> plan(const std::string& request, CompletionProvider& provider,
                                 const PromptLibrary& lib = {}) {
  if (request.empty()) throw Error(ErrorCode::PlanningFailed, "empty request");
  std::string prompt = render_template(lib.planning, {{"request", request}});
  std::string last_error;
  for (int attempt = 0; attempt <= kMaxRepairs; ++attempt) {
    std::string out = provider.complete(prompt, DecodingConfig{});
    try {
      return parse_plan(out);
    } catch (const std::exception& e) {
      last_error = e.what();
      prompt += "\nThe previous plan was rejected: " + last_error + "\nSubtasks:\n";
    }
  }
  throw Error(ErrorCode::PlanningFailed, last_error);
}

// Sequential topological order, ascending id among ready subtasks.
inline std::vector<int> execution_order(const std::vector<Subtask>& plan) {
  std::map<int, const Subtask*> by_id;
  for (const auto& t : plan) by_id[t.id] = &t;
  std::vector<int> order;
  std::set<int> done;
  while (order.size() < plan.size()) {
    bool progressed = false;
    for (const auto& [id, t] : by_id) {
      if (done.count(id)) continue;
      bool ready = true;
      for (int d : t->depends_on)
        if (!done.count(d)) ready = false;
      if (ready) {
        order.push_back(id);
        done.insert(id);
        progressed = true;
        break;
      }
    }
    if (!progressed)
      throw Error(ErrorCode::PlanningFailed, "dependency cycle in plan");
  }
  return order;
}

// ---------------------------------------------------------------------------
// Retrieval and selection

inline std::vector<std::string> retrieve_candidates(const Subtask& subtask,
                                                    const RetrievalIndex& index, int k,
                                                    const EmbeddingProvider& provider) {
  std::vector<std::string> ids;
  if (index.entries.empty()) return ids;
  for (const auto& r : top_k(index, subtask.text, static_cast<std::size_t>(k), provider))
    ids.push_back(r.tool_id);
  return ids;
}

// Everything a session needs, wired once by the caller.
struct AgentDeps {
  CompletionProvider* provider = nullptr;
  const EmbeddingProvider* embedder = nullptr;
  const RetrievalIndex* index = nullptr;
  const ToolRegistry* registry = nullptr;
  ToolExecutor* executor = nullptr;
  const std::map<std::string, ToolInstruction>* instructions = nullptr;
  PromptLibrary prompts;
};

inline std::string candidate_presentation(const std::string& tool_id, const AgentDeps& deps,
                                          InstructionMode mode) {
  if (mode == InstructionMode::EasyToolInstruction && deps.instructions) {
    auto it = deps.instructions->find(tool_id);
    if (it != deps.instructions->end()) return instruction_to_json(it->second).dump(4);
  }
  const ToolDocumentation* doc = deps.registry ? deps.registry->find_tool(tool_id) : nullptr;
  if (doc) return doc_to_json(*doc).dump(4);
  return tool_id;
}

inline ToolCall parse_tool_call(const std::string& completion) {
  nlohmann::ordered_json parsed =
      nlohmann::ordered_json::parse(extract_brace_block(completion));
  if (!parsed.contains("tool") || !parsed["tool"].is_string())
    throw Error(ErrorCode::SelectionFailed, "call has no \"tool\" string");
  if (!parsed.contains("function") || !parsed["function"].is_string())
    throw Error(ErrorCode::SelectionFailed, "call has no \"function\" string");
  ToolCall call;
  call.tool_id = parsed["tool"].get<std::string>();
  call.function_name = parsed["function"].get<std::string>();
  if (parsed.contains("arguments")) {
    if (!parsed["arguments"].is_object())
      throw Error(ErrorCode::SelectionFailed, "\"arguments\" is not an object");
    call.arguments = parsed["arguments"];
  }
  return call;
}

inline ToolCall select_tool(const Subtask& subtask, const std::vector<std::string>& candidates,
                            const AgentDeps& deps, InstructionMode mode,
                            const std::set<std::string>& excluded) {
  std::vector<std::string> remaining;
  for (const auto& id : candidates)
    if (!excluded.count(id)) remaining.push_back(id);
  if (remaining.empty())
    throw Error(ErrorCode::NoCandidatesLeft, "no candidates left after exclusion");

  std::string block;
  for (const auto& id : remaining)
    block += "--- tool: " + id + " ---\n" + candidate_presentation(id, deps, mode) + "\n";
  std::string prompt = render_template(
      deps.prompts.selection, {{"subtask", subtask.text}, {"candidates", block}});

  std::string last_error;
  for (int attempt = 0; attempt <= kMaxRepairs; ++attempt) {
    std::string out = deps.provider->complete(prompt, DecodingConfig{});
    try {
      return parse_tool_call(out);
    } catch (const std::exception& e) {
      last_error = e.what();
      prompt += "\nThe previous output was rejected: " + std::string(e.what()) +
                "\nTool call:\n";
    }
  }
  throw Error(ErrorCode::SelectionFailed, last_error);
}

// ---------------------------------------------------------------------------
// Execution and error taxonomy

// Tool name errors take precedence over parameter errors; a call carries at
// most one label.
inline std::optional<StepOutcome> classify_error(const ToolCall& call,
                                                 const ToolRegistry& registry) {
  const FunctionSpec* spec = registry.find_function(call.tool_id, call.function_name);
  if (!spec) return StepOutcome::ToolNameError;
  for (auto it = call.arguments.begin(); it != call.arguments.end(); ++it) {
    const ParameterSpec* p = spec->find_parameter(it.key());
    if (!p) return StepOutcome::ParameterError;
    if (!detail::value_matches_type(it.value(), p->value_type))
      return StepOutcome::ParameterError;
  }
  for (const auto& p : spec->required_parameters)
    if (!p.default_value && !call.arguments.contains(p.name))
      return StepOutcome::ParameterError;
  return std::nullopt;
}

struct ExecuteOutcome {
  StepOutcome outcome = StepOutcome::ExecutionFailure;
  std::string raw_result;
};

inline ExecuteOutcome execute(const ToolCall& call, ToolExecutor& executor,
                              const ToolRegistry& registry) {
  if (auto err = classify_error(call, registry))
    return {*err, std::string(step_outcome_name(*err))};
  ExecutionResult result = executor.execute(call);
  if (result.ok) return {StepOutcome::Success, result.value};
  return {StepOutcome::ExecutionFailure, result.reason};
}

// ---------------------------------------------------------------------------
// The full session loop

inline AgentTrace run_agent(const std::string& request, const AgentConfig& config,
                            const AgentDeps& deps) {
  AgentTrace trace;
  trace.request = request;
  trace.config = config;
  trace.subtasks = plan(request, *deps.provider, deps.prompts);

  std::map<int, std::string> results;
  bool all_succeeded = true;

  for (int id : execution_order(trace.subtasks)) {
    const Subtask* subtask = nullptr;
    for (const auto& t : trace.subtasks)
      if (t.id == id) subtask = &t;

    std::vector<std::string> candidates =
        retrieve_candidates(*subtask, *deps.index, config.top_k, *deps.embedder);

    std::set<std::string> excluded;
    bool succeeded = false;
    for (int attempt = 1; attempt <= config.max_trials; ++attempt) {
      if (static_cast<int>(trace.steps.size()) >= config.step_budget) {
        trace.terminated_reason = TerminatedReason::BudgetExhausted;
        return trace;
      }
      AgentStep step;
      step.subtask_id = id;
      step.attempt = attempt;
      for (const auto& c : candidates)
        if (!excluded.count(c)) step.candidates.push_back(c);

      if (step.candidates.empty()) {
        step.outcome = StepOutcome::ExecutionFailure;
        step.raw_result = "no candidate tools";
        trace.steps.push_back(std::move(step));
        break;
      }

      try {
        step.call =
            select_tool(*subtask, candidates, deps, config.instruction_mode, excluded);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NoCandidatesLeft) break;
        step.outcome = StepOutcome::ExecutionFailure;
        step.raw_result = e.what();
        trace.steps.push_back(std::move(step));
        continue;
      }

      bool in_candidates = false;
      for (const auto& c : step.candidates)
        if (c == step.call.tool_id) in_candidates = true;
      if (!in_candidates) {
        // Selecting outside the offered candidate set is a call to a tool
        // that is not in the inventory for this subtask.
        step.outcome = StepOutcome::ToolNameError;
        step.raw_result = "selected tool '" + step.call.tool_id + "' is not a candidate";
      } else {
        ExecuteOutcome result = execute(step.call, *deps.executor, *deps.registry);
        step.outcome = result.outcome;
        step.raw_result = result.raw_result;
      }

      const bool success = step.outcome == StepOutcome::Success;
      const std::string failed_tool = step.call.tool_id;
      const std::string value = step.raw_result;
      trace.steps.push_back(std::move(step));
      if (success) {
        results[id] = value;
        succeeded = true;
        break;
      }
      if (!failed_tool.empty()) excluded.insert(failed_tool);
    }

    if (!succeeded) {
      all_succeeded = false;
      trace.terminated_reason = TerminatedReason::TrialsExhausted;
      return trace;
    }
  }

  if (all_succeeded) {
    std::string results_block;
    for (const auto& [id, value] : results)
      results_block += "subtask " + std::to_string(id) + ": " + value + "\n";
    std::string prompt = render_template(deps.prompts.answer,
                                         {{"request", request}, {"results", results_block}});
    trace.final_answer = detail::trim(deps.provider->complete(prompt, DecodingConfig{}));
    trace.terminated_reason = TerminatedReason::Answered;
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Trace persistence: JSONL with a header record, one step per line and a
// final record, in stable field order for golden-file diffs.

inline ordered_json step_to_json(const AgentStep& s) {
  ordered_json out;
  out["type"] = "step";
  out["subtask_id"] = s.subtask_id;
  out["attempt"] = s.attempt;
  out["candidates"] = s.candidates;
  out["call"]["tool"] = s.call.tool_id;
  out["call"]["function"] = s.call.function_name;
  out["call"]["arguments"] = s.call.arguments;
  out["outcome"] = step_outcome_name(s.outcome);
  out["raw_result"] = s.raw_result;
  return out;
}

inline std::string serialize_trace(const AgentTrace& trace) {
  std::ostringstream out;
  ordered_json header;
  header["type"] = "header";
  header["request"] = trace.request;
  header["config"]["max_trials"] = trace.config.max_trials;
  header["config"]["top_k"] = trace.config.top_k;
  header["config"]["step_budget"] = trace.config.step_budget;
  header["config"]["instruction_mode"] = instruction_mode_name(trace.config.instruction_mode);
  header["config"]["budget_semantics"] = "executed tool-call steps";
  header["subtasks"] = ordered_json::array();
  for (const auto& t : trace.subtasks) {
    ordered_json st;
    st["id"] = t.id;
    st["text"] = t.text;
    st["depends_on"] = t.depends_on;
    header["subtasks"].push_back(std::move(st));
  }
  out << header.dump() << "\n";
  for (const auto& s : trace.steps) out << step_to_json(s).dump() << "\n";
  ordered_json footer;
  footer["type"] = "final";
  footer["final_answer"] = trace.final_answer ? ordered_json(*trace.final_answer)
                                              : ordered_json(nullptr);
  footer["terminated_reason"] = terminated_reason_name(trace.terminated_reason);
  out << footer.dump() << "\n";
  return out.str();
}

inline AgentTrace parse_trace(const std::string& jsonl) {
  AgentTrace trace;
  std::istringstream in(jsonl);
  std::string line;
  bool saw_header = false, saw_final = false;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedDocument, std::string("bad trace line: ") + e.what());
    }
    const std::string type = rec.value("type", "");
    try {
    if (type == "header") {
      saw_header = true;
      trace.request = rec.value("request", "");
      if (rec.contains("config")) {
        trace.config.max_trials = rec["config"].value("max_trials", 3);
        trace.config.top_k = rec["config"].value("top_k", 5);
        trace.config.step_budget = rec["config"].value("step_budget", 30);
        trace.config.instruction_mode =
            instruction_mode_from_name(rec["config"].value("instruction_mode", "easytool"));
      }
      if (rec.contains("subtasks"))
        for (const auto& st : rec["subtasks"]) {
          Subtask t;
          t.id = st.at("id").get<int>();
          t.text = st.value("text", "");
          if (st.contains("depends_on"))
            for (const auto& d : st["depends_on"]) t.depends_on.push_back(d.get<int>());
          trace.subtasks.push_back(std::move(t));
        }
    } else if (type == "step") {
      AgentStep s;
      s.subtask_id = rec.at("subtask_id").get<int>();
      s.attempt = rec.at("attempt").get<int>();
      if (rec.contains("candidates"))
        s.candidates = rec["candidates"].get<std::vector<std::string>>();
      if (rec.contains("call")) {
        s.call.tool_id = rec["call"].value("tool", "");
        s.call.function_name = rec["call"].value("function", "");
        if (rec["call"].contains("arguments"))
          s.call.arguments = nlohmann::ordered_json::parse(rec["call"]["arguments"].dump());
      }
      s.outcome = step_outcome_from_name(rec.at("outcome").get<std::string>());
      s.raw_result = rec.value("raw_result", "");
      trace.steps.push_back(std::move(s));
    } else if (type == "final") {
      saw_final = true;
      if (rec.contains("final_answer") && !rec["final_answer"].is_null())
        trace.final_answer = rec["final_answer"].get<std::string>();
      trace.terminated_reason =
          terminated_reason_from_name(rec.at("terminated_reason").get<std::string>());
    }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedDocument,
                  std::string("bad trace record: ") + e.what());
    }
  }
  if (!saw_header || !saw_final)
    throw Error(ErrorCode::MalformedDocument, "trace is missing header or final record");
  return trace;
}

}  // namespace easytool
