#pragma once

// The two-stage documentation-to-instruction transformation: concise tool
// description generation, then per-function guideline construction with a
// worked scenario/parameters example, validated against the source schema.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "easytool/doc.hpp"
#include "easytool/error.hpp"
#include "easytool/executor.hpp"
#include "easytool/prompts.hpp"
#include "easytool/provider.hpp"

namespace easytool {

inline constexpr int kMaxRepairs = 2;

struct UsageExample {
  std::string scenario;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();

  bool operator==(const UsageExample&) const = default;
};

struct FunctionGuideline {
  std::string function_name;
  std::string purpose;
  // Copied verbatim from the source FunctionSpec; never altered by the LLM.
  std::vector<ParameterSpec> required_parameters;
  std::vector<ParameterSpec> optional_parameters;
  std::optional<std::string> invocation_template;
  UsageExample example;

  bool operator==(const FunctionGuideline&) const = default;
};

struct ToolInstruction {
  std::string tool_name;
  std::string description;
  std::vector<FunctionGuideline> function_guidelines;

  bool operator==(const ToolInstruction&) const = default;
};

struct ValidationReport {
  std::string function_name;
  bool executed = false;
  bool parameter_schema_ok = false;
  std::optional<bool> execution_ok;
  std::optional<std::string> failure_reason;
};

class InstructionIncompleteError : public Error {
 public:
  InstructionIncompleteError(std::string message, ToolInstruction partial)
      : Error(ErrorCode::InstructionIncomplete, std::move(message)),
        partial_(std::move(partial)) {}

  const ToolInstruction& partial() const { return partial_; }

 private:
  ToolInstruction partial_;
};

// ---------------------------------------------------------------------------
// Prompt rendering

inline std::string render_description_prompt(
    const ToolDocumentation& doc,
    const std::vector<std::pair<std::string, std::string>>& demos,
    const PromptLibrary& lib = {}) {
  std::string examples;
  if (!demos.empty()) {
    examples = " Here is an example:";
    for (const auto& [demo_doc, demo_out] : demos)
      examples += "\n" + demo_doc + "\nTool usage description:\n" + demo_out + "\n";
  }
  return render_template(lib.description_task,
                         {{"examples", examples},
                          {"documentation", doc_to_json(doc).dump(4)}});
}

namespace detail {

inline std::string parameter_list_line(const FunctionSpec& func) {
  auto dump_list = [](const std::vector<ParameterSpec>& list) {
    ordered_json arr = ordered_json::array();
    for (const auto& p : list) arr.push_back(parameter_to_json(p));
    return arr.dump();
  };
  return "Parameter List of '" + func.name +
         "': required_parameters: " + dump_list(func.required_parameters) +
         ", optional_parameters: " + dump_list(func.optional_parameters);
}

inline std::string function_purpose_line(const std::string& tool_name,
                                         const FunctionSpec& func) {
  if (!func.description.empty())
    return "'" + func.name + "' in '" + tool_name + "' is to " + func.description;
  std::string line = "'" + func.name + "' is a function of '" + tool_name + "'.";
  if (func.invocation_template) line += " Calling function: " + *func.invocation_template;
  return line;
}

}  // namespace detail

inline std::string render_guideline_prompt(const std::string& doc_desc,
                                           const FunctionSpec& func,
                                           const std::string& tool_name,
                                           const PromptLibrary& lib = {}) {
  return render_template(lib.guideline_task,
                         {{"example", lib.guideline_demo},
                          {"tool_description", doc_desc},
                          {"function_purpose", detail::function_purpose_line(tool_name, func)},
                          {"parameter_list", detail::parameter_list_line(func)},
                          {"function_name", func.name},
                          {"tool_name", tool_name}});
}

// ---------------------------------------------------------------------------
// Description generation with bounded repair

inline std::optional<std::string> description_violation(const ToolDocumentation& doc,
                                                        const std::string& desc) {
  if (detail::trim(desc).empty()) return "description is empty";
  if (desc.find(doc.tool_name) == std::string::npos)
    return "description does not mention the tool name '" + doc.tool_name + "'";
  for (const auto& fn : doc.functions)
    if (desc.find(fn.name) == std::string::npos)
      return "description does not mention the function '" + fn.name + "'";
  return std::nullopt;
}

inline std::vector<std::pair<std::string, std::string>> default_description_demos(
    const PromptLibrary& lib) {
  return {{lib.description_demo_doc, lib.description_demo_out}};
}

inline std::string generate_description(const ToolDocumentation& doc,
                                        CompletionProvider& provider,
                                        const PromptLibrary& lib = {}) {
  std::string prompt = render_description_prompt(doc, default_description_demos(lib), lib);
  std::string last_violation;
  for (int attempt = 0; attempt <= kMaxRepairs; ++attempt) {
    std::string out = detail::trim(provider.complete(prompt, DecodingConfig{}));
    auto violation = description_violation(doc, out);
    if (!violation) return out;
    last_violation = *violation;
    prompt += "\nThe previous description was rejected: " + last_violation +
              "\nTool usage description:\n";
  }
  throw Error(ErrorCode::DescriptionRejected, last_violation);
}

// ---------------------------------------------------------------------------
// Guideline generation and validation

namespace detail {

inline bool value_matches_type(const nlohmann::json& v, ValueType t) {
  switch (t) {
    case ValueType::String: return v.is_string();
    case ValueType::Number: return v.is_number();
    case ValueType::Boolean: return v.is_boolean();
    case ValueType::List: return v.is_array();
    case ValueType::Object: return v.is_object();
  }
  return false;
}

// One schema check shared by generation and validation: declared keys only,
// type conformance, required coverage, the null-parameter rule.
inline std::optional<std::string> example_violation(const UsageExample& ex,
                                                    const FunctionSpec& spec) {
  const bool parameterless =
      spec.required_parameters.empty() && spec.optional_parameters.empty();
  if (parameterless && !ex.parameters.empty())
    return "function has no parameters but the example supplies some; expected {}";
  for (auto it = ex.parameters.begin(); it != ex.parameters.end(); ++it) {
    const ParameterSpec* p = spec.find_parameter(it.key());
    if (!p) return "example uses undeclared parameter '" + it.key() + "'";
    if (!value_matches_type(it.value(), p->value_type))
      return "example value for '" + it.key() + "' is not of type " +
             value_type_name(p->value_type);
  }
  for (const auto& p : spec.required_parameters)
    if (!p.default_value && !ex.parameters.contains(p.name))
      return "example omits required parameter '" + p.name + "'";
  return std::nullopt;
}

}  // namespace detail

inline FunctionGuideline generate_guideline(const std::string& doc_desc,
                                            const FunctionSpec& func,
                                            CompletionProvider& provider,
                                            const std::string& tool_name,
                                            const PromptLibrary& lib = {}) {
  std::string prompt = render_guideline_prompt(doc_desc, func, tool_name, lib);
  std::string last_violation;
  for (int attempt = 0; attempt <= kMaxRepairs; ++attempt) {
    std::string out = provider.complete(prompt, DecodingConfig{});
    UsageExample ex;
    std::optional<std::string> violation;
    try {
      nlohmann::ordered_json parsed = nlohmann::ordered_json::parse(extract_brace_block(out));
      if (!parsed.contains("Scenario") || !parsed["Scenario"].is_string())
        violation = "output has no \"Scenario\" string";
      else if (!parsed.contains("Parameters") || !parsed["Parameters"].is_object())
        violation = "output has no \"Parameters\" object";
      else {
        ex.scenario = parsed["Scenario"].get<std::string>();
        ex.parameters = parsed["Parameters"];
        violation = detail::example_violation(ex, func);
      }
    } catch (const Error&) {
      violation = "output contains no parsable brace block";
    } catch (const nlohmann::json::exception&) {
      violation = "brace block is not valid JSON";
    }
    if (!violation) {
      FunctionGuideline g;
      g.function_name = func.name;
      g.purpose = func.description;
      g.required_parameters = func.required_parameters;
      g.optional_parameters = func.optional_parameters;
      g.invocation_template = func.invocation_template;
      g.example = std::move(ex);
      return g;
    }
    last_violation = *violation;
    prompt += "\nThe previous output was rejected: " + last_violation +
              "\nOne scenario for '" + func.name + "' of '" + tool_name + "' is:\n";
  }
  throw Error(ErrorCode::GuidelineRejected, last_violation);
}

inline ValidationReport validate_guideline(const FunctionGuideline& g,
                                           const FunctionSpec& spec,
                                           ToolExecutor* executor = nullptr,
                                           const std::string& tool_id = "") {
  ValidationReport report;
  report.function_name = g.function_name;
  auto violation = detail::example_violation(g.example, spec);
  report.parameter_schema_ok = !violation;
  if (violation) report.failure_reason = *violation;
  if (executor && report.parameter_schema_ok) {
    ToolCall call;
    call.tool_id = tool_id.empty() ? g.function_name : tool_id;
    call.function_name = g.function_name;
    call.arguments = g.example.parameters;
    ExecutionResult result = executor->execute(call);
    report.executed = true;
    report.execution_ok = result.ok;
    if (!result.ok) report.failure_reason = result.reason;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Full pipeline for one document

inline ToolInstruction build_instruction(const ToolDocumentation& doc,
                                         CompletionProvider& provider,
                                         ToolExecutor* executor = nullptr,
                                         const PromptLibrary& lib = {},
                                         std::vector<ValidationReport>* reports = nullptr) {
  validate_document(doc);
  ToolInstruction ins;
  ins.tool_name = doc.tool_name;
  ins.description = generate_description(doc, provider, lib);

  std::vector<std::string> failed;
  for (const auto& func : doc.functions) {
    std::optional<FunctionGuideline> accepted;
    std::string reason;
    // One regeneration pass after a failed validation.
    for (int round = 0; round < 2 && !accepted; ++round) {
      FunctionGuideline g;
      try {
        g = generate_guideline(ins.description, func, provider, doc.tool_name, lib);
      } catch (const Error& e) {
        reason = e.what();
        continue;
      }
      ValidationReport report = validate_guideline(g, func, executor, doc.tool_name);
      bool ok = report.parameter_schema_ok &&
                (!report.execution_ok.has_value() || *report.execution_ok);
      if (reports) reports->push_back(report);
      if (ok)
        accepted = std::move(g);
      else
        reason = report.failure_reason.value_or("validation failed");
    }
    if (accepted)
      ins.function_guidelines.push_back(std::move(*accepted));
    else
      failed.push_back(func.name + " (" + reason + ")");
  }

  if (!failed.empty()) {
    std::string msg = "no valid guideline for:";
    for (const auto& f : failed) msg += " " + f;
    throw InstructionIncompleteError(msg, std::move(ins));
  }
  return ins;
}

// ---------------------------------------------------------------------------
// Instruction serialization, matching the published field names:
// "name", "description", "required_parameters", "optional_parameters",
// "Example": {"Scenario", "Parameters"}.

inline ordered_json guideline_to_json(const FunctionGuideline& g) {
  ordered_json out;
  out["name"] = g.function_name;
  out["description"] = g.purpose;
  out["required_parameters"] = ordered_json::array();
  for (const auto& p : g.required_parameters)
    out["required_parameters"].push_back(parameter_to_json(p));
  out["optional_parameters"] = ordered_json::array();
  for (const auto& p : g.optional_parameters)
    out["optional_parameters"].push_back(parameter_to_json(p));
  if (g.invocation_template) out["tool_usage"] = *g.invocation_template;
  out["Example"]["Scenario"] = g.example.scenario;
  out["Example"]["Parameters"] = g.example.parameters;
  return out;
}

inline ordered_json instruction_to_json(const ToolInstruction& ins) {
  ordered_json out;
  out["tool_name"] = ins.tool_name;
  out["description"] = ins.description;
  out["function_guidelines"] = ordered_json::array();
  for (const auto& g : ins.function_guidelines)
    out["function_guidelines"].push_back(guideline_to_json(g));
  return out;
}

inline ToolInstruction instruction_from_json(const nlohmann::json& root) {
  ToolInstruction ins;
  ins.tool_name = root.at("tool_name").get<std::string>();
  ins.description = root.at("description").get<std::string>();
  for (const auto& gj : root.at("function_guidelines")) {
    FunctionGuideline g;
    g.function_name = gj.at("name").get<std::string>();
    g.purpose = gj.value("description", std::string());
    if (gj.contains("required_parameters"))
      for (const auto& p : gj["required_parameters"])
        g.required_parameters.push_back(parameter_from_json(p));
    if (gj.contains("optional_parameters"))
      for (const auto& p : gj["optional_parameters"])
        g.optional_parameters.push_back(parameter_from_json(p));
    if (gj.contains("tool_usage")) g.invocation_template = gj["tool_usage"].get<std::string>();
    if (gj.contains("Example")) {
      g.example.scenario = gj["Example"].value("Scenario", std::string());
      if (gj["Example"].contains("Parameters"))
        g.example.parameters =
            nlohmann::ordered_json::parse(gj["Example"]["Parameters"].dump());
    }
    ins.function_guidelines.push_back(std::move(g));
  }
  return ins;
}

}  // namespace easytool
