#pragma once

// Tool registry, execution contract and the local arithmetic executor used
// for desk-scale numeric benchmarks.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "easytool/doc.hpp"
#include "easytool/error.hpp"

namespace easytool {

struct ToolCall {
  std::string tool_id;
  std::string function_name;
  nlohmann::ordered_json arguments = nlohmann::ordered_json::object();

  bool operator==(const ToolCall&) const = default;
};

// Registry of known tools: (tool_id, function_name) -> FunctionSpec.
class ToolRegistry {
 public:
  void add(const ToolDocumentation& doc) {
    validate_document(doc);
    if (docs_.count(doc.tool_name))
      throw Error(ErrorCode::IndexBuildError, "duplicate tool_id '" + doc.tool_name + "'");
    docs_[doc.tool_name] = doc;
  }

  const ToolDocumentation* find_tool(const std::string& tool_id) const {
    auto it = docs_.find(tool_id);
    return it == docs_.end() ? nullptr : &it->second;
  }

  const FunctionSpec* find_function(const std::string& tool_id,
                                    const std::string& function_name) const {
    const ToolDocumentation* doc = find_tool(tool_id);
    return doc ? doc->find_function(function_name) : nullptr;
  }

  std::vector<std::string> tool_ids() const {
    std::vector<std::string> ids;
    for (const auto& [id, _] : docs_) ids.push_back(id);
    return ids;
  }

  size_t size() const { return docs_.size(); }

 private:
  std::map<std::string, ToolDocumentation> docs_;
};

struct ExecutionResult {
  bool ok = false;
  std::string value;   // result string on success
  std::string reason;  // failure reason otherwise
};

class ToolExecutor {
 public:
  virtual ~ToolExecutor() = default;
  virtual ExecutionResult execute(const ToolCall& call) = 0;
};

namespace detail {

inline std::string format_2dp(double v) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << v;
  std::string s = out.str();
  if (s == "-0.00") s = "0.00";
  return s;
}

}  // namespace detail

// Local executor for the thirteen arithmetic operation tools. Every function
// takes {"input": [numbers...]} and returns the result normalized to two
// decimal places.
class ArithmeticExecutor : public ToolExecutor {
 public:
  static const std::vector<std::string>& function_names() {
    static const std::vector<std::string> names = {
        "add_",    "subtract_", "multiply_", "divide_",    "power_",
        "sqrt_",   "log_",      "ln_",       "lcm_",       "gcd_",
        "remainder_", "choose_", "permutate_"};
    return names;
  }

  // Documentation corpus for the registry: one single-function tool per
  // operation, bare-signature style.
  static std::vector<ToolDocumentation> corpus() {
    std::vector<ToolDocumentation> docs;
    for (const auto& name : function_names())
      docs.push_back(parse_bare_function(name + "(input: List)"));
    return docs;
  }

  ExecutionResult execute(const ToolCall& call) override {
    const auto& names = function_names();
    if (std::find(names.begin(), names.end(), call.function_name) == names.end())
      return {false, "", "unknown function '" + call.function_name + "'"};
    if (!call.arguments.contains("input") || !call.arguments["input"].is_array())
      return {false, "", "missing 'input' list"};
    std::vector<double> in;
    for (const auto& v : call.arguments["input"]) {
      if (!v.is_number()) return {false, "", "non-numeric element in input"};
      in.push_back(v.get<double>());
    }
    if (in.empty()) return {false, "", "empty input list"};
    try {
      return {true, detail::format_2dp(apply(call.function_name, in)), ""};
    } catch (const std::exception& e) {
      return {false, "", e.what()};
    }
  }

 private:
  static double apply(const std::string& fn, const std::vector<double>& in) {
    auto need = [&](size_t n) {
      if (in.size() < n) throw std::runtime_error(fn + " needs " + std::to_string(n) + " arguments");
    };
    if (fn == "add_") {
      double s = 0;
      for (double v : in) s += v;
      return s;
    }
    if (fn == "subtract_") {
      double s = in[0];
      for (size_t i = 1; i < in.size(); ++i) s -= in[i];
      return s;
    }
    if (fn == "multiply_") {
      double s = 1;
      for (double v : in) s *= v;
      return s;
    }
    if (fn == "divide_") {
      double s = in[0];
      for (size_t i = 1; i < in.size(); ++i) {
        if (in[i] == 0) throw std::runtime_error("division by zero");
        s /= in[i];
      }
      return s;
    }
    if (fn == "power_") {
      need(2);
      return std::pow(in[0], in[1]);
    }
    if (fn == "sqrt_") {
      if (in[0] < 0) throw std::runtime_error("sqrt of negative number");
      return std::sqrt(in[0]);
    }
    if (fn == "log_") {
      if (in[0] <= 0) throw std::runtime_error("log of non-positive number");
      return std::log10(in[0]);
    }
    if (fn == "ln_") {
      if (in[0] <= 0) throw std::runtime_error("ln of non-positive number");
      return std::log(in[0]);
    }
    if (fn == "lcm_" || fn == "gcd_" || fn == "remainder_") {
      need(2);
      long long a = to_integer(in[0]), b = to_integer(in[1]);
      if (fn == "remainder_") {
        if (b == 0) throw std::runtime_error("remainder by zero");
        return static_cast<double>(a % b);
      }
      if (a == 0 || b == 0) throw std::runtime_error("lcm/gcd of zero");
      long long g = std::gcd(std::llabs(a), std::llabs(b));
      if (fn == "gcd_") return static_cast<double>(g);
      return static_cast<double>(std::llabs(a) / g * std::llabs(b));
    }
    if (fn == "choose_" || fn == "permutate_") {
      need(2);
      long long n = to_integer(in[0]), k = to_integer(in[1]);
      if (n < 0 || k < 0 || k > n) throw std::runtime_error("invalid n/k");
      double r = 1;
      for (long long i = 0; i < k; ++i) {
        r *= static_cast<double>(n - i);
        if (fn == "choose_") r /= static_cast<double>(i + 1);
      }
      return r;
    }
    throw std::runtime_error("unhandled function " + fn);
  }

  static long long to_integer(double v) {
    long long i = static_cast<long long>(std::llround(v));
    if (std::fabs(v - static_cast<double>(i)) > 1e-9)
      throw std::runtime_error("expected an integer argument");
    return i;
  }
};

}  // namespace easytool
