#pragma once

// Normalization of heterogeneous tool documentation into one canonical
// schema, plus lossless serialization of the canonical fields.

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "easytool/error.hpp"

namespace easytool {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

enum class SourceFormat { RapidApiJson, RestEndpointCatalog, BareFunction };

inline const char* source_format_name(SourceFormat f) {
  switch (f) {
    case SourceFormat::RapidApiJson: return "RapidApiJson";
    case SourceFormat::RestEndpointCatalog: return "RestEndpointCatalog";
    case SourceFormat::BareFunction: return "BareFunction";
  }
  return "Unknown";
}

inline SourceFormat source_format_from_name(const std::string& s) {
  if (s == "RapidApiJson") return SourceFormat::RapidApiJson;
  if (s == "RestEndpointCatalog") return SourceFormat::RestEndpointCatalog;
  if (s == "BareFunction") return SourceFormat::BareFunction;
  throw Error(ErrorCode::MalformedDocument, "unknown source_format '" + s + "'");
}

enum class ValueType { String, Number, Boolean, List, Object };

inline const char* value_type_name(ValueType t) {
  switch (t) {
    case ValueType::String: return "STRING";
    case ValueType::Number: return "NUMBER";
    case ValueType::Boolean: return "BOOLEAN";
    case ValueType::List: return "LIST";
    case ValueType::Object: return "OBJECT";
  }
  return "STRING";
}

// Maps a source type tag onto the canonical enum. Unknown tags fall back to
// String; the caller records a warning so the parameter is never dropped.
inline ValueType value_type_from_name(const std::string& raw, bool* known = nullptr) {
  std::string s;
  for (char c : raw) s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (known) *known = true;
  if (s == "STRING" || s == "STR" || s == "TEXT" || s == "ENUM" || s == "DATE" ||
      s == "TIME (24-HOUR HH:MM)")
    return ValueType::String;
  if (s == "NUMBER" || s == "INT" || s == "INTEGER" || s == "FLOAT" || s == "DOUBLE" ||
      s == "LONG")
    return ValueType::Number;
  if (s == "BOOLEAN" || s == "BOOL") return ValueType::Boolean;
  if (s == "LIST" || s == "ARRAY") return ValueType::List;
  if (s == "OBJECT" || s == "DICT" || s == "MAP") return ValueType::Object;
  if (known) *known = false;
  return ValueType::String;
}

struct ParameterSpec {
  std::string name;
  ValueType value_type = ValueType::String;
  std::string description;
  std::optional<json> default_value;

  bool operator==(const ParameterSpec&) const = default;
};

struct FunctionSpec {
  std::string name;
  std::string description;
  std::vector<ParameterSpec> required_parameters;
  std::vector<ParameterSpec> optional_parameters;
  std::optional<std::string> invocation_template;

  bool operator==(const FunctionSpec&) const = default;

  const ParameterSpec* find_parameter(const std::string& pname) const {
    for (const auto& p : required_parameters)
      if (p.name == pname) return &p;
    for (const auto& p : optional_parameters)
      if (p.name == pname) return &p;
    return nullptr;
  }
};

struct ToolDocumentation {
  std::string tool_name;
  std::string tool_description;
  SourceFormat source_format = SourceFormat::RapidApiJson;
  std::vector<FunctionSpec> functions;
  // Unmodeled fields preserved verbatim, in source order.
  std::vector<std::pair<std::string, std::string>> raw_extras;

  bool operator==(const ToolDocumentation&) const = default;

  const FunctionSpec* find_function(const std::string& fname) const {
    for (const auto& f : functions)
      if (f.name == fname) return &f;
    return nullptr;
  }
};

inline void validate_document(const ToolDocumentation& doc) {
  if (doc.tool_name.empty())
    throw Error(ErrorCode::MissingField, "tool_name is empty");
  if (doc.functions.empty())
    throw Error(ErrorCode::MissingField, "document has no functions");
  std::set<std::string> fnames;
  for (const auto& f : doc.functions) {
    if (f.name.empty())
      throw Error(ErrorCode::MalformedDocument, "function with empty name");
    if (!fnames.insert(f.name).second)
      throw Error(ErrorCode::MalformedDocument, "duplicate function name '" + f.name + "'");
    std::set<std::string> pnames;
    for (const auto* list : {&f.required_parameters, &f.optional_parameters}) {
      for (const auto& p : *list) {
        if (p.name.empty())
          throw Error(ErrorCode::MalformedDocument,
                      "parameter with empty name in '" + f.name + "'");
        if (!pnames.insert(p.name).second)
          throw Error(ErrorCode::MalformedDocument,
                      "duplicate parameter '" + p.name + "' in '" + f.name + "'");
      }
    }
    if (doc.source_format == SourceFormat::BareFunction && !f.invocation_template)
      throw Error(ErrorCode::MalformedDocument,
                  "bare function '" + f.name + "' has no invocation template");
  }
}

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

inline bool starts_with_http_verb(const std::string& line) {
  static const char* verbs[] = {"GET ", "POST ", "PUT ", "DELETE ", "PATCH ",
                                "HEAD ", "OPTIONS "};
  for (const char* v : verbs)
    if (line.rfind(v, 0) == 0) return true;
  return false;
}

// Matches "name(" at the start of a line: a bare calling signature.
inline bool looks_like_signature(const std::string& line) {
  size_t i = 0;
  if (i >= line.size()) return false;
  if (!std::isalpha(static_cast<unsigned char>(line[i])) && line[i] != '_') return false;
  while (i < line.size() &&
         (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_'))
    ++i;
  return i < line.size() && line[i] == '(';
}

inline std::string json_value_as_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Coerces a raw default literal toward the declared type where the source
// stored it as a string (RapidAPI routinely quotes numeric defaults).
inline json coerce_default(const json& raw, ValueType t, bool& ok) {
  ok = true;
  switch (t) {
    case ValueType::String:
      if (raw.is_string()) return raw;
      return json(json_value_as_string(raw));
    case ValueType::Number:
      if (raw.is_number()) return raw;
      if (raw.is_string()) {
        const std::string s = trim(raw.get<std::string>());
        try {
          size_t pos = 0;
          if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
              s.find('E') == std::string::npos) {
            long long v = std::stoll(s, &pos);
            if (pos == s.size()) return json(v);
          } else {
            double v = std::stod(s, &pos);
            if (pos == s.size()) return json(v);
          }
        } catch (...) {
        }
      }
      break;
    case ValueType::Boolean:
      if (raw.is_boolean()) return raw;
      if (raw.is_string()) {
        std::string s = trim(raw.get<std::string>());
        for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (s == "true") return json(true);
        if (s == "false") return json(false);
      }
      break;
    case ValueType::List:
      if (raw.is_array()) return raw;
      break;
    case ValueType::Object:
      if (raw.is_object()) return raw;
      break;
  }
  ok = false;
  return raw;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Format detection. Structural checks first (RapidAPI JSON), then the HTTP
// verb prefix of REST catalogs, then the bare signature regex; first match
// wins.
inline SourceFormat detect_format(const std::string& raw_text) {
  if (raw_text.empty())
    throw Error(ErrorCode::UnrecognizedFormat, "empty input");
  const std::string trimmed = detail::trim(raw_text);
  if (!trimmed.empty() && trimmed.front() == '{') {
    json parsed = json::parse(trimmed, nullptr, false);
    if (parsed.is_object()) {
      if (parsed.contains("source_format") && parsed["source_format"].is_string())
        return source_format_from_name(parsed["source_format"].get<std::string>());
      if (parsed.contains("api_list") &&
          (parsed.contains("tool_name") || parsed.contains("name")))
        return SourceFormat::RapidApiJson;
    }
  }
  bool any_line = false;
  for (const auto& raw_line : detail::split_lines(raw_text)) {
    const std::string line = detail::trim(raw_line);
    if (line.empty()) continue;
    any_line = true;
    if (detail::starts_with_http_verb(line)) return SourceFormat::RestEndpointCatalog;
  }
  if (any_line) {
    bool first = true;
    for (const auto& raw_line : detail::split_lines(raw_text)) {
      const std::string line = detail::trim(raw_line);
      if (line.empty()) continue;
      // A catalog may open with a tool-name header; skip one non-entry line.
      if (first && !detail::looks_like_signature(line)) {
        first = false;
        continue;
      }
      if (detail::looks_like_signature(line)) return SourceFormat::BareFunction;
      break;
    }
    if (detail::looks_like_signature(detail::trim(raw_text)))
      return SourceFormat::BareFunction;
  }
  throw Error(ErrorCode::UnrecognizedFormat, "no detector matched");
}

// ---------------------------------------------------------------------------
// RapidAPI-shaped JSON documents.
inline ParameterSpec parse_rapidapi_parameter(const json& p,
                                              std::vector<std::string>* warnings) {
  ParameterSpec out;
  if (!p.is_object() || !p.contains("name") || !p["name"].is_string())
    throw Error(ErrorCode::MalformedDocument, "parameter entry without a name");
  out.name = p["name"].get<std::string>();
  if (p.contains("type")) {
    bool known = true;
    out.value_type = value_type_from_name(detail::json_value_as_string(p["type"]), &known);
    if (!known && warnings)
      warnings->push_back("unknown parameter type '" +
                          detail::json_value_as_string(p["type"]) + "' for '" + out.name +
                          "', mapped to STRING");
  }
  if (p.contains("description") && p["description"].is_string())
    out.description = p["description"].get<std::string>();
  if (p.contains("default") && !p["default"].is_null()) {
    bool ok = true;
    json coerced = detail::coerce_default(p["default"], out.value_type, ok);
    if (ok) {
      out.default_value = coerced;
    } else {
      // Keep the literal rather than drop it; the type moves to STRING so
      // the conformance invariant still holds.
      if (warnings)
        warnings->push_back("default for '" + out.name +
                            "' does not conform to declared type; parameter demoted to STRING");
      out.value_type = ValueType::String;
      out.default_value = json(detail::json_value_as_string(p["default"]));
    }
  }
  return out;
}

inline ToolDocumentation parse_rapidapi(const std::string& raw_text,
                                        std::vector<std::string>* warnings = nullptr) {
  json root = json::parse(raw_text, nullptr, false);
  if (!root.is_object())
    throw Error(ErrorCode::MalformedDocument, "not a JSON object");

  ToolDocumentation doc;
  doc.source_format = SourceFormat::RapidApiJson;
  if (root.contains("tool_name") && root["tool_name"].is_string())
    doc.tool_name = root["tool_name"].get<std::string>();
  else if (root.contains("name") && root["name"].is_string())
    doc.tool_name = root["name"].get<std::string>();
  if (doc.tool_name.empty())
    throw Error(ErrorCode::MissingField, "no tool_name/name field");
  if (root.contains("tool_description") && root["tool_description"].is_string())
    doc.tool_description = root["tool_description"].get<std::string>();
  else if (root.contains("description") && root["description"].is_string())
    doc.tool_description = root["description"].get<std::string>();

  if (!root.contains("api_list") || !root["api_list"].is_array())
    throw Error(ErrorCode::MissingField, "no api_list");
  if (root["api_list"].empty())
    throw Error(ErrorCode::MissingField, "api_list is empty");

  // Preserve unmodeled top-level fields verbatim. ordered_json re-parse keeps
  // source ordering.
  ordered_json ordered_root = ordered_json::parse(raw_text);
  static const std::set<std::string> modeled = {"tool_name", "name", "tool_description",
                                               "description", "api_list"};
  for (auto it = ordered_root.begin(); it != ordered_root.end(); ++it) {
    if (modeled.count(it.key())) continue;
    doc.raw_extras.emplace_back(it.key(), detail::json_value_as_string(it.value()));
  }

  for (std::size_t api_index = 0; api_index < root["api_list"].size(); ++api_index) {
    const json& api = root["api_list"][api_index];
    FunctionSpec fn;
    if (api.contains("name") && api["name"].is_string())
      fn.name = api["name"].get<std::string>();
    else if (api.contains("api_name") && api["api_name"].is_string())
      fn.name = api["api_name"].get<std::string>();
    if (fn.name.empty())
      throw Error(ErrorCode::MissingField, "api entry without a name");
    if (api.contains("description") && api["description"].is_string())
      fn.description = api["description"].get<std::string>();
    if (api.contains("required_parameters") && api["required_parameters"].is_array())
      for (const auto& p : api["required_parameters"])
        fn.required_parameters.push_back(parse_rapidapi_parameter(p, warnings));
    if (api.contains("optional_parameters") && api["optional_parameters"].is_array())
      for (const auto& p : api["optional_parameters"])
        fn.optional_parameters.push_back(parse_rapidapi_parameter(p, warnings));
    static const std::set<std::string> api_modeled = {
        "name", "api_name", "description", "required_parameters", "optional_parameters"};
    // Extras are read from the ordered parse so source order survives.
    const ordered_json& ordered_api = ordered_root["api_list"][api_index];
    for (auto it = ordered_api.begin(); it != ordered_api.end(); ++it) {
      if (api_modeled.count(it.key())) continue;
      doc.raw_extras.emplace_back("api." + fn.name + "." + it.key(),
                                  detail::json_value_as_string(it.value()));
    }
    doc.functions.push_back(std::move(fn));
  }

  validate_document(doc);
  return doc;
}

// ---------------------------------------------------------------------------
// REST endpoint catalogs: "METHOD /path  one-line description" per entry,
// with an optional leading tool-name header line.
inline ToolDocumentation parse_rest_catalog(const std::string& raw_text) {
  ToolDocumentation doc;
  doc.source_format = SourceFormat::RestEndpointCatalog;

  bool saw_entry = false;
  for (const auto& raw_line : detail::split_lines(raw_text)) {
    const std::string line = detail::trim(raw_line);
    if (line.empty() || line[0] == '#') continue;
    if (!detail::starts_with_http_verb(line)) {
      if (!saw_entry && doc.tool_name.empty()) {
        doc.tool_name = line;
        continue;
      }
      throw Error(ErrorCode::MalformedDocument,
                  "catalog entry without an HTTP method: '" + line + "'");
    }
    saw_entry = true;
    size_t sp1 = line.find(' ');
    std::string method = line.substr(0, sp1);
    size_t path_begin = line.find_first_not_of(' ', sp1);
    if (path_begin == std::string::npos)
      throw Error(ErrorCode::MalformedDocument, "entry with no path: '" + line + "'");
    size_t path_end = line.find_first_of(" \t", path_begin);
    std::string path = line.substr(path_begin, path_end == std::string::npos
                                                   ? std::string::npos
                                                   : path_end - path_begin);
    std::string description;
    if (path_end != std::string::npos)
      description = detail::trim(line.substr(path_end));

    FunctionSpec fn;
    fn.name = path;
    fn.description = description;
    fn.invocation_template = method + " " + path;

    // Every {placeholder} in the path becomes one required String parameter.
    std::set<std::string> seen;
    for (size_t i = 0; i < path.size();) {
      if (path[i] == '{') {
        size_t close = path.find('}', i);
        if (close == std::string::npos)
          throw Error(ErrorCode::MalformedDocument, "unbalanced '{' in path: " + path);
        std::string pname = path.substr(i + 1, close - i - 1);
        if (pname.empty())
          throw Error(ErrorCode::MalformedDocument, "empty placeholder in path: " + path);
        if (seen.insert(pname).second) {
          ParameterSpec p;
          p.name = pname;
          p.value_type = ValueType::String;
          p.description = "path parameter of " + path;
          fn.required_parameters.push_back(std::move(p));
        }
        i = close + 1;
      } else {
        ++i;
      }
    }
    doc.functions.push_back(std::move(fn));
  }

  if (doc.tool_name.empty()) doc.tool_name = "RestCatalog";
  if (doc.functions.empty())
    throw Error(ErrorCode::MalformedDocument, "catalog has no endpoint entries");
  validate_document(doc);
  return doc;
}

// ---------------------------------------------------------------------------
// Bare calling signatures: "name(param: Type, ...) [-> Type]" per line, no
// descriptions at all. The first function name doubles as the tool name.
inline ToolDocumentation parse_bare_function(const std::string& raw_text) {
  ToolDocumentation doc;
  doc.source_format = SourceFormat::BareFunction;

  for (const auto& raw_line : detail::split_lines(raw_text)) {
    const std::string line = detail::trim(raw_line);
    if (line.empty() || line[0] == '#') continue;
    if (!detail::looks_like_signature(line))
      throw Error(ErrorCode::MalformedDocument, "not a calling signature: '" + line + "'");
    size_t open = line.find('(');
    size_t close = line.find(')', open);
    if (close == std::string::npos)
      throw Error(ErrorCode::MalformedDocument, "unbalanced '(' in: '" + line + "'");

    FunctionSpec fn;
    fn.name = detail::trim(line.substr(0, open));
    fn.invocation_template = line;

    std::string params = line.substr(open + 1, close - open - 1);
    size_t start = 0;
    while (start <= params.size() && !detail::trim(params).empty()) {
      size_t comma = params.find(',', start);
      std::string piece = detail::trim(
          params.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (!piece.empty()) {
        ParameterSpec p;
        size_t colon = piece.find(':');
        if (colon == std::string::npos) {
          p.name = piece;
        } else {
          p.name = detail::trim(piece.substr(0, colon));
          p.value_type = value_type_from_name(detail::trim(piece.substr(colon + 1)));
        }
        if (p.name.empty())
          throw Error(ErrorCode::MalformedDocument, "unnamed parameter in: '" + line + "'");
        fn.required_parameters.push_back(std::move(p));
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    doc.functions.push_back(std::move(fn));
  }

  if (doc.functions.empty())
    throw Error(ErrorCode::MalformedDocument, "no signatures found");
  doc.tool_name = doc.functions.front().name;
  validate_document(doc);
  return doc;
}

// ---------------------------------------------------------------------------
// Canonical serialization. Field names and casing match the published
// fixtures ("required_parameters", not camelCase); key order is the schema
// definition order.
inline ordered_json parameter_to_json(const ParameterSpec& p) {
  ordered_json out;
  out["name"] = p.name;
  out["type"] = value_type_name(p.value_type);
  out["description"] = p.description;
  if (p.default_value) out["default"] = *p.default_value;
  return out;
}

inline ordered_json doc_to_json(const ToolDocumentation& doc) {
  ordered_json out;
  out["tool_name"] = doc.tool_name;
  out["tool_description"] = doc.tool_description;
  out["source_format"] = source_format_name(doc.source_format);
  out["functions"] = ordered_json::array();
  for (const auto& fn : doc.functions) {
    ordered_json f;
    f["name"] = fn.name;
    f["description"] = fn.description;
    f["required_parameters"] = ordered_json::array();
    for (const auto& p : fn.required_parameters)
      f["required_parameters"].push_back(parameter_to_json(p));
    f["optional_parameters"] = ordered_json::array();
    for (const auto& p : fn.optional_parameters)
      f["optional_parameters"].push_back(parameter_to_json(p));
    if (fn.invocation_template) f["invocation_template"] = *fn.invocation_template;
    out["functions"].push_back(std::move(f));
  }
  out["raw_extras"] = ordered_json::object();
  for (const auto& [k, v] : doc.raw_extras) out["raw_extras"][k] = v;
  return out;
}

inline std::string serialize_doc(const ToolDocumentation& doc) {
  validate_document(doc);
  return doc_to_json(doc).dump(4) + "\n";
}

inline ParameterSpec parameter_from_json(const json& p) {
  ParameterSpec out;
  out.name = p.at("name").get<std::string>();
  out.value_type = value_type_from_name(p.at("type").get<std::string>());
  if (p.contains("description")) out.description = p["description"].get<std::string>();
  if (p.contains("default")) out.default_value = p["default"];
  return out;
}

inline ToolDocumentation doc_from_json(const json& root) {
  ToolDocumentation doc;
  doc.tool_name = root.at("tool_name").get<std::string>();
  doc.tool_description = root.value("tool_description", std::string());
  doc.source_format = source_format_from_name(root.at("source_format").get<std::string>());
  for (const auto& f : root.at("functions")) {
    FunctionSpec fn;
    fn.name = f.at("name").get<std::string>();
    fn.description = f.value("description", std::string());
    if (f.contains("required_parameters"))
      for (const auto& p : f["required_parameters"])
        fn.required_parameters.push_back(parameter_from_json(p));
    if (f.contains("optional_parameters"))
      for (const auto& p : f["optional_parameters"])
        fn.optional_parameters.push_back(parameter_from_json(p));
    if (f.contains("invocation_template"))
      fn.invocation_template = f["invocation_template"].get<std::string>();
    doc.functions.push_back(std::move(fn));
  }
  if (root.contains("raw_extras")) {
    ordered_json extras = ordered_json::parse(root["raw_extras"].dump());
    for (auto it = extras.begin(); it != extras.end(); ++it)
      doc.raw_extras.emplace_back(it.key(), it.value().get<std::string>());
  }
  validate_document(doc);
  return doc;
}

inline ToolDocumentation parse_canonical(const std::string& raw_text) {
  json root = json::parse(raw_text, nullptr, false);
  if (!root.is_object())
    throw Error(ErrorCode::MalformedDocument, "canonical document is not a JSON object");
  // raw_extras ordering matters for round-trips; re-parse ordered.
  try {
    ordered_json ordered = ordered_json::parse(raw_text);
    ToolDocumentation doc = doc_from_json(json::parse(raw_text));
    doc.raw_extras.clear();
    if (ordered.contains("raw_extras"))
      for (auto it = ordered["raw_extras"].begin(); it != ordered["raw_extras"].end(); ++it)
        doc.raw_extras.emplace_back(it.key(), it.value().get<std::string>());
    return doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, e.what());
  }
}

// Single entry point used by the CLI: canonical documents are recognized by
// their source_format field, everything else goes through detection.
inline ToolDocumentation parse_document(const std::string& raw_text,
                                        std::optional<SourceFormat> format = std::nullopt,
                                        std::vector<std::string>* warnings = nullptr) {
  const std::string trimmed = detail::trim(raw_text);
  if (!format && !trimmed.empty() && trimmed.front() == '{') {
    json parsed = json::parse(trimmed, nullptr, false);
    if (parsed.is_object() && parsed.contains("source_format"))
      return parse_canonical(raw_text);
  }
  SourceFormat f = format ? *format : detect_format(raw_text);
  switch (f) {
    case SourceFormat::RapidApiJson: return parse_rapidapi(raw_text, warnings);
    case SourceFormat::RestEndpointCatalog: return parse_rest_catalog(raw_text);
    case SourceFormat::BareFunction: return parse_bare_function(raw_text);
  }
  throw Error(ErrorCode::UnrecognizedFormat, "unreachable");
}

}  // namespace easytool
