#pragma once

// Completion provider contract plus the deterministic scripted implementation
// used for replayable runs and tests. The network-backed provider lives in
// net_provider.hpp so that library users do not pay for the HTTP stack.

#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "easytool/error.hpp"

namespace easytool {

struct DecodingConfig {
  double temperature = 0.0;
  int max_tokens = 1024;
};

class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  virtual std::string complete(const std::string& prompt, const DecodingConfig& decoding) = 0;
  virtual std::string id() const = 0;

  std::string complete(const std::string& prompt) { return complete(prompt, DecodingConfig{}); }
};

// ---------------------------------------------------------------------------
// Scripted provider: an ordered list of (prompt-matcher, response) pairs.
// A matcher is a set of substrings that must all occur in the prompt; the
// first matching entry answers. An entry may carry a response sequence for
// stateful scripts (fail-then-succeed); the last element repeats once the
// sequence is exhausted. A prompt no entry matches is a hard error.
class ScriptedProvider : public CompletionProvider {
 public:
  struct Entry {
    std::vector<std::string> match_all;
    std::vector<std::string> responses;
    size_t next = 0;
  };

  ScriptedProvider() = default;

  explicit ScriptedProvider(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  static ScriptedProvider from_json(const nlohmann::json& root) {
    const nlohmann::json& list = root.is_object() && root.contains("entries")
                                     ? root["entries"]
                                     : root;
    if (!list.is_array())
      throw Error(ErrorCode::ConfigError, "scripted provider fixture must be a JSON array");
    ScriptedProvider p;
    for (const auto& e : list) {
      Entry entry;
      if (e.contains("match")) entry.match_all.push_back(e["match"].get<std::string>());
      if (e.contains("match_all"))
        for (const auto& m : e["match_all"]) entry.match_all.push_back(m.get<std::string>());
      if (e.contains("response")) {
        entry.responses.push_back(e["response"].is_string() ? e["response"].get<std::string>()
                                                            : e["response"].dump());
      }
      if (e.contains("responses"))
        for (const auto& r : e["responses"])
          entry.responses.push_back(r.is_string() ? r.get<std::string>() : r.dump());
      if (entry.responses.empty())
        throw Error(ErrorCode::ConfigError, "scripted entry without a response");
      p.entries_.push_back(std::move(entry));
    }
    return p;
  }

  static ScriptedProvider from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open script fixture: " + path);
    nlohmann::json root;
    try {
      in >> root;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ConfigError, std::string("bad script fixture: ") + e.what());
    }
    return from_json(root);
  }

  ScriptedProvider& add(std::vector<std::string> match_all, std::string response) {
    entries_.push_back(Entry{std::move(match_all), {std::move(response)}, 0});
    return *this;
  }

  ScriptedProvider& add_sequence(std::vector<std::string> match_all,
                                 std::vector<std::string> responses) {
    entries_.push_back(Entry{std::move(match_all), std::move(responses), 0});
    return *this;
  }

  std::string complete(const std::string& prompt, const DecodingConfig&) override {
    for (auto& entry : entries_) {
      bool all = true;
      for (const auto& needle : entry.match_all) {
        if (prompt.find(needle) == std::string::npos) {
          all = false;
          break;
        }
      }
      if (!all) continue;
      const std::string& r = entry.responses[std::min(entry.next, entry.responses.size() - 1)];
      if (entry.next + 1 < entry.responses.size()) ++entry.next;
      return r;
    }
    throw Error(ErrorCode::ProviderError,
                "scripted provider has no entry matching prompt:\n" + prompt);
  }

  std::string id() const override { return "scripted"; }

 private:
  std::vector<Entry> entries_;
};

// ---------------------------------------------------------------------------
// Prompt templates are plain text with {placeholder} markers. Only known
// placeholders are substituted; any other braces pass through untouched, so
// literal JSON inside a template survives rendering.
inline std::string render_template(const std::string& tmpl,
                                   const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      size_t close = tmpl.find('}', i);
      if (close != std::string::npos) {
        std::string key = tmpl.substr(i + 1, close - i - 1);
        auto it = values.find(key);
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i]);
    ++i;
  }
  return out;
}

// Extracts the first balanced {...} block from a completion, tolerating
// surrounding prose. Quotes and escapes are honored.
inline std::string extract_brace_block(const std::string& text) {
  size_t start = text.find('{');
  if (start == std::string::npos)
    throw Error(ErrorCode::ProviderError, "no brace block in completion");
  int depth = 0;
  bool in_string = false;
  for (size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}') {
      --depth;
      if (depth == 0) return text.substr(start, i - start + 1);
    }
  }
  throw Error(ErrorCode::ProviderError, "unbalanced brace block in completion");
}

}  // namespace easytool
