#pragma once

// Token statistics over documentation/instruction corpora and the reduction
// ratio between them. Token counting is pluggable; the bundled fallback
// splits on whitespace and punctuation boundaries and needs no vocabulary.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "easytool/error.hpp"

namespace easytool {

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::size_t count(const std::string& text) const = 0;
  virtual std::string id() const = 0;
};

// Deterministic vocabulary-free tokenizer: a token is either a maximal run
// of alphanumeric/underscore characters or a single punctuation character.
// Whitespace only separates.
class FallbackTokenizer : public Tokenizer {
 public:
  std::size_t count(const std::string& text) const override {
    std::size_t n = 0;
    bool in_word = false;
    for (unsigned char c : text) {
      if (std::isspace(c)) {
        in_word = false;
      } else if (std::isalnum(c) || c == '_') {
        if (!in_word) ++n;
        in_word = true;
      } else {
        ++n;
        in_word = false;
      }
    }
    return n;
  }

  std::string id() const override { return "fallback"; }
};

// Byte-pair encoder over a tiktoken-style vocabulary file: one
// "<base64 token> <rank>" pair per line. Counting applies merges greedily by
// lowest rank over the byte sequence of each whitespace-delimited chunk.
class BpeTokenizer : public Tokenizer {
 public:
  explicit BpeTokenizer(const std::string& vocab_path, std::string id = "bpe")
      : id_(std::move(id)) {
    std::ifstream in(vocab_path);
    if (!in)
      throw Error(ErrorCode::ConfigError, "cannot open BPE vocabulary: " + vocab_path);
    std::string token_b64;
    long long rank;
    while (in >> token_b64 >> rank) ranks_[decode_base64(token_b64)] = rank;
    if (ranks_.empty())
      throw Error(ErrorCode::ConfigError, "empty BPE vocabulary: " + vocab_path);
  }

  std::size_t count(const std::string& text) const override {
    std::size_t total = 0;
    std::size_t i = 0;
    while (i < text.size()) {
      if (std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      total += encode_chunk(text.substr(i, j - i));
      i = j;
    }
    return total;
  }

  std::string id() const override { return id_; }

 private:
  std::size_t encode_chunk(const std::string& chunk) const {
    // Start from single bytes; repeatedly merge the adjacent pair with the
    // lowest rank until no merge applies.
    std::vector<std::string> parts;
    for (char c : chunk) parts.emplace_back(1, c);
    while (parts.size() > 1) {
      long long best_rank = -1;
      std::size_t best_at = 0;
      for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
        auto it = ranks_.find(parts[k] + parts[k + 1]);
        if (it != ranks_.end() && (best_rank < 0 || it->second < best_rank)) {
          best_rank = it->second;
          best_at = k;
        }
      }
      if (best_rank < 0) break;
      parts[best_at] += parts[best_at + 1];
      parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(best_at) + 1);
    }
    return parts.size();
  }

  static std::string decode_base64(const std::string& in) {
    static const std::string alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    std::uint32_t buf = 0;
    int bits = 0;
    for (char c : in) {
      if (c == '=') break;
      std::size_t v = alphabet.find(c);
      if (v == std::string::npos) continue;
      buf = (buf << 6) | static_cast<std::uint32_t>(v);
      bits += 6;
      if (bits >= 8) {
        bits -= 8;
        out.push_back(static_cast<char>((buf >> bits) & 0xFF));
      }
    }
    return out;
  }

  std::map<std::string, long long> ranks_;
  std::string id_;
};

struct CorpusStats {
  double avg_description_tokens = 0.0;
  double avg_document_tokens = 0.0;
  bool has_usage_examples = false;
  std::size_t n_documents = 0;
};

struct CorpusEntry {
  std::string description;
  std::string full_document;
  bool has_examples = false;
};

inline std::size_t count_tokens(const std::string& text, const Tokenizer& tk) {
  return tk.count(text);
}

// Half-up rounding to two decimals, matching the published presentation.
inline double round_half_up_2dp(double v) {
  double scaled = std::abs(v) * 100.0;
  double rounded = std::floor(scaled + 0.5) / 100.0;
  return v < 0 ? -rounded : rounded;
}

inline double reduction_ratio(long long doc_tokens, long long ins_tokens) {
  if (doc_tokens <= 0)
    throw Error(ErrorCode::DomainError, "doc_tokens must be positive");
  if (ins_tokens < 0)
    throw Error(ErrorCode::DomainError, "ins_tokens must be nonnegative");
  double pct = 100.0 * static_cast<double>(doc_tokens - ins_tokens) /
               static_cast<double>(doc_tokens);
  return round_half_up_2dp(pct);
}

inline CorpusStats corpus_stats(const std::vector<CorpusEntry>& docs, const Tokenizer& tk) {
  if (docs.empty()) throw Error(ErrorCode::DomainError, "empty corpus");
  CorpusStats stats;
  stats.n_documents = docs.size();
  stats.has_usage_examples = true;
  double desc_sum = 0.0, doc_sum = 0.0;
  for (const auto& d : docs) {
    desc_sum += static_cast<double>(tk.count(d.description));
    doc_sum += static_cast<double>(tk.count(d.full_document));
    if (!d.has_examples) stats.has_usage_examples = false;
  }
  stats.avg_description_tokens = desc_sum / static_cast<double>(docs.size());
  stats.avg_document_tokens = doc_sum / static_cast<double>(docs.size());
  return stats;
}

}  // namespace easytool
