#pragma once

// Embedding of tool descriptions, exhaustive cosine-similarity top-K search
// over the tool inventory, and NDCG scoring of rankings.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "easytool/error.hpp"
#include "easytool/instruct.hpp"

namespace easytool {

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<double> embed(const std::string& text) const = 0;
  virtual std::size_t dimension() const = 0;
  virtual std::string id() const = 0;
};

// Deterministic embedding: feature-hashed bag of lowercased word tokens,
// L2-normalized. FNV-1a keeps the bucket assignment platform-independent.
class HashEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit HashEmbeddingProvider(std::size_t dim = 256) : dim_(dim) {}

  std::vector<double> embed(const std::string& text) const override {
    std::vector<double> v(dim_, 0.0);
    std::string word;
    auto flush = [&] {
      if (word.empty()) return;
      v[fnv1a(word) % dim_] += 1.0;
      word.clear();
    };
    for (unsigned char c : text) {
      if (std::isalnum(c))
        word.push_back(static_cast<char>(std::tolower(c)));
      else
        flush();
    }
    flush();
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (double& x : v) x /= norm;
    }
    return v;
  }

  std::size_t dimension() const override { return dim_; }
  std::string id() const override { return "hash-" + std::to_string(dim_); }

 private:
  static std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return h;
  }

  std::size_t dim_;
};

inline double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0)
    throw Error(ErrorCode::ZeroVector, "cosine similarity of an all-zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

struct IndexEntry {
  std::string tool_id;
  std::string description;
  std::vector<double> vector;
};

struct RetrievalIndex {
  std::vector<IndexEntry> entries;
  std::size_t dimension = 0;
  std::string provider_id;
};

struct ScoredTool {
  std::string tool_id;
  double score = 0.0;

  bool operator==(const ScoredTool&) const = default;
};

using RankedResult = std::vector<ScoredTool>;

inline RetrievalIndex build_index(const std::vector<ToolInstruction>& instructions,
                                  const EmbeddingProvider& provider) {
  RetrievalIndex index;
  index.dimension = provider.dimension();
  index.provider_id = provider.id();
  std::set<std::string> seen;
  for (const auto& ins : instructions) {
    if (ins.description.empty())
      throw Error(ErrorCode::IndexBuildError,
                  "empty description for tool '" + ins.tool_name + "'");
    if (!seen.insert(ins.tool_name).second)
      throw Error(ErrorCode::IndexBuildError, "duplicate tool_id '" + ins.tool_name + "'");
    index.entries.push_back({ins.tool_name, ins.description, provider.embed(ins.description)});
  }
  // Entry order is canonicalized so permuted inputs build equal indices.
  std::sort(index.entries.begin(), index.entries.end(),
            [](const IndexEntry& a, const IndexEntry& b) { return a.tool_id < b.tool_id; });
  return index;
}

// Exhaustive scan: similarity descending, ties broken by ascending tool_id.
inline RankedResult top_k(const RetrievalIndex& index, const std::string& query,
                          std::size_t k, const EmbeddingProvider& provider) {
  if (k < 1) throw Error(ErrorCode::DomainError, "k must be >= 1");
  std::vector<double> q = provider.embed(query);
  RankedResult scored;
  scored.reserve(index.entries.size());
  for (const auto& e : index.entries)
    scored.push_back({e.tool_id, cosine_similarity(q, e.vector)});
  std::sort(scored.begin(), scored.end(), [](const ScoredTool& a, const ScoredTool& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.tool_id < b.tool_id;
  });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

// NDCG@k with binary gains: discount log2(position + 1), positions from 1,
// ideal DCG for |relevant| items truncated at k. Zero when nothing is
// relevant.
inline double ndcg_at_k(const std::vector<std::string>& ranked,
                        const std::set<std::string>& relevant, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::DomainError, "k must be >= 1");
  if (relevant.empty()) return 0.0;
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i)
    if (relevant.count(ranked[i]))
      dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, relevant.size()); ++i)
    idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  return dcg / idcg;
}

// ---------------------------------------------------------------------------
// Index persistence. The provider id is part of the file; loading under a
// different provider is refused.

inline void save_index(const RetrievalIndex& index, const std::string& path) {
  ordered_json out;
  out["version"] = 1;
  out["provider_id"] = index.provider_id;
  out["dimension"] = index.dimension;
  out["entries"] = ordered_json::array();
  for (const auto& e : index.entries) {
    ordered_json entry;
    entry["tool_id"] = e.tool_id;
    entry["description"] = e.description;
    entry["vector"] = e.vector;
    out["entries"].push_back(std::move(entry));
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot write index file: " + path);
  f << out.dump(2) << "\n";
}

inline RetrievalIndex load_index(const std::string& path, const EmbeddingProvider& provider) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot open index file: " + path);
  nlohmann::json root;
  try {
    f >> root;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("bad index file: ") + e.what());
  }
  RetrievalIndex index;
  index.provider_id = root.at("provider_id").get<std::string>();
  if (index.provider_id != provider.id())
    throw Error(ErrorCode::ConfigError, "index was built with provider '" + index.provider_id +
                                            "', not '" + provider.id() + "'");
  index.dimension = root.at("dimension").get<std::size_t>();
  for (const auto& e : root.at("entries")) {
    IndexEntry entry;
    entry.tool_id = e.at("tool_id").get<std::string>();
    entry.description = e.at("description").get<std::string>();
    entry.vector = e.at("vector").get<std::vector<double>>();
    if (entry.vector.size() != index.dimension)
      throw Error(ErrorCode::DimensionMismatch,
                  "entry '" + entry.tool_id + "' has wrong dimension");
    index.entries.push_back(std::move(entry));
  }
  return index;
}

}  // namespace easytool
