#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include <json.hpp>

#include "easytool/tokens.hpp"
#include "test_support.hpp"

using namespace easytool;

namespace {
const std::string kFixtures = EASYTOOL_FIXTURE_DIR "/fixtures/";

// Independent 2-decimal half-up oracle via integer arithmetic on the
// percentage expressed in hundredths.
double ratio_oracle(long long doc_tokens, long long ins_tokens) {
  long double pct = 100.0L * (long double)(doc_tokens - ins_tokens) / (long double)doc_tokens;
  long double scaled = pct * 100.0L;
  long long rounded = (long long)std::floor(std::abs(scaled) + 0.5L);
  long double out = (long double)rounded / 100.0L;
  return (double)(pct < 0 ? -out : out);
}
}  // namespace

TEST_CASE("published reduction ratios reproduce exactly") {
  CHECK(reduction_ratio(2530, 748) == 70.43);
  CHECK(reduction_ratio(3881, 103) == 97.35);
}

TEST_CASE("reduction ratio matches the integer oracle on random inputs") {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    long long doc = 1 + (long long)(rng() % 100000);
    long long ins = (long long)(rng() % 120000);  // may exceed doc: negative ratio
    INFO(doc << " -> " << ins);
    CHECK(reduction_ratio(doc, ins) == Catch::Approx(ratio_oracle(doc, ins)).margin(1e-12));
  }
}

TEST_CASE("reduction ratio properties and domain errors") {
  CHECK(reduction_ratio(100, 0) == 100.0);
  CHECK(reduction_ratio(100, 100) == 0.0);
  CHECK(reduction_ratio(100, 150) == -50.0);
  CHECK_THROWS_MATCHES(reduction_ratio(0, 10), Error, ErrorCodeIs(ErrorCode::DomainError));
  CHECK_THROWS_MATCHES(reduction_ratio(-5, 10), Error, ErrorCodeIs(ErrorCode::DomainError));
  CHECK_THROWS_MATCHES(reduction_ratio(10, -1), Error, ErrorCodeIs(ErrorCode::DomainError));
}

TEST_CASE("half-up rounding is sign-symmetric and breaks ties upward") {
  CHECK(round_half_up_2dp(0.125) == 0.13);
  CHECK(round_half_up_2dp(-0.125) == -0.13);
  CHECK(round_half_up_2dp(0.124) == 0.12);
  CHECK(round_half_up_2dp(70.425) == 70.43);
  CHECK(round_half_up_2dp(0.0) == 0.0);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-1000.0, 1000.0);
  for (int i = 0; i < 200; ++i) {
    double v = dist(rng);
    CHECK(round_half_up_2dp(-v) == -round_half_up_2dp(v));
  }
}

TEST_CASE("fallback tokenizer counts word runs and single punctuation") {
  FallbackTokenizer tk;
  CHECK(tk.count("") == 0);
  CHECK(tk.count("   \t\n") == 0);
  CHECK(tk.count("hello world") == 2);
  CHECK(tk.count("snake_case_id stays one") == 3);
  // "a,b" -> a , b ; parentheses and period each count.
  CHECK(tk.count("a,b") == 3);
  CHECK(tk.count("f(x).") == 5);
  CHECK(tk.count("{\"k\": 1}") == 7);
}

TEST_CASE("bpe tokenizer applies merges by rank") {
  BpeTokenizer tk(kFixtures + "bpe_vocab.txt");
  // Vocabulary: ab(0), abc(1), lo(2), low(3), er(4).
  // a b c -> [ab] c -> [abc]          : 1 token
  CHECK(tk.count("abc") == 1);
  // l o w e r -> [lo] w e r -> [low] e r -> [low][er] : 2 tokens
  CHECK(tk.count("lower") == 2);
  CHECK(tk.count("abc lower") == 3);
  // No merges apply: each byte is one token.
  CHECK(tk.count("xyz") == 3);
  // Whitespace splits chunks before merging.
  CHECK(tk.count("a bc") == 3);
  CHECK(tk.count("") == 0);
}

TEST_CASE("bpe tokenizer configuration errors") {
  CHECK_THROWS_MATCHES(BpeTokenizer("/nonexistent/vocab.txt"), Error,
                       ErrorCodeIs(ErrorCode::ConfigError));
  std::string empty = "/tmp/easytool_empty_vocab.txt";
  { std::ofstream out(empty); }
  CHECK_THROWS_MATCHES(BpeTokenizer(empty), Error, ErrorCodeIs(ErrorCode::ConfigError));
  std::remove(empty.c_str());
}

TEST_CASE("corpus stats averages match a hand computation") {
  FallbackTokenizer tk;
  std::vector<CorpusEntry> corpus = {
      {"one two three", "one two three four", true},   // 3 desc, 4 doc
      {"five", "five six", true},                      // 1 desc, 2 doc
  };
  CorpusStats stats = corpus_stats(corpus, tk);
  CHECK(stats.n_documents == 2);
  CHECK(stats.avg_description_tokens == Catch::Approx(2.0));
  CHECK(stats.avg_document_tokens == Catch::Approx(3.0));
  CHECK(stats.has_usage_examples);

  corpus[1].has_examples = false;
  CHECK_FALSE(corpus_stats(corpus, tk).has_usage_examples);

  CHECK_THROWS_MATCHES(corpus_stats({}, tk), Error, ErrorCodeIs(ErrorCode::DomainError));
}

TEST_CASE("golden stats fixture agrees with a recomputation") {
  nlohmann::json golden =
      nlohmann::json::parse(read_text_file(EASYTOOL_FIXTURE_DIR "/golden/stats_5doc.json"));
  FallbackTokenizer tk;
  std::vector<CorpusEntry> corpus;
  std::istringstream in(read_text_file(kFixtures + "corpus5.jsonl"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    corpus.push_back({j.value("tool_description", ""), line, false});
  }
  CorpusStats stats = corpus_stats(corpus, tk);
  CHECK(golden["n_documents"] == stats.n_documents);
  CHECK(golden["avg_description_tokens"].get<double>() ==
        Catch::Approx(stats.avg_description_tokens));
  CHECK(golden["avg_document_tokens"].get<double>() ==
        Catch::Approx(stats.avg_document_tokens));
  CHECK(golden["has_usage_examples"] == stats.has_usage_examples);
}
