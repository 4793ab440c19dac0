// easytool: single entry point for the documentation-to-instruction
// pipeline, retrieval index, agent runtime and metrics harness.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage/config error.
// Logs go to stderr; data goes to files or stdout.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "easytool/agent.hpp"
#include "easytool/doc.hpp"
#include "easytool/eval.hpp"
#include "easytool/executor.hpp"
#include "easytool/instruct.hpp"
#include "easytool/net_provider.hpp"
#include "easytool/prompts.hpp"
#include "easytool/provider.hpp"
#include "easytool/retrieval.hpp"
#include "easytool/tokens.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using easytool::Error;
using easytool::ErrorCode;
using easytool::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write file: " + path);
  out << content;
}

std::vector<std::string> read_jsonl_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
  }
  return lines;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Provider/file specs with absolute paths are reduced to basenames so that
// meta hashes do not depend on where the tree is checked out.
std::string stable_spec(const std::string& spec) {
  size_t colon = spec.find(':');
  if (colon == std::string::npos) return spec;
  std::string head = spec.substr(0, colon);
  std::string tail = spec.substr(colon + 1);
  if (tail.find('/') != std::string::npos)
    tail = std::filesystem::path(tail).filename().string();
  return head + ":" + tail;
}

// Every structured output file opens with this record.
ordered_json meta_record(const std::string& config_text, long long seed) {
  ordered_json meta;
  meta["type"] = "meta";
  meta["config_hash"] = fnv1a(config_text + "#" + std::to_string(seed));
  meta["seed"] = seed;
  meta["version"] = kVersion;
  return meta;
}

bool is_meta_line(const nlohmann::json& j) {
  return j.is_object() && j.value("type", "") == "meta";
}

std::unique_ptr<easytool::CompletionProvider> make_provider(const std::string& spec) {
  if (spec.rfind("scripted:", 0) == 0) {
    return std::make_unique<easytool::ScriptedProvider>(
        easytool::ScriptedProvider::from_file(spec.substr(9)));
  }
  if (spec.rfind("network:", 0) == 0) {
    // network:<endpoint>:<model>[:<credential-env>] -- endpoint contains
    // "://" so split from the right.
    std::string rest = spec.substr(8);
    size_t last = rest.rfind(':');
    if (last == std::string::npos || rest.find("://") == std::string::npos)
      throw Error(ErrorCode::UsageError, "expected network:<endpoint>:<model>[:<env>]");
    easytool::NetworkProviderConfig cfg;
    size_t scheme = rest.find("://");
    size_t model_sep = rest.find(':', scheme + 3);
    if (model_sep == std::string::npos)
      throw Error(ErrorCode::UsageError, "expected network:<endpoint>:<model>[:<env>]");
    // A port may follow the host; the model is the segment after the last
    // non-numeric colon split. Keep it simple: split on the last ':' and, if
    // that segment is numeric (a port), reject.
    cfg.endpoint = rest.substr(0, model_sep);
    std::string tail = rest.substr(model_sep + 1);
    size_t env_sep = tail.find(':');
    if (env_sep == std::string::npos) {
      cfg.model = tail;
    } else {
      cfg.model = tail.substr(0, env_sep);
      cfg.credential_env = tail.substr(env_sep + 1);
    }
    return std::make_unique<easytool::NetworkProvider>(cfg);
  }
  throw Error(ErrorCode::UsageError, "unknown provider spec '" + spec +
                                         "' (use scripted:<file> or network:<...>)");
}

std::unique_ptr<easytool::Tokenizer> make_tokenizer(const std::string& spec) {
  if (spec == "fallback") return std::make_unique<easytool::FallbackTokenizer>();
  if (spec.rfind("cl100k:", 0) == 0)
    return std::make_unique<easytool::BpeTokenizer>(spec.substr(7), "cl100k");
  if (spec.rfind("bpe:", 0) == 0)
    return std::make_unique<easytool::BpeTokenizer>(spec.substr(4));
  throw Error(ErrorCode::UsageError,
              "unknown tokenizer '" + spec + "' (use fallback, bpe:<vocab>, cl100k:<vocab>)");
}

std::vector<easytool::ToolDocumentation> load_docs(const std::string& path) {
  std::vector<easytool::ToolDocumentation> docs;
  for (const auto& line : read_jsonl_lines(path)) {
    nlohmann::json j = nlohmann::json::parse(line);
    if (is_meta_line(j)) continue;
    docs.push_back(easytool::doc_from_json(j));
  }
  return docs;
}

std::vector<easytool::ToolInstruction> load_instructions(const std::string& path) {
  std::vector<easytool::ToolInstruction> out;
  for (const auto& line : read_jsonl_lines(path)) {
    nlohmann::json j = nlohmann::json::parse(line);
    if (is_meta_line(j)) continue;
    out.push_back(easytool::instruction_from_json(j));
  }
  return out;
}

// A trace file may hold several traces; each starts at a header record.
std::vector<easytool::AgentTrace> load_traces(const std::string& path) {
  std::vector<easytool::AgentTrace> traces;
  std::string block;
  for (const auto& line : read_jsonl_lines(path)) {
    nlohmann::json j = nlohmann::json::parse(line);
    if (is_meta_line(j)) continue;
    block += line + "\n";
    if (j.value("type", "") == "final") {
      traces.push_back(easytool::parse_trace(block));
      block.clear();
    }
  }
  if (!block.empty())
    throw Error(ErrorCode::MalformedDocument, "trailing incomplete trace in " + path);
  return traces;
}

// ---------------------------------------------------------------------------

int cmd_ingest(const std::string& format, const std::string& in_path,
               const std::string& out_path, bool jsonl, long long seed) {
  std::optional<easytool::SourceFormat> fmt;
  if (format == "rapidapi") fmt = easytool::SourceFormat::RapidApiJson;
  else if (format == "rest") fmt = easytool::SourceFormat::RestEndpointCatalog;
  else if (format == "bare") fmt = easytool::SourceFormat::BareFunction;
  else if (format != "auto")
    throw Error(ErrorCode::UsageError, "unknown format '" + format + "'");

  std::vector<std::string> warnings;
  std::ostringstream out;
  if (jsonl) {
    out << meta_record("ingest:" + format, seed).dump() << "\n";
    for (const auto& line : read_jsonl_lines(in_path)) {
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (!j.is_discarded() && is_meta_line(j)) continue;
      auto doc = easytool::parse_document(line, fmt, &warnings);
      out << easytool::doc_to_json(doc).dump() << "\n";
    }
  } else {
    auto doc = easytool::parse_document(read_file(in_path), fmt, &warnings);
    out << easytool::serialize_doc(doc);
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  if (out_path.empty() || out_path == "-")
    std::cout << out.str();
  else
    write_file(out_path, out.str());
  return 0;
}

int cmd_refine(const std::string& in_path, const std::string& provider_spec,
               const std::string& out_path, const std::string& prompt_dir,
               const std::string& executor_name, long long seed) {
  easytool::PromptLibrary lib =
      prompt_dir.empty() ? easytool::PromptLibrary{} : easytool::PromptLibrary::load(prompt_dir);
  auto provider = make_provider(provider_spec);
  std::unique_ptr<easytool::ToolExecutor> executor;
  if (executor_name == "arithmetic")
    executor = std::make_unique<easytool::ArithmeticExecutor>();
  else if (executor_name != "none")
    throw Error(ErrorCode::UsageError, "unknown executor '" + executor_name + "'");

  std::ostringstream out;
  out << meta_record("refine:" + stable_spec(provider_spec), seed).dump() << "\n";
  for (const auto& doc : load_docs(in_path)) {
    easytool::ToolInstruction ins =
        easytool::build_instruction(doc, *provider, executor.get(), lib);
    out << easytool::instruction_to_json(ins).dump() << "\n";
  }
  if (out_path.empty() || out_path == "-")
    std::cout << out.str();
  else
    write_file(out_path, out.str());
  return 0;
}

int cmd_validate(const std::string& docs_path, const std::string& ins_path,
                 const std::string& executor_name, const std::string& out_path,
                 long long seed) {
  std::unique_ptr<easytool::ToolExecutor> executor;
  if (executor_name == "arithmetic")
    executor = std::make_unique<easytool::ArithmeticExecutor>();
  else if (executor_name != "none")
    throw Error(ErrorCode::UsageError, "unknown executor '" + executor_name + "'");

  std::map<std::string, easytool::ToolDocumentation> docs;
  for (auto& d : load_docs(docs_path)) docs[d.tool_name] = std::move(d);

  ordered_json reports = ordered_json::array();
  bool all_ok = true;
  for (const auto& ins : load_instructions(ins_path)) {
    auto it = docs.find(ins.tool_name);
    if (it == docs.end())
      throw Error(ErrorCode::MissingField, "no documentation for tool '" + ins.tool_name + "'");
    for (const auto& g : ins.function_guidelines) {
      const easytool::FunctionSpec* spec = it->second.find_function(g.function_name);
      if (!spec)
        throw Error(ErrorCode::MissingField,
                    "no function spec for '" + g.function_name + "' in '" + ins.tool_name + "'");
      auto report =
          easytool::validate_guideline(g, *spec, executor.get(), ins.tool_name);
      ordered_json r;
      r["tool_name"] = ins.tool_name;
      r["function_name"] = report.function_name;
      r["executed"] = report.executed;
      r["parameter_schema_ok"] = report.parameter_schema_ok;
      r["execution_ok"] = report.execution_ok ? ordered_json(*report.execution_ok)
                                              : ordered_json(nullptr);
      r["failure_reason"] = report.failure_reason ? ordered_json(*report.failure_reason)
                                                  : ordered_json(nullptr);
      reports.push_back(std::move(r));
      if (!report.parameter_schema_ok ||
          (report.execution_ok.has_value() && !*report.execution_ok))
        all_ok = false;
    }
  }
  ordered_json out;
  out["meta"] = meta_record("validate", seed);
  out["reports"] = std::move(reports);
  std::string text = out.dump(2) + "\n";
  if (out_path.empty() || out_path == "-")
    std::cout << text;
  else
    write_file(out_path, text);
  return all_ok ? 0 : 1;
}

int cmd_stats(const std::string& tokenizer_spec, const std::string& in_path,
              const std::string& out_path, long long seed) {
  auto tk = make_tokenizer(tokenizer_spec);
  std::vector<easytool::CorpusEntry> entries;
  long long total_tokens = 0;
  for (const auto& line : read_jsonl_lines(in_path)) {
    nlohmann::json j = nlohmann::json::parse(line);
    if (is_meta_line(j)) continue;
    easytool::CorpusEntry e;
    if (j.contains("function_guidelines")) {
      // Instruction corpus: descriptions are the instruction descriptions and
      // every entry carries a worked example.
      e.description = j.value("description", "");
      e.full_document = line;
      e.has_examples = true;
    } else {
      e.description = j.value("tool_description", "");
      e.full_document = line;
      e.has_examples = false;
    }
    total_tokens += static_cast<long long>(tk->count(e.full_document));
    entries.push_back(std::move(e));
  }
  easytool::CorpusStats stats = easytool::corpus_stats(entries, *tk);
  ordered_json out;
  out["meta"] = meta_record("stats:" + stable_spec(tokenizer_spec), seed);
  out["tokenizer"] = tk->id();
  out["n_documents"] = stats.n_documents;
  out["avg_description_tokens"] = stats.avg_description_tokens;
  out["avg_document_tokens"] = stats.avg_document_tokens;
  out["total_document_tokens"] = total_tokens;
  out["has_usage_examples"] = stats.has_usage_examples;
  std::string text = out.dump(2) + "\n";
  if (out_path.empty() || out_path == "-")
    std::cout << text;
  else
    write_file(out_path, text);
  return 0;
}

int cmd_index_build(const std::string& ins_path, const std::string& out_path,
                    std::size_t dim) {
  easytool::HashEmbeddingProvider embedder(dim);
  auto index = easytool::build_index(load_instructions(ins_path), embedder);
  easytool::save_index(index, out_path);
  std::cerr << "indexed " << index.entries.size() << " tools (d=" << dim << ")\n";
  return 0;
}

int cmd_index_query(const std::string& index_path, const std::string& query, std::size_t k,
                    std::size_t dim) {
  easytool::HashEmbeddingProvider embedder(dim);
  auto index = easytool::load_index(index_path, embedder);
  ordered_json out = ordered_json::array();
  for (const auto& r : easytool::top_k(index, query, k, embedder)) {
    ordered_json item;
    item["tool_id"] = r.tool_id;
    item["score"] = r.score;
    out.push_back(std::move(item));
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_index_eval(const std::string& index_path, const std::string& qrels_path,
                   std::size_t dim) {
  easytool::HashEmbeddingProvider embedder(dim);
  auto index = easytool::load_index(index_path, embedder);
  double sum1 = 0.0, sum5 = 0.0;
  std::size_t n = 0;
  ordered_json per_query = ordered_json::array();
  for (const auto& line : read_jsonl_lines(qrels_path)) {
    nlohmann::json j = nlohmann::json::parse(line);
    if (is_meta_line(j)) continue;
    std::string query = j.at("query").get<std::string>();
    std::set<std::string> relevant;
    for (const auto& t : j.at("relevant")) relevant.insert(t.get<std::string>());
    std::vector<std::string> ranked;
    for (const auto& r : easytool::top_k(index, query, index.entries.size(), embedder))
      ranked.push_back(r.tool_id);
    double n1 = easytool::ndcg_at_k(ranked, relevant, 1);
    double n5 = easytool::ndcg_at_k(ranked, relevant, 5);
    sum1 += n1;
    sum5 += n5;
    ++n;
    ordered_json q;
    q["query"] = query;
    q["ndcg@1"] = n1;
    q["ndcg@5"] = n5;
    per_query.push_back(std::move(q));
  }
  if (n == 0) throw Error(ErrorCode::EmptyInput, "qrels file has no queries");
  ordered_json out;
  out["queries"] = std::move(per_query);
  out["mean"]["ndcg@1"] = sum1 / static_cast<double>(n);
  out["mean"]["ndcg@5"] = sum5 / static_cast<double>(n);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_run(const std::string& mode, const std::string& request_arg,
            const std::string& config_path, const std::string& trace_out) {
  std::string config_text = read_file(config_path);
  nlohmann::json config = nlohmann::json::parse(config_text);
  long long seed = config.value("seed", 0LL);

  std::string request = request_arg;
  if (std::filesystem::exists(request_arg)) request = easytool::detail::trim(read_file(request_arg));

  easytool::AgentConfig agent_config;
  if (config.contains("agent")) {
    agent_config.max_trials = config["agent"].value("max_trials", 3);
    agent_config.top_k = config["agent"].value("top_k", 5);
    agent_config.step_budget = config["agent"].value("step_budget", 30);
  }
  agent_config.instruction_mode = easytool::instruction_mode_from_name(mode);

  auto provider = make_provider(config.at("provider").get<std::string>());
  easytool::PromptLibrary lib;
  if (config.contains("prompt_dir"))
    lib = easytool::PromptLibrary::load(config["prompt_dir"].get<std::string>());

  easytool::ToolRegistry registry;
  for (const auto& d : load_docs(config.at("docs").get<std::string>())) registry.add(d);

  std::map<std::string, easytool::ToolInstruction> instructions;
  for (auto& ins : load_instructions(config.at("instructions").get<std::string>()))
    instructions[ins.tool_name] = std::move(ins);

  std::size_t dim = config.value("embedding_dim", 256);
  easytool::HashEmbeddingProvider embedder(dim);
  std::vector<easytool::ToolInstruction> ins_list;
  for (const auto& [_, ins] : instructions) ins_list.push_back(ins);
  auto index = easytool::build_index(ins_list, embedder);

  std::unique_ptr<easytool::ToolExecutor> executor;
  std::string executor_name = config.value("executor", "arithmetic");
  if (executor_name == "arithmetic")
    executor = std::make_unique<easytool::ArithmeticExecutor>();
  else
    throw Error(ErrorCode::ConfigError, "unknown executor '" + executor_name + "'");

  easytool::AgentDeps deps;
  deps.provider = provider.get();
  deps.embedder = &embedder;
  deps.index = &index;
  deps.registry = &registry;
  deps.executor = executor.get();
  deps.instructions = &instructions;
  deps.prompts = lib;

  easytool::AgentTrace trace = easytool::run_agent(request, agent_config, deps);
  std::string text = meta_record(config_text, seed).dump() + "\n" +
                     easytool::serialize_trace(trace);
  if (trace_out.empty() || trace_out == "-")
    std::cout << text;
  else
    write_file(trace_out, text);
  std::cerr << "terminated: " << easytool::terminated_reason_name(trace.terminated_reason)
            << "\n";
  return 0;
}

int cmd_eval(const std::string& traces_path, const std::string& gold_path,
             const std::string& metrics_arg, const std::string& judge_spec,
             const std::string& report_path, bool per_task_errors, long long seed) {
  std::vector<easytool::AgentTrace> traces = load_traces(traces_path);
  std::vector<easytool::GoldRecord> golds;
  if (!gold_path.empty())
    for (const auto& line : read_jsonl_lines(gold_path))
      golds.push_back(easytool::gold_from_json(nlohmann::json::parse(line)));

  std::set<std::string> metrics;
  {
    std::stringstream ss(metrics_arg);
    std::string m;
    while (std::getline(ss, m, ',')) metrics.insert(m);
  }

  easytool::EvaluationReport report;
  report.n = traces.size();
  report.pass_rate = easytool::pass_rate(traces);
  if (metrics.count("success")) {
    auto judge = make_provider(judge_spec);
    report.success_rate = easytool::success_rate(traces, *judge);
  }
  if (metrics.count("cp")) report.cp_rate = easytool::correct_path_rate(traces, golds);
  if (metrics.count("acc")) report.accuracy = easytool::numeric_accuracy_rate(traces, golds);
  auto err = easytool::tool_error_rate(traces, per_task_errors);
  report.tool_error_rate = err.rate;
  report.error_breakdown = err.breakdown;

  ordered_json out;
  out["meta"] = meta_record("eval:" + metrics_arg, seed);
  out["report"] = easytool::report_to_json(report);
  std::string text = out.dump(2) + "\n";
  if (report_path.empty() || report_path == "-")
    std::cout << text;
  else
    write_file(report_path, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"easytool: unified tool instructions, retrieval and agent metrics"};
  app.require_subcommand(1);

  long long seed = 0;
  app.add_option("--seed", seed, "seed echoed into all outputs")->capture_default_str();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "normalize tool documentation");
  std::string ingest_format = "auto", ingest_in, ingest_out;
  bool ingest_jsonl = false;
  ingest->add_option("--format", ingest_format, "auto|rapidapi|rest|bare");
  ingest->add_option("--in", ingest_in, "input file")->required();
  ingest->add_option("--out", ingest_out, "output file (default stdout)");
  ingest->add_flag("--jsonl", ingest_jsonl, "input is a JSONL corpus, one document per line");

  // refine
  auto* refine = app.add_subcommand("refine", "generate tool instructions");
  std::string refine_in, refine_provider, refine_out, refine_prompt_dir,
      refine_executor = "none";
  refine->add_option("--in", refine_in, "canonical docs JSONL")->required();
  refine->add_option("--provider", refine_provider, "scripted:<file> or network:<...>")
      ->required();
  refine->add_option("--out", refine_out, "instructions JSONL (default stdout)");
  refine->add_option("--prompt-dir", refine_prompt_dir, "prompt template overrides");
  refine->add_option("--executor", refine_executor, "none|arithmetic");

  // validate
  auto* validate = app.add_subcommand("validate", "validate instruction examples");
  std::string val_docs, val_ins, val_executor = "none", val_out;
  validate->add_option("--docs", val_docs, "canonical docs JSONL")->required();
  validate->add_option("--ins", val_ins, "instructions JSONL")->required();
  validate->add_option("--executor", val_executor, "none|arithmetic");
  validate->add_option("--out", val_out, "report file (default stdout)");

  // stats
  auto* stats = app.add_subcommand("stats", "token statistics over a corpus");
  std::string stats_tokenizer = "fallback", stats_in, stats_out;
  stats->add_option("--tokenizer", stats_tokenizer, "fallback|bpe:<vocab>|cl100k:<vocab>");
  stats->add_option("--in", stats_in, "corpus JSONL")->required();
  stats->add_option("--out", stats_out, "stats file (default stdout)");

  // index
  auto* index = app.add_subcommand("index", "retrieval index operations");
  index->require_subcommand(1);
  std::size_t index_dim = 256;
  index->add_option("--dim", index_dim, "embedding dimension");
  auto* ib = index->add_subcommand("build", "build an index from instructions");
  std::string ib_ins, ib_out;
  ib->add_option("--ins", ib_ins, "instructions JSONL")->required();
  ib->add_option("--out", ib_out, "index file")->required();
  auto* iq = index->add_subcommand("query", "query an index");
  std::string iq_index, iq_query;
  std::size_t iq_k = 5;
  iq->add_option("--index", iq_index, "index file")->required();
  iq->add_option("--query", iq_query, "query text")->required();
  iq->add_option("--k", iq_k, "number of results");
  auto* ie = index->add_subcommand("eval", "NDCG@1/@5 against qrels");
  std::string ie_index, ie_qrels;
  ie->add_option("--index", ie_index, "index file")->required();
  ie->add_option("--qrels", ie_qrels, "qrels JSONL")->required();

  // run
  auto* run = app.add_subcommand("run", "run one agent session");
  std::string run_mode = "easytool", run_request, run_config, run_trace_out;
  run->add_option("--mode", run_mode, "raw|easytool");
  run->add_option("--request", run_request, "request text or file")->required();
  run->add_option("--config", run_config, "pipeline config JSON")->required();
  run->add_option("--trace-out", run_trace_out, "trace JSONL (default stdout)");

  // eval
  auto* eval = app.add_subcommand("eval", "compute metrics from traces");
  std::string ev_traces, ev_gold, ev_metrics = "pass,err", ev_judge, ev_report;
  bool ev_per_task = false;
  eval->add_option("--traces", ev_traces, "trace JSONL file")->required();
  eval->add_option("--gold", ev_gold, "gold JSONL file");
  eval->add_option("--metrics", ev_metrics, "comma list: pass,success,cp,acc,err");
  eval->add_option("--judge", ev_judge, "judge provider spec");
  eval->add_option("--report", ev_report, "report file (default stdout)");
  eval->add_flag("--per-task-errors", ev_per_task, "per-task tool error rate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*ingest) return cmd_ingest(ingest_format, ingest_in, ingest_out, ingest_jsonl, seed);
    if (*refine)
      return cmd_refine(refine_in, refine_provider, refine_out, refine_prompt_dir,
                        refine_executor, seed);
    if (*validate) return cmd_validate(val_docs, val_ins, val_executor, val_out, seed);
    if (*stats) return cmd_stats(stats_tokenizer, stats_in, stats_out, seed);
    if (*index) {
      if (*ib) return cmd_index_build(ib_ins, ib_out, index_dim);
      if (*iq) return cmd_index_query(iq_index, iq_query, iq_k, index_dim);
      if (*ie) return cmd_index_eval(ie_index, ie_qrels, index_dim);
    }
    if (*run) return cmd_run(run_mode, run_request, run_config, run_trace_out);
    if (*eval)
      return cmd_eval(ev_traces, ev_gold, ev_metrics, ev_judge, ev_report, ev_per_task, seed);
    throw Error(ErrorCode::UsageError, "no subcommand");
  } catch (const Error& e) {
    nlohmann::json err;
    err["error"] = easytool::error_code_name(e.code());
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return (e.code() == ErrorCode::UsageError || e.code() == ErrorCode::ConfigError) ? 2 : 1;
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = "RuntimeError";
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
