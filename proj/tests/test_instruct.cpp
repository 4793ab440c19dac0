#include <catch2/catch_amalgamated.hpp>

#include "easytool/doc.hpp"
#include "easytool/executor.hpp"
#include "easytool/instruct.hpp"
#include "easytool/provider.hpp"
#include "test_support.hpp"

using namespace easytool;

namespace {

const std::string kFixtures = EASYTOOL_FIXTURE_DIR "/fixtures/";

ToolDocumentation ebay_doc() {
  return parse_document(read_text_file(kFixtures + "ebay_rapidapi.json"));
}

// The worked example shipped with the guideline demo prompt.
FunctionGuideline ebay_guideline() {
  ToolDocumentation doc = ebay_doc();
  FunctionGuideline g;
  const FunctionSpec& fn = doc.functions[0];
  g.function_name = fn.name;
  g.purpose = fn.description;
  g.required_parameters = fn.required_parameters;
  g.optional_parameters = fn.optional_parameters;
  g.example.scenario =
      "if you want to know the details of the product with product ID 1954 in Germany from Ebay";
  g.example.parameters["product_id"] = 1954;
  g.example.parameters["country"] = "Germany";
  return g;
}

}  // namespace

TEST_CASE("description prompt embeds the demo pair and the documentation") {
  ToolDocumentation doc = ebay_doc();
  PromptLibrary lib;
  std::string prompt = render_description_prompt(doc, default_description_demos(lib), lib);
  CHECK(prompt.find("create a concise and effective tool usage description") !=
        std::string::npos);
  CHECK(prompt.find("TokopediaApi") != std::string::npos);  // demo doc
  CHECK(prompt.find("'Search Product' can search for products") != std::string::npos);
  CHECK(prompt.find("\"tool_name\": \"Ebay\"") != std::string::npos);
  CHECK(prompt.rfind("Tool usage description:\n") == prompt.size() - 24);
  // Without demos the example block is omitted entirely.
  std::string bare = render_description_prompt(doc, {}, lib);
  CHECK(bare.find("Here is an example") == std::string::npos);
}

TEST_CASE("description generation repairs rejected completions") {
  ToolDocumentation doc = ebay_doc();
  std::string good =
      "'Ebay' can get products from Ebay. 1. 'Product Details' can get product details.";

  SECTION("first completion accepted") {
    ScriptedProvider provider;
    provider.add({"Tool usage description:"}, good);
    CHECK(generate_description(doc, provider) == good);
  }
  SECTION("violations are fed back and repaired") {
    ScriptedProvider provider;
    provider.add_sequence({"Tool usage description:"},
                          {"a description that names no tool at all", good});
    std::string out = generate_description(doc, provider);
    CHECK(out == good);
  }
  SECTION("rejection after the repair budget") {
    ScriptedProvider provider;
    provider.add({"Tool usage description:"}, "still no names here");
    CHECK_THROWS_MATCHES(generate_description(doc, provider), Error,
                         ErrorCodeIs(ErrorCode::DescriptionRejected));
  }
  SECTION("empty and partial descriptions are violations") {
    CHECK(description_violation(doc, "").has_value());
    CHECK(description_violation(doc, "'Ebay' alone without functions").has_value());
    CHECK(description_violation(doc, "'Product Details' without the tool").has_value());
    CHECK_FALSE(description_violation(doc, good).has_value());
  }
}

TEST_CASE("guideline prompt carries the demo and the exact closing line") {
  ToolDocumentation doc = ebay_doc();
  PromptLibrary lib;
  std::string prompt =
      render_guideline_prompt("'Ebay' can get products from Ebay.", doc.functions[0],
                              doc.tool_name, lib);
  CHECK(prompt.find("If the parameters are null, you should set: "
                    "{\"Scenario\": XX, \"Parameters\":{}}") != std::string::npos);
  CHECK(prompt.find("One scenario for 'Product Details' of 'Ebay' is:") != std::string::npos);
  CHECK(prompt.find("Parameter List of 'Product Details':") != std::string::npos);
}

TEST_CASE("guideline generation validates the example against the schema") {
  ToolDocumentation doc = ebay_doc();
  const FunctionSpec& fn = doc.functions[0];
  std::string good =
      R"({"Scenario": "details of product 1954 in Germany", "Parameters": {"product_id": 1954, "country": "Germany"}})";

  SECTION("accepts a valid example with surrounding prose") {
    ScriptedProvider provider;
    provider.add({"One scenario"}, "Sure! Here it is: " + good + " Hope that helps.");
    FunctionGuideline g = generate_guideline("desc", fn, provider, doc.tool_name);
    CHECK(g.function_name == "Product Details");
    CHECK(g.example.parameters["product_id"] == 1954);
    // Parameter schema is copied verbatim from the source spec.
    CHECK(g.required_parameters == fn.required_parameters);
    CHECK(g.optional_parameters == fn.optional_parameters);
  }
  SECTION("repairs an undeclared key, then accepts") {
    ScriptedProvider provider;
    provider.add_sequence(
        {"One scenario"},
        {R"({"Scenario": "x", "Parameters": {"nonexistent": 1}})", good});
    FunctionGuideline g = generate_guideline("desc", fn, provider, doc.tool_name);
    CHECK(g.example.parameters.contains("product_id"));
  }
  SECTION("rejects after exhausting repairs") {
    ScriptedProvider provider;
    provider.add({"One scenario"}, "no json here at all");
    CHECK_THROWS_MATCHES(generate_guideline("desc", fn, provider, doc.tool_name), Error,
                         ErrorCodeIs(ErrorCode::GuidelineRejected));
  }
  SECTION("type mismatches are violations") {
    ScriptedProvider provider;
    provider.add({"One scenario"},
                 R"({"Scenario": "x", "Parameters": {"product_id": "not-a-number"}})");
    CHECK_THROWS_MATCHES(generate_guideline("desc", fn, provider, doc.tool_name), Error,
                         ErrorCodeIs(ErrorCode::GuidelineRejected));
  }
}

TEST_CASE("null-parameter rule for parameterless functions") {
  ToolDocumentation doc;
  doc.tool_name = "Tokopedia Super API";
  FunctionSpec fn;
  fn.name = "sortProductsMaster";
  fn.description = "the list of available sorting methods";
  doc.functions.push_back(fn);

  SECTION("an empty Parameters object is accepted") {
    ScriptedProvider provider;
    provider.add({"One scenario"}, R"({"Scenario": "list sorting methods", "Parameters": {}})");
    FunctionGuideline g = generate_guideline("desc", fn, provider, doc.tool_name);
    CHECK(g.example.parameters.empty());
  }
  SECTION("supplying parameters to a parameterless function is a violation") {
    ScriptedProvider provider;
    provider.add({"One scenario"},
                 R"({"Scenario": "x", "Parameters": {"sort": "asc"}})");
    CHECK_THROWS_MATCHES(generate_guideline("desc", fn, provider, doc.tool_name), Error,
                         ErrorCodeIs(ErrorCode::GuidelineRejected));
  }
}

TEST_CASE("validate_guideline flags every single-field mutant of the worked example") {
  ToolDocumentation doc = ebay_doc();
  const FunctionSpec& spec = doc.functions[0];
  FunctionGuideline original = ebay_guideline();
  CHECK(validate_guideline(original, spec).parameter_schema_ok);

  auto mutate = [&](auto&& fn) {
    FunctionGuideline m = original;
    fn(m);
    return m;
  };
  std::vector<FunctionGuideline> mutants;
  // 1. Required parameter value of the wrong type.
  mutants.push_back(mutate([](FunctionGuideline& m) {
    m.example.parameters["product_id"] = "1954";
  }));
  // 2. Optional parameter value of the wrong type.
  mutants.push_back(mutate([](FunctionGuideline& m) {
    m.example.parameters["country"] = 49;
  }));
  // 3. Unknown parameter key.
  mutants.push_back(mutate([](FunctionGuideline& m) {
    m.example.parameters["currency"] = "EUR";
  }));
  // 4. Misspelled required key (unknown key).
  mutants.push_back(mutate([](FunctionGuideline& m) {
    m.example.parameters.erase("product_id");
    m.example.parameters["productid"] = 1954;
  }));
  // 5. Boolean in a STRING slot.
  mutants.push_back(mutate([](FunctionGuideline& m) {
    m.example.parameters["country_code"] = true;
  }));
  // 6. Array in a NUMBER slot.
  mutants.push_back(mutate([](FunctionGuideline& m) {
    m.example.parameters["product_id"] = nlohmann::ordered_json::array({1954});
  }));
  for (std::size_t i = 0; i < mutants.size(); ++i) {
    INFO("mutant " << i + 1);
    ValidationReport r = validate_guideline(mutants[i], spec);
    CHECK_FALSE(r.parameter_schema_ok);
    CHECK(r.failure_reason.has_value());
  }

  // Omitting a required parameter without a default is a violation too;
  // Ebay's product_id carries a default, so build a defaultless spec.
  FunctionSpec strict = spec;
  strict.required_parameters[0].default_value.reset();
  FunctionGuideline omitted = original;
  omitted.example.parameters.erase("product_id");
  CHECK_FALSE(validate_guideline(omitted, strict).parameter_schema_ok);
  // With the default present the omission is fine.
  CHECK(validate_guideline(omitted, spec).parameter_schema_ok);
}

TEST_CASE("validate_guideline executes the example when given an executor") {
  ArithmeticExecutor executor;
  ToolDocumentation doc = parse_document("add_(input: List)");
  FunctionGuideline g;
  g.function_name = "add_";
  g.required_parameters = doc.functions[0].required_parameters;
  g.example.scenario = "if you want to add 2 to 1.";
  g.example.parameters["input"] = nlohmann::ordered_json::array({2, 1});

  ValidationReport r = validate_guideline(g, doc.functions[0], &executor, "add_");
  CHECK(r.executed);
  REQUIRE(r.execution_ok.has_value());
  CHECK(*r.execution_ok);

  SECTION("an execution failure is reported") {
    g.example.parameters["input"] = nlohmann::ordered_json::array();
    // Empty list fails schema-independent execution; schema still passes
    // because LIST conformance does not inspect elements.
    ValidationReport bad = validate_guideline(g, doc.functions[0], &executor, "add_");
    CHECK(bad.parameter_schema_ok);
    REQUIRE(bad.execution_ok.has_value());
    CHECK_FALSE(*bad.execution_ok);
    CHECK(bad.failure_reason.has_value());
  }
}

TEST_CASE("build_instruction over the full arithmetic corpus is deterministic") {
  ScriptedProvider base;
  for (const auto& name : ArithmeticExecutor::function_names()) {
    base.add({"\"tool_name\": \"" + name + "\"", "Tool usage description:"},
             "'" + name + "' applies the " + name + " operation to the input list.");
    base.add({"One scenario for '" + name + "' of '" + name + "' is:"},
             R"({"Scenario": "use )" + name + R"( on 6 and 3.", "Parameters": {"input": [6, 3]}})");
  }

  ArithmeticExecutor executor;
  std::string first_run, second_run;
  for (std::string* out : {&first_run, &second_run}) {
    ScriptedProvider provider = base;
    for (const auto& doc : ArithmeticExecutor::corpus()) {
      ToolInstruction ins = build_instruction(doc, provider, &executor);
      REQUIRE(ins.function_guidelines.size() == 1);
      *out += instruction_to_json(ins).dump() + "\n";
    }
  }
  CHECK(first_run == second_run);
  CHECK_FALSE(first_run.empty());

  // All 13 guidelines executed successfully, so each example is runnable.
  ScriptedProvider provider = base;
  ToolInstruction add_ins =
      build_instruction(parse_document("add_(input: List)"), provider, &executor);
  ToolCall call;
  call.tool_id = "add_";
  call.function_name = "add_";
  call.arguments = add_ins.function_guidelines[0].example.parameters;
  CHECK(executor.execute(call).value == "9.00");
}

TEST_CASE("build_instruction reports failed functions with the partial result") {
  ToolDocumentation doc = parse_document("add_(input: List)\nbroken_(input: List)");
  ScriptedProvider provider;
  provider.add({"Tool usage description:"},
               "'add_' and 'broken_' are functions of 'add_'.");
  provider.add({"One scenario for 'add_'"},
               R"({"Scenario": "add", "Parameters": {"input": [1, 2]}})");
  provider.add({"One scenario for 'broken_'"}, "never valid json");
  try {
    build_instruction(doc, provider);
    FAIL("expected InstructionIncompleteError");
  } catch (const InstructionIncompleteError& e) {
    CHECK(std::string(e.what()).find("broken_") != std::string::npos);
    REQUIRE(e.partial().function_guidelines.size() == 1);
    CHECK(e.partial().function_guidelines[0].function_name == "add_");
  }
}

TEST_CASE("instruction serialization round-trips and matches the published shape") {
  ToolInstruction ins = instruction_from_json(
      nlohmann::json::parse(read_text_file(kFixtures + "funcqa_ins.jsonl")
                                .substr(0, read_text_file(kFixtures + "funcqa_ins.jsonl")
                                               .find('\n'))));
  CHECK(ins.tool_name == "add_");
  ordered_json j = instruction_to_json(ins);
  CHECK(j.contains("function_guidelines"));
  const auto& g = j["function_guidelines"][0];
  CHECK(g.contains("name"));
  CHECK(g.contains("required_parameters"));
  CHECK(g["Example"].contains("Scenario"));
  CHECK(g["Example"].contains("Parameters"));
  CHECK(instruction_from_json(j) == ins);
}

TEST_CASE("prompt directory overlays replace individual templates") {
  PromptLibrary defaults;
  std::string dir = "/tmp/easytool_prompt_overlay_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir + "/description_task.txt");
    out << "CUSTOM {documentation}\nTool usage description:\n";
  }
  PromptLibrary lib = PromptLibrary::load(dir);
  CHECK(lib.description_task != defaults.description_task);
  CHECK(lib.guideline_task == defaults.guideline_task);
  std::filesystem::remove_all(dir);
}
