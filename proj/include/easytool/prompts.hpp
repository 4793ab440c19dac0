#pragma once

// Default prompt templates. Each is plain text with {placeholder} markers and
// can be overridden by a file of the same name in a prompt directory.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "easytool/error.hpp"

namespace easytool {

namespace prompts {

inline constexpr const char* kDescriptionTask =
    R"PT(Your task is to create a concise and effective tool usage description based on the tool documentation. You should ensure the description only contains the purposes of the tool without irrelevant information.{examples}
{documentation}
Tool usage description:
)PT";

// One demo pair for the description stage: documentation in, description out.
inline constexpr const char* kDescriptionDemoDoc =
    R"PT({
    "tool_name": "TokopediaApi",
    "tool_description": "Unofficial Tokopedia product search and detail API.",
    "api_list": [
        {"name": "Search Product", "description": "Search The Product", "required_parameters": [{"name": "query", "type": "STRING"}, {"name": "act", "type": "STRING"}], "optional_parameters": []},
        {"name": "Get Product Detail", "description": "Get the product detail by slug.", "required_parameters": [{"name": "slug", "type": "STRING"}], "optional_parameters": []}
    ]
})PT";

inline constexpr const char* kDescriptionDemoOut =
    "'TokopediaApi' can search and retrieve product details from Tokopedia. This tool has 2 "
    "APIs: 1. 'Search Product' can search for products on Tokopedia based on a query string "
    "and action type. 2. 'Get Product Detail' can retrieve detailed information about a "
    "product on Tokopedia based on its slug.";

inline constexpr const char* kGuidelineTask =
    R"PT(Your task is to create the scenario that will use the tool.
1. You are given a tool with its purpose and its parameters list. The scenario should adopt the parameters in the list.
2. If the parameters are null, you should set: {"Scenario": XX, "Parameters":{}}. Here is an example:
{example}
{tool_description}
{function_purpose}
{parameter_list}
One scenario for '{function_name}' of '{tool_name}' is:
)PT";

inline constexpr const char* kGuidelineDemo =
    R"PT('Ebay' can get products from Ebay in a specific country.
'Product Details' in 'Ebay' can get the product details for a given product id and a specific country.
Parameter List of 'Product Details': required_parameters: [{"name": "product_id", "type": "NUMBER"}], optional_parameters: [{"name": "country", "type": "STRING"}, {"name": "country_code", "type": "STRING"}]
One scenario for 'Product Details' of 'Ebay' is:
{"Scenario": "if you want to know the details of the product with product ID 1954 in Germany from Ebay", "Parameters":{"product_id": 1954, "country": "Germany"}})PT";

inline constexpr const char* kPlanning =
    R"PT(Decompose the user request into subtasks, each optimized for execution with a single tool. Subtasks may depend on earlier subtasks. You must only output in a parsible JSON format like:
{"subtasks": [{"id": 1, "text": "first subtask", "depends_on": []}, {"id": 2, "text": "second subtask", "depends_on": [1]}]}
Ids are contiguous from 1 and depends_on only lists earlier subtask ids.
User request: {request}
Subtasks:
)PT";

inline constexpr const char* kSelection =
    R"PT(Select the most appropriate tool for the subtask from the candidate tools below, based on its description, and prepare the parameters for tool execution.
Subtask: {subtask}
Candidate tools:
{candidates}
You must only output in a parsible JSON format like:
{"tool": "tool_id", "function": "function_name", "arguments": {"param": "value"}}
Tool call:
)PT";

inline constexpr const char* kAnswer =
    R"PT(Generate the final answer for the user request from the subtask results below.
User request: {request}
Results:
{results}
Final answer:
)PT";

// Success-rate judge template, reproduced byte-for-byte; only {question} and
// {answer} are substituted at render time.
inline constexpr const char* kJudgeSuccess =
    R"PT(Please check whether the response can reasonably and accurately answer the question. If it can, please output 'YES'; If not, please output 'NO'

You need to give reasons first and then decide whether the response can reasonably and accurately answer the question. You must only output in a parsible JSON format. Two example outputs look like:

Example 1: {"Reason": "The reason why you think the response can reasonably and accurately answer the question", "Choice": "Yes"}
"Example 2: {"Reason": "The reason why you think the response cannot reasonably and accurately answer the question", "Choice": "No"}

This is the user's question: {question}
This is the response: {answer}
Output: )PT";

inline constexpr const char* kJudgeWin =
    R"PT(Please compare the two solution paths below and select your preference for answering the question. You must only output in a parsible JSON format like {"Reason": "why the chosen path is better", "Choice": "A"} where Choice is "A" or "B". You must choose one.
Question: {question}
Path A: {path_a}
Path B: {path_b}
Output: )PT";

}  // namespace prompts

// Holds every template the pipeline renders. load() overlays files from a
// prompt directory so rewritten prompts can be swapped in without a rebuild.
struct PromptLibrary {
  std::string description_task = prompts::kDescriptionTask;
  std::string description_demo_doc = prompts::kDescriptionDemoDoc;
  std::string description_demo_out = prompts::kDescriptionDemoOut;
  std::string guideline_task = prompts::kGuidelineTask;
  std::string guideline_demo = prompts::kGuidelineDemo;
  std::string planning = prompts::kPlanning;
  std::string selection = prompts::kSelection;
  std::string answer = prompts::kAnswer;
  std::string judge_success = prompts::kJudgeSuccess;
  std::string judge_win = prompts::kJudgeWin;

  static PromptLibrary load(const std::string& dir) {
    PromptLibrary lib;
    auto overlay = [&dir](std::string& slot, const char* file) {
      std::filesystem::path p = std::filesystem::path(dir) / file;
      if (!std::filesystem::exists(p)) return;
      std::ifstream in(p);
      if (!in) throw Error(ErrorCode::ConfigError, "cannot read prompt file: " + p.string());
      std::ostringstream buf;
      buf << in.rdbuf();
      slot = buf.str();
    };
    overlay(lib.description_task, "description_task.txt");
    overlay(lib.description_demo_doc, "description_demo_doc.txt");
    overlay(lib.description_demo_out, "description_demo_out.txt");
    overlay(lib.guideline_task, "guideline_task.txt");
    overlay(lib.guideline_demo, "guideline_demo.txt");
    overlay(lib.planning, "planning.txt");
    overlay(lib.selection, "selection.txt");
    overlay(lib.answer, "answer.txt");
    overlay(lib.judge_success, "judge_success.txt");
    overlay(lib.judge_win, "judge_win.txt");
    return lib;
  }
};

}  // namespace easytool
