#include "algo/problem.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "algo/errors.hpp"

namespace algo {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const json& require(const json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end() || it->is_null()) throw SchemaError(field, "missing");
  return *it;
}

std::string require_string(const json& doc, const char* field) {
  const json& v = require(doc, field);
  if (!v.is_string()) throw SchemaError(field, "must be a string");
  return v.get<std::string>();
}

std::string optional_string(const json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end() || it->is_null()) return {};
  if (!it->is_string()) throw SchemaError(field, "must be a string");
  return it->get<std::string>();
}

std::vector<TestCase> parse_tests(const json& doc, const char* field) {
  const json& arr = require(doc, field);
  if (!arr.is_array()) throw SchemaError(field, "must be a list");
  std::vector<TestCase> tests;
  for (const auto& t : arr) {
    if (!t.is_object()) throw SchemaError(field, "entries must be objects");
    auto in = t.find("input");
    auto out = t.find("expected_output");
    if (in == t.end() || !in->is_string()) throw SchemaError(field, "entry lacks string 'input'");
    if (out == t.end() || !out->is_string()) {
      throw SchemaError(field, "entry lacks string 'expected_output'");
    }
    tests.push_back({in->get<std::string>(), out->get<std::string>()});
  }
  return tests;
}

int status_rank(JudgeStatus s) {
  switch (s) {
    case JudgeStatus::AC: return 0;
    case JudgeStatus::TLE: return 1;
    case JudgeStatus::RE: return 2;
    case JudgeStatus::WA: return 3;
  }
  return 0;
}

}  // namespace

void Problem::validate() const {
  if (id.empty()) throw SchemaError("id", "must be non-empty");
  if (public_tests.empty()) throw SchemaError("public_tests", "must contain at least one test");
  if (io_style == IoStyle::FunctionCall && !signature) {
    throw SchemaError("signature", "required for function_call problems");
  }
  if (io_style == IoStyle::StdinStdout && signature) {
    throw SchemaError("signature", "not allowed for stdin_stdout problems");
  }
  if (signature && signature->name.empty()) throw SchemaError("signature", "name must be non-empty");
  if (judge && judge->time_limit <= Millis{0}) {
    throw SchemaError("judge.time_limit_ms", "must be positive");
  }
}

GuestProgram Problem::guest(std::string source) const {
  GuestProgram program{std::move(source), std::nullopt};
  if (io_style == IoStyle::FunctionCall) program.entry = signature;
  return program;
}

std::string_view to_string(JudgeStatus status) {
  switch (status) {
    case JudgeStatus::AC: return "AC";
    case JudgeStatus::WA: return "WA";
    case JudgeStatus::TLE: return "TLE";
    case JudgeStatus::RE: return "RE";
  }
  return "?";
}

std::string_view to_string(IoStyle style) {
  return style == IoStyle::FunctionCall ? "function_call" : "stdin_stdout";
}

Problem parse_problem(std::string_view text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError(origin + ": problem document must be an object");

  Problem p;
  p.id = require_string(doc, "id");
  p.title = optional_string(doc, "title");
  p.description = require_string(doc, "description");
  p.constraints = optional_string(doc, "constraints");

  std::string style = require_string(doc, "io_style");
  if (style == "stdin_stdout") {
    p.io_style = IoStyle::StdinStdout;
  } else if (style == "function_call") {
    p.io_style = IoStyle::FunctionCall;
  } else {
    throw SchemaError("io_style", "expected stdin_stdout or function_call, got '" + style + "'");
  }

  if (auto it = doc.find("signature"); it != doc.end() && !it->is_null()) {
    if (!it->is_object() || !it->contains("name") || !(*it)["name"].is_string()) {
      throw SchemaError("signature", "must be an object with a string 'name'");
    }
    Signature sig;
    sig.name = (*it)["name"].get<std::string>();
    if (auto params = it->find("params"); params != it->end()) {
      if (!params->is_array()) throw SchemaError("signature", "'params' must be a list");
      for (const auto& name : *params) {
        if (!name.is_string()) throw SchemaError("signature", "parameter names must be strings");
        sig.params.push_back(name.get<std::string>());
      }
    }
    p.signature = std::move(sig);
  }

  p.public_tests = parse_tests(doc, "public_tests");

  if (auto it = doc.find("categories"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) throw SchemaError("categories", "must be a list");
    for (const auto& c : *it) {
      if (!c.is_string()) throw SchemaError("categories", "entries must be strings");
      p.categories.push_back(c.get<std::string>());
    }
  }

  if (std::string d = optional_string(doc, "difficulty"); !d.empty()) {
    if (d == "easy") p.difficulty = Difficulty::Easy;
    else if (d == "medium") p.difficulty = Difficulty::Medium;
    else if (d == "hard") p.difficulty = Difficulty::Hard;
    else throw SchemaError("difficulty", "expected easy, medium or hard");
  }

  // Only problems with a single correct output are supported.
  if (std::string policy = optional_string(doc, "answer_policy"); !policy.empty() && policy != "exact") {
    throw SchemaError("answer_policy", "unsupported policy '" + policy + "' (only 'exact')");
  }
  if (std::string eq = optional_string(doc, "equivalence"); !eq.empty()) {
    p.equivalence = equivalence_from_string(eq);
  }

  if (auto it = doc.find("judge"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) throw SchemaError("judge", "must be an object");
    SystemJudge j;
    j.hidden_tests = parse_tests(*it, "hidden_tests");
    if (auto tl = it->find("time_limit_ms"); tl != it->end()) {
      if (!tl->is_number()) throw SchemaError("judge.time_limit_ms", "must be a number");
      j.time_limit = Millis{tl->get<long long>()};
    }
    j.equivalence = p.equivalence;
    p.judge = std::move(j);
  }

  p.validate();
  return p;
}

Problem load_problem(const fs::path& path) {
  return parse_problem(read_text(path), path.string());
}

std::vector<Problem> load_corpus(const fs::path& path) {
  if (fs::is_regular_file(path)) return {load_problem(path)};
  if (!fs::is_directory(path)) throw ParseError("corpus not found: " + path.string());

  std::vector<fs::path> files;
  fs::path index = path / "index.json";
  if (fs::exists(index)) {
    json doc;
    try {
      doc = json::parse(read_text(index));
    } catch (const json::parse_error& e) {
      throw ParseError(index.string() + ": " + e.what());
    }
    if (!doc.contains("problems") || !doc["problems"].is_array()) {
      throw SchemaError("problems", "index.json must list problem files");
    }
    for (const auto& rel : doc["problems"]) files.push_back(path / rel.get<std::string>());
  } else {
    for (const fs::path& dir : {path, path / "problems"}) {
      if (!fs::is_directory(dir)) continue;
      for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
  }

  std::vector<Problem> problems;
  for (const auto& f : files) problems.push_back(load_problem(f));
  for (std::size_t i = 0; i < problems.size(); ++i) {
    for (std::size_t j = i + 1; j < problems.size(); ++j) {
      if (problems[i].id == problems[j].id) throw SchemaError("id", "duplicate id " + problems[i].id);
    }
  }
  return problems;
}

std::vector<CaseResult> run_cases(const Problem& problem, std::string_view source,
                                  std::span<const TestCase> cases, const Executor& executor,
                                  const ResourceLimits& limits, EquivalencePolicy policy) {
  std::vector<std::string> inputs;
  inputs.reserve(cases.size());
  for (const auto& c : cases) inputs.push_back(c.input);
  auto outcomes = executor.run_batch(problem.guest(std::string(source)), inputs, limits);

  std::vector<CaseResult> results(cases.size());
  for (std::size_t i = 0; i < cases.size(); ++i) {
    auto& r = results[i];
    r.run = outcomes[i].status;
    r.recursion_error = outcomes[i].recursion_error;
    r.actual = std::move(outcomes[i].stdout_text);
    r.matched = r.run == RunStatus::OK && compare_outputs(cases[i].expected_output, r.actual, policy);
  }
  return results;
}

bool passes_all(std::span<const CaseResult> results) {
  return std::all_of(results.begin(), results.end(), [](const CaseResult& r) { return r.matched; });
}

JudgeStatus fold_status(std::span<const CaseResult> results) {
  JudgeStatus worst = JudgeStatus::AC;
  for (const auto& r : results) {
    JudgeStatus s = JudgeStatus::AC;
    switch (r.run) {
      case RunStatus::OK: s = r.matched ? JudgeStatus::AC : JudgeStatus::WA; break;
      case RunStatus::TLE: s = JudgeStatus::TLE; break;
      // Output-limit and memory failures are runtime errors from the judge's view.
      case RunStatus::RE:
      case RunStatus::OOM:
      case RunStatus::OutputTruncated: s = JudgeStatus::RE; break;
    }
    if (status_rank(s) > status_rank(worst)) worst = s;
  }
  return worst;
}

JudgeStatus judge(std::string_view source, const Problem& problem, const SystemJudge& judge,
                  const Executor& executor) {
  auto limits = ResourceLimits::with_wall_time(judge.time_limit);
  auto results = run_cases(problem, source, judge.hidden_tests, executor, limits, judge.equivalence);
  return fold_status(results);
}

}  // namespace algo
