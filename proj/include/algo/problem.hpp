#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "algo/equivalence.hpp"
#include "algo/executor.hpp"
#include "algo/signature.hpp"

namespace algo {

enum class IoStyle { StdinStdout, FunctionCall };
enum class Difficulty { Easy, Medium, Hard };

// For StdinStdout problems `input` is the whole standard input; for
// FunctionCall problems it is a JSON array of arguments and
// `expected_output` the compact JSON encoding of the return value.
struct TestCase {
  std::string input;
  std::string expected_output;

  friend bool operator==(const TestCase&, const TestCase&) = default;
};

struct SystemJudge {
  std::vector<TestCase> hidden_tests;
  Millis time_limit{1000};
  EquivalencePolicy equivalence = EquivalencePolicy::Token;
};

struct Problem {
  std::string id;
  std::string title;
  std::string description;
  std::string constraints;
  IoStyle io_style = IoStyle::StdinStdout;
  std::optional<Signature> signature;
  std::vector<TestCase> public_tests;
  std::vector<std::string> categories;
  std::optional<Difficulty> difficulty;
  EquivalencePolicy equivalence = EquivalencePolicy::Token;
  std::optional<SystemJudge> judge;

  // Throws SchemaError naming the first violated invariant.
  void validate() const;

  // The guest program to execute for a solution of this problem.
  GuestProgram guest(std::string source) const;
};

enum class JudgeStatus { AC, WA, TLE, RE };

std::string_view to_string(JudgeStatus status);
std::string_view to_string(IoStyle style);

// Problem documents are JSON objects; see README for the schema.
Problem parse_problem(std::string_view text, const std::string& origin = "<memory>");
Problem load_problem(const std::filesystem::path& path);

// A corpus is a directory. When it contains index.json ({"problems": [paths]})
// those files are loaded in order; otherwise every *.json file directly in the
// directory or in its problems/ subdirectory is loaded, sorted by path.
std::vector<Problem> load_corpus(const std::filesystem::path& path);

// Outcome of running a program on one test case.
struct CaseResult {
  RunStatus run = RunStatus::OK;
  bool matched = false;
  std::string actual;
  bool recursion_error = false;
};

std::vector<CaseResult> run_cases(const Problem& problem, std::string_view source,
                                  std::span<const TestCase> cases, const Executor& executor,
                                  const ResourceLimits& limits, EquivalencePolicy policy);

bool passes_all(std::span<const CaseResult> results);

// Folds per-case results into one status. WA > RE > TLE > AC.
JudgeStatus fold_status(std::span<const CaseResult> results);

JudgeStatus judge(std::string_view source, const Problem& problem, const SystemJudge& judge,
                  const Executor& executor);

}  // namespace algo
