#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "algo/equivalence.hpp"
#include "algo/executor.hpp"
#include "algo/generation.hpp"
#include "algo/problem.hpp"

namespace algo {

struct SuiteCase {
  TestCase test;  // expected_output always comes from the oracle
  std::uint64_t seed = 0;
  int draw = 0;

  friend bool operator==(const SuiteCase&, const SuiteCase&) = default;
};

struct Suite {
  std::vector<SuiteCase> cases;
  int requested = 0;
  int generated = 0;
  int rejected_by_validator = 0;
  // Oracle hit TLE, a recursion error or the output cap.
  int skipped_oracle = 0;
  // Oracle crashed for another reason; those inputs are skipped as well.
  int oracle_errors = 0;

  std::vector<TestCase> tests() const;
  // The first `size` cases (all of them when size exceeds the suite).
  Suite prefix(std::size_t size) const;
};

// Wraps plain test cases (e.g. public tests) as a suite.
Suite suite_from_tests(std::span<const TestCase> tests);

inline constexpr int kDefaultSuiteSize = 30;
// Total generator draws allowed per requested case.
inline constexpr int kDrawBudgetFactor = 5;

struct SuiteLimits {
  ResourceLimits oracle = ResourceLimits::with_wall_time(Millis{30000});
  ResourceLimits tools = ResourceLimits::with_wall_time(Millis{10000});
};

// Draws generator inputs, filters them through the validator and labels the
// survivors with the oracle. Rejected and skipped draws are replaced until
// `size` cases exist or 5 * size draws were made. Throws SuiteTooSmall when
// fewer than max(1, size / 3) cases survive.
Suite build_suite(const Problem& problem, const VerifierBundle& bundle, int size, std::uint64_t seed,
                  const Executor& executor, const SuiteLimits& limits = {});

struct Counterexample {
  std::size_t case_index = 0;
  std::string input;
  std::string expected;
  std::string actual;
};

inline constexpr int kDefaultCounterexamples = 3;

struct Verdict {
  bool pass = false;
  int cases_run = 0;
  int cases_passed = 0;
  std::vector<Counterexample> counterexamples;
  // Per-case pass/fail, aligned with the suite.
  std::vector<bool> case_results;

  // Verdict over the first `size` cases, recomputed from case_results.
  Verdict restricted_to(std::size_t size) const;
};

bool operator==(const Counterexample& a, const Counterexample& b);

// Runs the candidate on every suite input under candidate limits. TLE or a
// crash fails the case. Throws DomainError for an empty suite.
Verdict verify_candidate(const Problem& problem, const GeneratedProgram& candidate, const Suite& suite,
                         const Executor& executor, const ResourceLimits& limits, EquivalencePolicy policy,
                         int max_counterexamples = kDefaultCounterexamples);

// Line-delimited suite file: one JSON object per case with fields
// draw, expected_output, input, seed (sorted keys).
std::string serialize_suite(const Suite& suite);
Suite parse_suite(std::string_view text);
// Suite statistics as a JSON document (requested, generated, ...).
std::string serialize_suite_stats(const Suite& suite);
void apply_suite_stats(Suite& suite, std::string_view text);

}  // namespace algo
