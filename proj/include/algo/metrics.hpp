#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "algo/executor.hpp"
#include "algo/generation.hpp"
#include "algo/problem.hpp"
#include "algo/search.hpp"
#include "algo/verifier.hpp"

namespace algo {

// 1 - C(n-c, k) / C(n, k) as a running product. Exact 0 when c == 0 and
// exact 1 when n - c < k. Throws DomainError unless 0 <= c <= n, 1 <= k <= n.
double pass_at_k_unbiased(int n, int c, int k);

// 1 when any of the first k statuses is AC. `statuses` follows rank order.
int pass_at_k_ranked(std::span<const JudgeStatus> ranked_statuses, int k);

// Judges the top-k entries of a ranking and applies the rule above.
int pass_at_k_ranked(const RankedCandidates& ranking, const Problem& problem, const SystemJudge& judge, int k,
                     const Executor& executor);

// Fraction of keys where verdict.pass agrees with (status == AC). Throws
// KeyMismatch unless both maps have the same keys, DomainError when empty.
double agreement(const std::map<std::string, bool>& verdicts, const std::map<std::string, JudgeStatus>& statuses);

// Runs programs under a line-tracing wrapper. The command template follows
// Runtime::command and must print "total <n>" once and "hit <line>" for each
// executed statement line of the {source} file.
struct CoverageAdapter {
  std::string command;
};

struct LineReport {
  int total = 0;
  std::vector<int> hit;
};

// Throws ParseError when the report has no total line.
LineReport parse_line_report(std::string_view text);

// Statements executed by any case / total statements. Throws DomainError on an
// empty case list and AdapterUnavailable when the adapter cannot run or emits
// no report.
double coverage_percent(const Problem& problem, const GeneratedProgram& candidate, std::span<const TestCase> cases,
                        const CoverageAdapter& adapter, const Executor& executor);

struct OracleClassification {
  JudgeStatus status = JudgeStatus::WA;
  bool correct_for_oracle_purposes = false;
};

// AC and TLE both count as correct for an oracle.
OracleClassification classify_oracle(const Problem& problem, const GeneratedProgram& oracle, const SystemJudge& judge,
                                     const Executor& executor);

struct CandidateRow {
  std::string label;
  int rank = 0;
  bool passed_public_tests = false;
  bool public_verdict = false;
  Verdict verdict;
  std::optional<JudgeStatus> judge_status;
};

struct ProblemReport {
  std::string problem_id;
  int n = 0;
  std::optional<int> c;  // judge-correct count; absent without judge data
  std::vector<CandidateRow> candidates;  // rank order
  std::optional<OracleClassification> oracle;
  std::optional<std::string> selected_category;
  std::optional<std::string> first_passing_category;
  int suite_cases = 0;
  int suite_requested = 0;
  int suite_generated = 0;
  int suite_rejected = 0;
  int suite_skipped_oracle = 0;
  int suite_oracle_errors = 0;
  std::optional<double> coverage;
};

struct EvaluationReport {
  std::vector<ProblemReport> problems;
  std::map<int, double> pass_at_k_unbiased;
  std::map<int, double> pass_at_k_ranked;
  std::optional<double> agreement;
  std::optional<double> agreement_public_tests;
  std::optional<double> coverage;
  std::optional<double> oracle_correct_rate;
  std::optional<int> suite_size;  // set for sweep variants

  // Stable, sorted-key JSON document.
  std::string to_json() const;
  std::string to_table() const;
};

// Corpus-level aggregation of per-problem rows. Problems without judge data
// are left out of judge-backed metrics; a metric with no data stays absent.
void aggregate(EvaluationReport& report, std::span<const int> ks);

}  // namespace algo
