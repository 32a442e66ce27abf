#include "algo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <set>
#include <sstream>

#include "algo/errors.hpp"

namespace algo {
using nlohmann::json;

double pass_at_k_unbiased(int n, int c, int k) {
  if (n < 1 || c < 0 || c > n || k < 1 || k > n) {
    throw DomainError("pass@k needs 0 <= c <= n and 1 <= k <= n (n=" + std::to_string(n) +
                      ", c=" + std::to_string(c) + ", k=" + std::to_string(k) + ")");
  }
  if (c == 0) return 0.0;
  if (n - c < k) return 1.0;
  // C(n-c,k)/C(n,k) = prod_{i=n-c+1}^{n} (1 - k/i)
  double miss = 1.0;
  for (int i = n - c + 1; i <= n; ++i) miss *= 1.0 - static_cast<double>(k) / i;
  return 1.0 - miss;
}

int pass_at_k_ranked(std::span<const JudgeStatus> ranked_statuses, int k) {
  if (k < 1) throw DomainError("k must be >= 1");
  std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(k), ranked_statuses.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (ranked_statuses[i] == JudgeStatus::AC) return 1;
  }
  return 0;
}

int pass_at_k_ranked(const RankedCandidates& ranking, const Problem& problem, const SystemJudge& sys, int k,
                     const Executor& executor) {
  if (k < 1) throw DomainError("k must be >= 1");
  std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(k), ranking.entries.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (judge(ranking.entries[i].candidate.source, problem, sys, executor) == JudgeStatus::AC) return 1;
  }
  return 0;
}

double agreement(const std::map<std::string, bool>& verdicts, const std::map<std::string, JudgeStatus>& statuses) {
  if (verdicts.size() != statuses.size()) throw KeyMismatch("verdict and judge key sets differ in size");
  if (verdicts.empty()) throw DomainError("agreement over no candidates");
  int same = 0;
  for (const auto& [key, pass] : verdicts) {
    auto it = statuses.find(key);
    if (it == statuses.end()) throw KeyMismatch("no judge status for '" + key + "'");
    if (pass == (it->second == JudgeStatus::AC)) ++same;
  }
  return static_cast<double>(same) / static_cast<double>(verdicts.size());
}

// ---------------------------------------------------------------------------

LineReport parse_line_report(std::string_view text) {
  LineReport report;
  bool have_total = false;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) {
    long value = 0;
    if (!(in >> value)) throw ParseError("coverage report: '" + word + "' without a number");
    if (word == "total") {
      report.total = static_cast<int>(value);
      have_total = true;
    } else if (word == "hit") {
      report.hit.push_back(static_cast<int>(value));
    } else {
      throw ParseError("coverage report: unknown record '" + word + "'");
    }
  }
  if (!have_total) throw ParseError("coverage report has no total line");
  return report;
}

double coverage_percent(const Problem& problem, const GeneratedProgram& candidate, std::span<const TestCase> cases,
                        const CoverageAdapter& adapter, const Executor& executor) {
  if (cases.empty()) throw DomainError("coverage over an empty case list");
  if (adapter.command.empty()) throw AdapterUnavailable("no coverage adapter configured");
  Runtime traced = executor.runtime();
  traced.command = adapter.command;
  Executor tracer(traced, executor.parallelism());

  std::vector<std::string> inputs;
  for (const auto& c : cases) inputs.push_back(c.input);
  std::vector<ExecutionOutcome> outcomes;
  try {
    outcomes = tracer.run_batch(problem.guest(candidate.source), inputs,
                                ResourceLimits::with_wall_time(Millis{30000}));
  } catch (const RuntimeUnavailable& e) {
    throw AdapterUnavailable(e.what());
  }
  int total = -1;
  std::set<int> hit;
  for (const auto& o : outcomes) {
    // A guest that times out leaves no report; the other cases still count.
    if (o.status == RunStatus::TLE) continue;
    LineReport r;
    try {
      r = parse_line_report(o.stdout_text);
    } catch (const ParseError& e) {
      throw AdapterUnavailable(std::string("coverage adapter: ") + e.what());
    }
    total = r.total;
    hit.insert(r.hit.begin(), r.hit.end());
  }
  if (total < 0) throw AdapterUnavailable("coverage adapter produced no report");
  if (total == 0) return 1.0;
  return std::min(1.0, static_cast<double>(hit.size()) / total);
}

OracleClassification classify_oracle(const Problem& problem, const GeneratedProgram& oracle, const SystemJudge& sys,
                                     const Executor& executor) {
  OracleClassification out;
  out.status = judge(oracle.source, problem, sys, executor);
  out.correct_for_oracle_purposes = out.status == JudgeStatus::AC || out.status == JudgeStatus::TLE;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double mean(const std::vector<double>& xs) {
  double sum = 0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

// Rates are rounded so reports do not depend on summation order noise.
double tidy(double x) { return std::round(x * 1e12) / 1e12; }

json optional_number(const std::optional<double>& x) { return x ? json(tidy(*x)) : json(nullptr); }

std::string percent(const std::optional<double>& x) {
  if (!x) return "absent";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", *x * 100.0);
  return buf;
}

}  // namespace

void aggregate(EvaluationReport& report, std::span<const int> ks) {
  report.pass_at_k_unbiased.clear();
  report.pass_at_k_ranked.clear();
  std::vector<double> agree_suite;
  std::vector<double> agree_public;
  std::vector<double> coverage;
  int oracles = 0;
  int oracles_ok = 0;
  for (auto& p : report.problems) {
    p.n = static_cast<int>(p.candidates.size());
    if (p.coverage) coverage.push_back(*p.coverage);
    if (p.oracle) {
      ++oracles;
      if (p.oracle->correct_for_oracle_purposes) ++oracles_ok;
    }
    bool judged = p.n > 0 && std::all_of(p.candidates.begin(), p.candidates.end(),
                                         [](const CandidateRow& r) { return r.judge_status.has_value(); });
    if (!judged) {
      p.c.reset();
      continue;
    }
    int c = 0;
    int suite_same = 0;
    int public_same = 0;
    for (const auto& r : p.candidates) {
      bool ac = *r.judge_status == JudgeStatus::AC;
      c += ac;
      suite_same += r.verdict.pass == ac;
      public_same += r.public_verdict == ac;
    }
    p.c = c;
    agree_suite.push_back(static_cast<double>(suite_same));
    agree_public.push_back(static_cast<double>(public_same));
  }

  // Agreement pools candidates across problems.
  int judged_candidates = 0;
  for (const auto& p : report.problems) {
    if (p.c) judged_candidates += p.n;
  }
  if (judged_candidates > 0) {
    double s = 0, q = 0;
    for (double x : agree_suite) s += x;
    for (double x : agree_public) q += x;
    report.agreement = s / judged_candidates;
    report.agreement_public_tests = q / judged_candidates;
  } else {
    report.agreement.reset();
    report.agreement_public_tests.reset();
  }

  for (int k : ks) {
    std::vector<double> unbiased;
    std::vector<double> ranked;
    for (const auto& p : report.problems) {
      if (!p.c || k > p.n) continue;
      unbiased.push_back(pass_at_k_unbiased(p.n, *p.c, k));
      std::vector<JudgeStatus> statuses;
      for (const auto& r : p.candidates) statuses.push_back(*r.judge_status);
      ranked.push_back(pass_at_k_ranked(statuses, k));
    }
    if (!unbiased.empty()) {
      report.pass_at_k_unbiased[k] = mean(unbiased);
      report.pass_at_k_ranked[k] = mean(ranked);
    }
  }
  report.coverage = coverage.empty() ? std::nullopt : std::optional<double>(mean(coverage));
  report.oracle_correct_rate =
      oracles == 0 ? std::nullopt : std::optional<double>(static_cast<double>(oracles_ok) / oracles);
}

std::string EvaluationReport::to_json() const {
  json doc = json::object();
  json per_problem = json::object();
  for (const auto& p : problems) {
    json rows = json::array();
    for (const auto& r : p.candidates) {
      rows.push_back({
          {"label", r.label},
          {"rank", r.rank},
          {"passed_public_tests", r.passed_public_tests},
          {"public_verdict", r.public_verdict},
          {"verdict", r.verdict.pass},
          {"cases_passed", r.verdict.cases_passed},
          {"cases_run", r.verdict.cases_run},
          {"judge_status", r.judge_status ? json(std::string(to_string(*r.judge_status))) : json(nullptr)},
      });
    }
    json entry = {
        {"n", p.n},
        {"c", p.c ? json(*p.c) : json(nullptr)},
        {"candidates", rows},
        {"selected_category", p.selected_category ? json(*p.selected_category) : json(nullptr)},
        {"first_passing_category", p.first_passing_category ? json(*p.first_passing_category) : json(nullptr)},
        {"coverage", optional_number(p.coverage)},
        {"suite",
         {{"cases", p.suite_cases},
          {"requested", p.suite_requested},
          {"generated", p.suite_generated},
          {"rejected_by_validator", p.suite_rejected},
          {"skipped_oracle", p.suite_skipped_oracle},
          {"oracle_errors", p.suite_oracle_errors}}},
    };
    if (p.oracle) {
      entry["oracle"] = {{"status", std::string(to_string(p.oracle->status))},
                         {"correct_for_oracle_purposes", p.oracle->correct_for_oracle_purposes}};
    } else {
      entry["oracle"] = nullptr;
    }
    per_problem[p.problem_id] = entry;
  }
  doc["per_problem"] = per_problem;
  json unbiased = json::object();
  for (const auto& [k, v] : pass_at_k_unbiased) unbiased["pass@" + std::to_string(k)] = tidy(v);
  json ranked = json::object();
  for (const auto& [k, v] : pass_at_k_ranked) ranked["pass@" + std::to_string(k)] = tidy(v);
  doc["pass_at_k_unbiased"] = unbiased;
  doc["pass_at_k_ranked"] = ranked;
  doc["agreement"] = optional_number(agreement);
  doc["agreement_public_tests"] = optional_number(agreement_public_tests);
  doc["coverage"] = optional_number(coverage);
  doc["oracle_correct_rate"] = optional_number(oracle_correct_rate);
  doc["suite_size"] = suite_size ? json(*suite_size) : json(nullptr);
  doc["notes"] = json::array({
      "agreement counts a suite failure against a judge AC as a disagreement, including crashes",
      "TLE is a judge failure for candidates and a correct verdict for oracles",
  });
  return doc.dump(2) + "\n";
}

std::string EvaluationReport::to_table() const {
  std::ostringstream out;
  if (suite_size) out << "suite size: " << *suite_size << "\n";
  out << "problem                 n   c   top label                          verdict  judge  oracle\n";
  for (const auto& p : problems) {
    char line[256];
    const CandidateRow* top = p.candidates.empty() ? nullptr : &p.candidates.front();
    std::snprintf(line, sizeof line, "%-22s %3d %3s   %-32s %-8s %-6s %s\n", p.problem_id.c_str(), p.n,
                  p.c ? std::to_string(*p.c).c_str() : "-", top ? top->label.c_str() : "-",
                  top ? (top->verdict.pass ? "pass" : "fail") : "-",
                  top && top->judge_status ? std::string(to_string(*top->judge_status)).c_str() : "-",
                  p.oracle ? std::string(to_string(p.oracle->status)).c_str() : "-");
    out << line;
  }
  for (const auto& [k, v] : pass_at_k_unbiased) {
    char line[128];
    std::snprintf(line, sizeof line, "pass@%d unbiased %.4f  ranked %.4f\n", k, v, pass_at_k_ranked.at(k));
    out << line;
  }
  out << "agreement (suite)  " << percent(agreement) << "\n";
  out << "agreement (public) " << percent(agreement_public_tests) << "\n";
  out << "coverage           " << percent(coverage) << "\n";
  out << "oracle correct     " << percent(oracle_correct_rate) << "\n";
  return out.str();
}

}  // namespace algo
