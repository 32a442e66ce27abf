#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "algo/errors.hpp"
#include "algo/problem.hpp"
#include "test_support.hpp"

using namespace algo;
using namespace std::chrono_literals;
namespace t = algo::testing;

namespace {

const char* kMinimal = R"({
  "id": "sum",
  "title": "Sum",
  "description": "Print a+b.",
  "constraints": "0 <= a, b <= 10",
  "io_style": "stdin_stdout",
  "public_tests": [{"input": "1 2\n", "expected_output": "3\n"}]
})";

std::string with(const std::string& extra) {
  std::string doc = kMinimal;
  doc.pop_back();
  return doc + ", " + extra + "}";
}

std::string field_of(const std::string& text) {
  try {
    parse_problem(text);
  } catch (const SchemaError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST(Problem, MinimalStdinProblem) {
  Problem p = parse_problem(kMinimal);
  EXPECT_EQ(p.io_style, IoStyle::StdinStdout);
  EXPECT_EQ(p.public_tests.size(), 1u);
  EXPECT_FALSE(p.judge.has_value());
  EXPECT_FALSE(p.signature.has_value());
}

TEST(Problem, CategoriesPassThrough) {
  Problem p = parse_problem(with(R"("categories": ["Binary Search", "Greedy"], "difficulty": "medium")"));
  ASSERT_EQ(p.categories.size(), 2u);
  EXPECT_EQ(p.categories[0], "Binary Search");
  EXPECT_EQ(p.difficulty, Difficulty::Medium);
}

TEST(Problem, FunctionCallNeedsSignature) {
  std::string text = kMinimal;
  text.replace(text.find("stdin_stdout"), 12, "function_call");
  EXPECT_EQ(field_of(text), "signature");
  EXPECT_EQ(field_of(with(R"("signature": {"name": "f", "params": []})")), "signature");
}

TEST(Problem, SchemaViolationsNameTheField) {
  EXPECT_EQ(field_of(R"({"id": "x", "title": "", "description": "", "constraints": "", "io_style": "stdin_stdout", "public_tests": []})"),
            "public_tests");
  EXPECT_EQ(field_of(with(R"("answer_policy": "checker")")), "answer_policy");
  EXPECT_EQ(field_of(with(R"("difficulty": "brutal")")), "difficulty");
  EXPECT_EQ(field_of(with(R"("judge": {"time_limit_ms": 0, "hidden_tests": []})")), "judge.time_limit_ms");
  EXPECT_THROW(parse_problem("{not json"), ParseError);
}

TEST(Problem, DeskCorpusLoads) {
  auto problems = load_corpus(t::desk_dir() / "problems");
  ASSERT_EQ(problems.size(), 6u);
  for (const auto& p : problems) {
    EXPECT_GE(p.public_tests.size(), 2u) << p.id;
    ASSERT_TRUE(p.judge.has_value()) << p.id;
    EXPECT_EQ(p.judge->time_limit, 1000ms);
  }
}

TEST(Problem, DuplicateIdsRejected) {
  t::TempDir dir;
  t::write_file(dir / "a.json", kMinimal);
  t::write_file(dir / "b.json", kMinimal);
  EXPECT_THROW(load_corpus(dir.path()), SchemaError);
}

TEST(Problem, IndexFileOrdersCorpus) {
  t::TempDir dir;
  std::string other = kMinimal;
  other.replace(other.find("\"sum\""), 5, "\"zzz\"");
  t::write_file(dir / "p" / "one.json", other);
  t::write_file(dir / "p" / "two.json", kMinimal);
  t::write_file(dir / "index.json", R"({"problems": ["p/one.json", "p/two.json"]})");
  auto problems = load_corpus(dir.path());
  ASSERT_EQ(problems.size(), 2u);
  EXPECT_EQ(problems[0].id, "zzz");
  EXPECT_EQ(problems[1].id, "sum");
}

TEST(Judge, StatusPrecedence) {
  auto fold = [](std::vector<RunStatus> runs, std::vector<bool> matched) {
    std::vector<CaseResult> rs;
    for (std::size_t i = 0; i < runs.size(); ++i) rs.push_back({runs[i], matched[i], "", false});
    return fold_status(rs);
  };
  using R = RunStatus;
  EXPECT_EQ(fold({R::OK, R::OK}, {true, true}), JudgeStatus::AC);
  EXPECT_EQ(fold({R::OK, R::TLE}, {true, false}), JudgeStatus::TLE);
  EXPECT_EQ(fold({R::RE, R::TLE}, {false, false}), JudgeStatus::RE);
  EXPECT_EQ(fold({R::TLE, R::OK, R::RE}, {false, false, false}), JudgeStatus::WA);
  EXPECT_EQ(fold({R::OOM}, {false}), JudgeStatus::RE);
  EXPECT_EQ(fold({R::OutputTruncated}, {false}), JudgeStatus::RE);
}

TEST(Judge, FastAcConstantWa) {
  Problem p = parse_problem(kMinimal);
  SystemJudge sys;
  sys.hidden_tests = {{"1 1\n", "2\n"}, {"4 5\n", "9\n"}, {"0 0\n", "0\n"}};
  Executor ex;
  EXPECT_EQ(judge("a, b = map(int, input().split())\nprint(a + b)\n", p, sys, ex), JudgeStatus::AC);
  EXPECT_EQ(judge("print(2)\n", p, sys, ex), JudgeStatus::WA);
  EXPECT_EQ(judge("raise SystemExit(3)\n", p, sys, ex), JudgeStatus::RE);
}

// Exhaustive subset enumeration is O(2^n). The expected runtime at n = 40 is
// extrapolated from timings at small n, independently of the judge.
TEST(Judge, ExhaustiveOracleTimesOutOnLargeCase) {
  const std::string oracle =
      "import sys\n"
      "a = list(map(int, sys.stdin.read().split()))[1:]\n"
      "n = len(a)\n"
      "best = 0\n"
      "for mask in range(1 << n):\n"
      "    s = 0\n"
      "    for i in range(n):\n"
      "        if mask >> i & 1:\n"
      "            s += a[i]\n"
      "    best = max(best, s % 1000)\n"
      "print(best)\n";
  auto instance = [](int n) {
    std::string s = std::to_string(n) + "\n";
    for (int i = 0; i < n; ++i) s += std::to_string(37 * i + 11) + " ";
    return s + "\n";
  };
  Executor ex;
  GuestProgram g{oracle, std::nullopt};
  auto limits = ResourceLimits::with_wall_time(30000ms);
  auto t14 = ex.run(g, instance(14), limits);
  auto t16 = ex.run(g, instance(16), limits);
  ASSERT_EQ(t16.status, RunStatus::OK);
  // Per-subset cost from the n=16 run, ignoring interpreter start-up (t14
  // bounds it from above).
  double per_mask_ms = std::max(1e-6, (t16.duration - t14.duration).count() / double((1 << 16) - (1 << 14)));
  double predicted_ms = per_mask_ms * std::ldexp(1.0, 40);
  ASSERT_GT(predicted_ms, 1000.0);

  Problem p = parse_problem(kMinimal);
  SystemJudge sys;
  sys.time_limit = 1000ms;
  sys.hidden_tests = {{instance(3), ""}, {instance(40), ""}};
  // Small case expected value from the same enumeration.
  auto small = ex.run(g, instance(3), limits);
  sys.hidden_tests[0].expected_output = small.stdout_text;
  sys.hidden_tests[1].expected_output = "999\n";
  EXPECT_EQ(judge(oracle, p, sys, ex), JudgeStatus::TLE);
}
