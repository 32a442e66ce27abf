#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "algo/errors.hpp"
#include "algo/search.hpp"
#include "test_support.hpp"

using namespace algo;
namespace t = algo::testing;

namespace {

const char* kSum = "a, b = map(int, input().split())\nprint(a + b)\n";
const char* kHalf = "a, b = map(int, input().split())\nprint(a + b if a < 5 else 0)\n";
const char* kWrong = "print(0)\n";

Problem sum_problem() {
  return parse_problem(R"({
    "id": "sum", "title": "Sum", "description": "Print a+b.", "constraints": "0 <= a, b <= 9", "io_style": "stdin_stdout",
    "categories": ["Math", "Brute Force"],
    "public_tests": [{"input": "1 2\n", "expected_output": "3\n"}]
  })");
}

Suite sum_suite() {
  std::vector<TestCase> tests;
  for (int a = 0; a < 10; ++a) tests.push_back({std::to_string(a) + " 1\n", std::to_string(a + 1) + "\n"});
  return suite_from_tests(tests);
}

GeneratedProgram cand(int attempt, std::string hash, std::string source = "x", bool pub = false) {
  GeneratedProgram p;
  p.source = std::move(source);
  p.provenance.attempt = attempt;
  p.provenance.transcript_hash = std::move(hash);
  p.passed_public_tests = pub;
  return p;
}

Verdict verdict(bool pass, int passed) {
  Verdict v;
  v.pass = pass;
  v.cases_run = 10;
  v.cases_passed = passed;
  return v;
}

std::vector<std::string> order(const RankedCandidates& r) {
  std::vector<std::string> out;
  for (const auto& e : r.entries) out.push_back(e.candidate.provenance.transcript_hash);
  return out;
}

struct Harness {
  explicit Harness(t::FakeTransport::Responder r)
      : gateway(live(), std::make_unique<t::FakeTransport>(std::move(r), &sent), nullptr) {}
  static GatewayOptions live() {
    GatewayOptions o;
    o.mode = GatewayMode::Live;
    return o;
  }
  std::atomic<int> sent{0};
  Gateway gateway;
  Executor executor;
};

}  // namespace

TEST(Ranking, PassFirstThenCasesThenPublic) {
  std::vector<std::pair<GeneratedProgram, Verdict>> in = {
      {cand(1, "a"), verdict(false, 9)},
      {cand(2, "b", "x", true), verdict(false, 9)},
      {cand(3, "c"), verdict(true, 10)},
      {cand(1, "d"), verdict(false, 2)},
  };
  auto r = rank_candidates(in);
  EXPECT_EQ(order(r), (std::vector<std::string>{"c", "b", "a", "d"}));
  for (std::size_t i = 0; i < r.entries.size(); ++i) EXPECT_EQ(r.entries[i].rank, static_cast<int>(i) + 1);
}

TEST(Ranking, TiesBreakOnAttemptThenHash) {
  std::vector<std::pair<GeneratedProgram, Verdict>> in = {
      {cand(2, "a"), verdict(true, 10)},
      {cand(1, "z"), verdict(true, 10)},
      {cand(1, "m"), verdict(true, 10)},
  };
  EXPECT_EQ(order(rank_candidates(in)), (std::vector<std::string>{"m", "z", "a"}));
}

TEST(Ranking, PermutationInvariant) {
  std::vector<std::pair<GeneratedProgram, Verdict>> in;
  for (int i = 0; i < 12; ++i)
    in.push_back({cand(1 + i % 3, "h" + std::to_string(i % 5), "s" + std::to_string(i), i % 4 == 0),
                  verdict(i % 7 == 0, i % 6)});
  auto expected = rank_candidates(in);
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(in.begin(), in.end(), rng);
    auto got = rank_candidates(in);
    ASSERT_EQ(got.entries.size(), expected.entries.size());
    for (std::size_t i = 0; i < got.entries.size(); ++i)
      EXPECT_EQ(got.entries[i].candidate.source, expected.entries[i].candidate.source);
  }
}

TEST(Ranking, EmptyInput) {
  auto r = rank_candidates({});
  EXPECT_EQ(r.top(), nullptr);
  EXPECT_FALSE(r.selected_category().has_value());
}

TEST(Strategy, NamesAndValidation) {
  EXPECT_EQ(strategy_kind_from_string("iterative"), StrategyKind::Iterative);
  EXPECT_EQ(strategy_kind_from_string("enumerator"), StrategyKind::InstructionEnumerator);
  EXPECT_EQ(to_string(StrategyKind::InstructionEnumerator), "instruction_enumerator");
  EXPECT_THROW(strategy_kind_from_string("beam"), ConfigError);
  StrategySpec s;
  s.sample_budget = 0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.kind = StrategyKind::Iterative;
  s.max_rounds = 0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.kind = StrategyKind::InstructionEnumerator;
  EXPECT_THROW(s.validate({}), ConfigError);
  EXPECT_NO_THROW(s.validate({"Greedy"}));
}

TEST(Strategy, ImplicitSamplesBudget) {
  Harness h([](const GenerationRequest& r) { return t::fenced(r.attempt == 2 ? kSum : kHalf); });
  Services services{h.gateway, h.executor};
  auto suite = sum_suite();
  SearchContext ctx{services, suite};
  StrategySpec spec;
  spec.sample_budget = 3;
  auto r = run_strategy(sum_problem(), spec, ctx);
  ASSERT_EQ(r.entries.size(), 3u);
  EXPECT_EQ(r.top()->candidate.provenance.attempt, 2);
  EXPECT_TRUE(r.top()->verdict.pass);
  EXPECT_EQ(h.sent.load(), 3);
}

TEST(Strategy, EnumeratorPicksPassingCategory) {
  Harness h([](const GenerationRequest& r) {
    return t::fenced(r.rendered_prompt.find("Brute Force") != std::string::npos ? kSum : kHalf);
  });
  Services services{h.gateway, h.executor};
  auto suite = sum_suite();
  SearchContext ctx{services, suite};
  StrategySpec spec;
  spec.kind = StrategyKind::InstructionEnumerator;
  auto r = run_strategy(sum_problem(), spec, ctx);
  ASSERT_EQ(r.entries.size(), 2u);
  EXPECT_EQ(r.selected_category(), "Brute Force");
  EXPECT_EQ(r.first_passing_category, "Brute Force");
}

TEST(Strategy, IterativeRefinesWithCounterexamples) {
  std::vector<std::string> refinement_prompts;
  Harness h([&](const GenerationRequest& r) {
    if (r.kind == PromptKind::Refinement) {
      refinement_prompts.push_back(r.rendered_prompt);
      return t::fenced(r.attempt == 3 ? kSum : kHalf);
    }
    return t::fenced(kWrong);
  });
  Services services{h.gateway, h.executor};
  auto suite = sum_suite();
  SearchContext ctx{services, suite};
  StrategySpec spec;
  spec.kind = StrategyKind::Iterative;
  spec.max_rounds = 5;
  auto r = run_strategy(sum_problem(), spec, ctx);
  // Stops on the first passing round.
  EXPECT_EQ(r.entries.size(), 3u);
  EXPECT_EQ(h.sent.load(), 3);
  EXPECT_TRUE(r.top()->verdict.pass);
  EXPECT_EQ(r.top()->candidate.label(), "refinement_3");
  ASSERT_EQ(refinement_prompts.size(), 2u);
  EXPECT_NE(refinement_prompts[0].find("Expected output"), std::string::npos);
  EXPECT_NE(refinement_prompts[0].find(kWrong), std::string::npos);
  EXPECT_NE(refinement_prompts[1].find(kHalf), std::string::npos);
}

TEST(Strategy, IterativeNeverExceedsRounds) {
  Harness h([](const GenerationRequest&) { return t::fenced(kWrong); });
  Services services{h.gateway, h.executor};
  auto suite = sum_suite();
  SearchContext ctx{services, suite};
  StrategySpec spec;
  spec.kind = StrategyKind::Iterative;
  spec.max_rounds = 3;
  auto r = run_strategy(sum_problem(), spec, ctx);
  EXPECT_EQ(r.entries.size(), 3u);
  EXPECT_EQ(h.sent.load(), 3);
  EXPECT_FALSE(r.top()->verdict.pass);
}

TEST(Strategy, IterativeStopsAfterPassingFirstRound) {
  Harness h([](const GenerationRequest&) { return t::fenced(kSum); });
  Services services{h.gateway, h.executor};
  auto suite = sum_suite();
  SearchContext ctx{services, suite};
  StrategySpec spec;
  spec.kind = StrategyKind::Iterative;
  auto r = run_strategy(sum_problem(), spec, ctx);
  EXPECT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(h.sent.load(), 1);
}

TEST(Strategy, CounterexampleFormatting) {
  std::vector<Counterexample> cexs = {{0, "1\n", "2\n", "3\n"}, {4, "5\n", "6\n", "<TLE>"}};
  auto text = format_counterexamples(cexs, 1);
  EXPECT_NE(text.find("Input:\n1"), std::string::npos);
  EXPECT_EQ(text.find("<TLE>"), std::string::npos);
}
