#include <gtest/gtest.h>

#include <json.hpp>

#include "algo/errors.hpp"
#include "algo/generation.hpp"
#include "test_support.hpp"

using namespace algo;
namespace t = algo::testing;

namespace {

const char* kSum = "a, b = map(int, input().split())\nprint(a + b)\n";
const char* kWrong = "print(0)\n";

Problem sum_problem() {
  return parse_problem(R"({
    "id": "sum", "title": "Sum", "description": "Print a+b.", "constraints": "0 <= a, b <= 9",
    "io_style": "stdin_stdout",
    "public_tests": [{"input": "1 2\n", "expected_output": "3\n"}, {"input": "4 4\n", "expected_output": "8\n"}]
  })");
}

struct Harness {
  using Responder = t::FakeTransport::Responder;
  explicit Harness(Responder r) : gateway(live(), std::make_unique<t::FakeTransport>(std::move(r), &sent), nullptr) {}

  static GatewayOptions live() {
    GatewayOptions o;
    o.mode = GatewayMode::Live;
    return o;
  }

  Services services() {
    Services s{gateway, executor};
    s.oracle_limits = ResourceLimits::with_wall_time(Millis{5000});
    s.sink = &sink;
    return s;
  }

  struct MemorySink : ProgramSink {
    std::vector<GeneratedProgram> stored;
    void store(const std::string&, const GeneratedProgram& p) override { stored.push_back(p); }
  };

  std::atomic<int> sent{0};
  Gateway gateway;
  Executor executor;
  MemorySink sink;
};

}  // namespace

TEST(Oracle, FirstAttemptPasses) {
  Harness h([](const GenerationRequest&) { return t::fenced(kSum); });
  auto s = h.services();
  auto oracle = generate_oracle(sum_problem(), s);
  EXPECT_EQ(oracle.provenance.attempt, 1);
  EXPECT_TRUE(oracle.passed_public_tests);
  EXPECT_EQ(oracle.kind, PromptKind::Oracle);
  EXPECT_EQ(oracle.provenance.template_version, "oracle@1");
  EXPECT_EQ(h.sent.load(), 1);
}

TEST(Oracle, ResamplesUntilPass) {
  Harness h([](const GenerationRequest& r) { return t::fenced(r.attempt < 3 ? kWrong : kSum); });
  auto s = h.services();
  auto oracle = generate_oracle(sum_problem(), s);
  EXPECT_EQ(oracle.provenance.attempt, 3);
  ASSERT_EQ(h.sink.stored.size(), 3u);
  EXPECT_FALSE(h.sink.stored[0].passed_public_tests);
  EXPECT_TRUE(h.sink.stored[2].passed_public_tests);
}

TEST(Oracle, ExhaustsAfterTenAttempts) {
  Harness h([](const GenerationRequest&) { return t::fenced(kWrong); });
  auto s = h.services();
  try {
    generate_oracle(sum_problem(), s);
    FAIL() << "expected OracleExhausted";
  } catch (const OracleExhausted& e) {
    EXPECT_EQ(e.attempts(), 10);
  }
  EXPECT_EQ(h.sent.load(), 10);
  EXPECT_EQ(h.sink.stored.size(), 10u);
}

TEST(Candidate, TaggedFirstSamplePasses) {
  std::string prompt;
  Harness h([&](const GenerationRequest& r) {
    prompt = r.rendered_prompt;
    return t::fenced(kSum);
  });
  auto s = h.services();
  auto c = generate_candidate(sum_problem(), std::string("Binary Search"), s);
  EXPECT_EQ(c.kind, PromptKind::TaggedSolution);
  EXPECT_EQ(c.provenance.attempt, 1);
  EXPECT_TRUE(c.passed_public_tests);
  EXPECT_EQ(c.category, "Binary Search");
  EXPECT_EQ(c.label(), "tagged_solution.binary_search_1");
  EXPECT_NE(prompt.find("Binary Search"), std::string::npos);
}

TEST(Candidate, FiveFailuresReturnLastSample) {
  Harness h([](const GenerationRequest&) { return t::fenced(kWrong); });
  auto s = h.services();
  auto c = generate_candidate(sum_problem(), std::nullopt, s);
  EXPECT_EQ(c.provenance.attempt, 5);
  EXPECT_FALSE(c.passed_public_tests);
  EXPECT_EQ(c.kind, PromptKind::NaiveSolution);
  EXPECT_EQ(h.sent.load(), 5);
}

TEST(Candidate, SecondSamplePasses) {
  Harness h([](const GenerationRequest& r) { return t::fenced(r.attempt == 2 ? kSum : kWrong); });
  auto s = h.services();
  auto c = generate_candidate(sum_problem(), std::nullopt, s);
  EXPECT_EQ(c.provenance.attempt, 2);
  EXPECT_EQ(c.label(), "naive_solution_2");
  EXPECT_EQ(h.sent.load(), 2);
}

TEST(Candidate, AttemptsAreConsecutive) {
  std::vector<int> attempts;
  Harness h([&](const GenerationRequest& r) {
    attempts.push_back(r.attempt);
    return t::fenced(kWrong);
  });
  auto s = h.services();
  generate_candidate(sum_problem(), std::nullopt, s, 3, 4);
  EXPECT_EQ(attempts, (std::vector<int>{4, 5, 6}));
}

TEST(Candidate, RefinementEmbedsPreviousProgram) {
  std::string prompt;
  Harness h([&](const GenerationRequest& r) {
    prompt = r.rendered_prompt;
    return t::fenced(kSum);
  });
  auto s = h.services();
  GeneratedProgram prev;
  prev.source = kWrong;
  auto c = generate_refinement(sum_problem(), prev, "Input:\n1 2\n", s, 2);
  EXPECT_EQ(c.kind, PromptKind::Refinement);
  EXPECT_EQ(c.label(), "refinement_2");
  EXPECT_TRUE(c.passed_public_tests);
  EXPECT_NE(prompt.find(kWrong), std::string::npos);
  EXPECT_NE(prompt.find("Input:\n1 2"), std::string::npos);
}

// ---------------------------------------------------------------------------

namespace {

const char* kValidator =
    "import sys\nparts = sys.stdin.read().split()\nprint(len(parts) == 2 and all(p.isdigit() for p in parts))\n";
const char* kPicky = "print(False)\n";

std::string batch_emitting(int n) {
  return "import json, sys\ncount, seed, m = map(int, sys.stdin.read().split())\nfor i in range(" +
         std::to_string(n) + "):\n    print(json.dumps(f'{i} {seed}\\n'))\n";
}

}  // namespace

TEST(Components, AcceptedWhenSmokeTestsPass) {
  Harness h([](const GenerationRequest& r) {
    switch (r.kind) {
      case PromptKind::InputValidator: return t::fenced(kValidator);
      case PromptKind::InputGenerator: return t::fenced("def gen_input(rng, max_len):\n    return '1 1\\n'\n");
      default: return t::fenced(batch_emitting(5));
    }
  });
  auto s = h.services();
  auto c = generate_verifier_components(sum_problem(), s);
  EXPECT_EQ(c.validator.kind, PromptKind::InputValidator);
  EXPECT_EQ(c.batch_generator.kind, PromptKind::BatchGenerator);
  EXPECT_NE(c.input_generator.source.find("gen_input"), std::string::npos);
  EXPECT_EQ(h.sent.load(), 3);
}

TEST(Components, ValidatorRejectingPublicInput) {
  Harness h([](const GenerationRequest&) { return t::fenced(kPicky); });
  auto s = h.services();
  try {
    generate_verifier_components(sum_problem(), s);
    FAIL() << "expected ComponentRejected";
  } catch (const ComponentRejected& e) {
    EXPECT_EQ(e.which(), "validator");
    EXPECT_EQ(e.reason(), "rejects public input");
  }
  EXPECT_EQ(h.sent.load(), 5);
}

TEST(Components, BatchGeneratorWithWrongCount) {
  Harness h([](const GenerationRequest& r) {
    if (r.kind == PromptKind::InputValidator) return t::fenced(kValidator);
    return t::fenced(batch_emitting(4));
  });
  auto s = h.services();
  try {
    generate_verifier_components(sum_problem(), s);
    FAIL() << "expected ComponentRejected";
  } catch (const ComponentRejected& e) {
    EXPECT_EQ(e.which(), "batch_generator");
    EXPECT_NE(e.reason().find("4 records"), std::string::npos);
  }
}

TEST(Components, GeneratorOutputParsing) {
  auto inputs = parse_generated_inputs("\"1 2\\n\"\n\n[[1, 2], 3]\n  \n");
  ASSERT_EQ(inputs.size(), 2u);
  EXPECT_EQ(inputs[0], "1 2\n");
  EXPECT_EQ(inputs[1], "[[1,2],3]");
  EXPECT_THROW(parse_generated_inputs("1 2\n"), ParseError);
  EXPECT_EQ(batch_generator_request(30, 7, 10), "30 7 10\n");
}

TEST(Sink, DirectoryLayoutAndManifest) {
  t::TempDir dir;
  DirectoryProgramSink sink(dir.path(), ".py");
  GeneratedProgram p;
  p.source = kSum;
  p.kind = PromptKind::NaiveSolution;
  p.provenance = {"abc", 2, "naive_solution@1"};
  sink.store("sum", p);
  EXPECT_EQ(t::read_file(dir / "sum/naive_solution_2.py"), kSum);
  auto manifest = nlohmann::json::parse(t::read_file(dir / "sum/manifest.json"));
  EXPECT_EQ(manifest["naive_solution_2"]["transcript_hash"], "abc");
  EXPECT_EQ(manifest["naive_solution_2"]["attempt"], 2);
}
