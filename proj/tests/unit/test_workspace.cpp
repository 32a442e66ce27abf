#include <gtest/gtest.h>

#include <json.hpp>
#include <sstream>

#include "algo/errors.hpp"
#include "algo/workspace.hpp"
#include "test_support.hpp"

using namespace algo;
namespace t = algo::testing;
namespace fs = std::filesystem;

TEST(Config, SeedIsMandatory) {
  t::TempDir dir;
  auto c = parse_run_config(R"({"corpus": "c", "workspace": "w", "gateway": {"mode": "live", "endpoint": "http://localhost:1"}})",
                            dir.path());
  EXPECT_FALSE(c.seed.has_value());
  EXPECT_THROW(c.validate(), ConfigError);
  c.seed = 1;
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ApiKeyNeverInFile) {
  EXPECT_THROW(parse_run_config(R"({"gateway": {"api_key": "sk-1"}})", "/"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"gateway": {"token": "sk-1"}})", "/"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"api_key": "sk-1"})", "/"), ConfigError);
  auto c = parse_run_config(R"({"gateway": {"api_key_env": "MY_KEY"}})", "/");
  EXPECT_EQ(c.api_key_env, "MY_KEY");
}

TEST(Config, RelativePathsResolveAgainstConfigDir) {
  auto c = parse_run_config(R"({"corpus": "problems", "workspace": "../ws", "seed": 3,
    "gateway": {"endpoint": "script://s.jsonl", "transcripts": "tx"},
    "coverage_adapter": "python3 {config_dir}/cov.py {source} {program}",
    "strategy": {"kind": "iterative", "max_rounds": 4}, "limits": {"candidate_ms": 1500}})",
                            "/base/cfg");
  EXPECT_EQ(c.corpus_path, fs::path("/base/cfg/problems"));
  EXPECT_EQ(c.workspace_path.lexically_normal(), fs::path("/base/ws"));
  EXPECT_EQ(c.endpoint, "script:///base/cfg/s.jsonl");
  EXPECT_EQ(c.transcripts(), fs::path("/base/cfg/tx"));
  EXPECT_EQ(*c.coverage_adapter, "python3 /base/cfg/cov.py {source} {program}");
  EXPECT_EQ(c.strategy.kind, StrategyKind::Iterative);
  EXPECT_EQ(c.strategy.max_rounds, 4);
  EXPECT_EQ(c.candidate_limits().wall_time, Millis{1500});
}

TEST(Config, HashTracksResultRelevantFields) {
  auto a = parse_run_config(R"({"seed": 1})", "/");
  auto b = parse_run_config(R"({"seed": 1})", "/");
  auto c = parse_run_config(R"({"seed": 2})", "/");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_THROW(parse_run_config("[1]", "/"), ConfigError);
}

TEST(Workspace, ManifestFreshness) {
  t::TempDir dir;
  {
    Workspace ws(dir / "ws");
    ws.write_artifact("suites/a.jsonl", "x\n", "k1");
    EXPECT_TRUE(ws.fresh("suites/a.jsonl", "k1"));
    EXPECT_FALSE(ws.fresh("suites/a.jsonl", "k2"));
    EXPECT_FALSE(ws.fresh("suites/b.jsonl", "k1"));
  }
  Workspace reopened(dir / "ws");
  EXPECT_TRUE(reopened.fresh("suites/a.jsonl", "k1"));
  t::write_file(dir / "ws/suites/a.jsonl", "tampered\n");
  EXPECT_FALSE(reopened.fresh("suites/a.jsonl", "k1"));
  auto manifest = nlohmann::json::parse(t::read_file(dir / "ws/manifest.json"));
  EXPECT_EQ(manifest["artifacts"]["suites/a.jsonl"]["input_key"], "k1");
}

TEST(Workspace, RankingRoundTrip) {
  GeneratedProgram p;
  p.source = "print(1)\n";
  p.kind = PromptKind::TaggedSolution;
  p.category = "Greedy";
  p.provenance = {"h", 2, "tagged_solution@1"};
  p.passed_public_tests = true;
  Verdict v;
  v.pass = false;
  v.cases_run = 4;
  v.cases_passed = 3;
  v.case_results = {true, false, true, true};
  v.counterexamples = {{1, "in", "exp", "got"}};
  auto r = rank_candidates({{p, v}});
  r.first_passing_category = std::nullopt;
  auto back = parse_ranking(serialize_ranking(r));
  ASSERT_EQ(back.entries.size(), 1u);
  const auto& e = back.entries[0];
  EXPECT_EQ(e.candidate.source, p.source);
  EXPECT_EQ(e.candidate.label(), "tagged_solution.greedy_2");
  EXPECT_EQ(e.verdict.case_results, v.case_results);
  EXPECT_EQ(e.verdict.counterexamples.at(0).actual, "got");
  EXPECT_EQ(serialize_ranking(back), serialize_ranking(r));
}

namespace {

// One judge-less problem scripted end to end: the naive samples are a rare bug
// followed by a correct program.
struct SweepRun {
  t::TempDir dir;
  RunConfig config;

  SweepRun() {
    fs::path sweep = t::source_dir() / "corpus" / "sweep";
    fs::copy(sweep / "problems", dir / "problems", fs::copy_options::recursive);
    fs::path prog = sweep / "programs" / "abs_value";
    std::string script;
    auto entry = [&](const std::string& kind, int attempt, const std::string& file) {
      script += R"({"problem": "abs_value", "kind": ")" + kind + R"(", "attempt": )" + std::to_string(attempt) +
                R"(, "program": ")" + (prog / file).string() + "\"}\n";
    };
    entry("oracle", 1, "oracle.py");
    entry("input_validator", 1, "validator.py");
    entry("batch_generator", 1, "batch_gen.py");
    script += R"({"problem": "abs_value", "kind": "input_generator", "attempt": 1, "response": "```python\ndef gen_input(rng, n):\n    return '0\\n'\n```\n"})";
    script += "\n";
    entry("naive_solution", 1, "rare_bug.py");
    entry("naive_solution", 2, "oracle.py");
    t::write_file(dir / "script.jsonl", script);
    config = parse_run_config(R"({"corpus": "problems", "workspace": "ws", "seed": 11, "suite_size": 30,
      "gateway": {"mode": "record", "endpoint": "script://script.jsonl", "model": "t"},
      "limits": {"oracle_ms": 5000},
      "strategy": {"kind": "implicit", "sample_budget": 2}, "k": [1, 2]})",
                              dir.path());
  }
};

}  // namespace

TEST(Commands, SynthesizeWithoutSuiteFails) {
  SweepRun run;
  std::ostringstream log;
  EXPECT_EQ(cmd_synthesize(run.config, log), 1);
  EXPECT_NE(log.str().find("no suite; run build-verifier first"), std::string::npos) << log.str();
}

TEST(Commands, JudgelessPipelineReportsNoAgreement) {
  SweepRun run;
  std::ostringstream log;
  ASSERT_EQ(cmd_build_verifier(run.config, log), 0) << log.str();
  ASSERT_EQ(cmd_synthesize(run.config, log), 0) << log.str();
  ASSERT_EQ(cmd_evaluate(run.config, log), 0) << log.str();
  auto report = nlohmann::json::parse(t::read_file(run.dir / "ws/reports/report.json"));
  EXPECT_TRUE(report["agreement"].is_null());
  EXPECT_TRUE(report["pass_at_k_unbiased"].empty());
  const auto& rows = report["per_problem"]["abs_value"]["candidates"];
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0]["verdict"], true);
  EXPECT_EQ(rows[0]["rank"], 1);

  // A second pass over a fresh workspace recomputes nothing.
  auto before = t::read_file(run.dir / "ws/manifest.json");
  std::ostringstream again;
  ASSERT_EQ(cmd_build_verifier(run.config, again), 0);
  ASSERT_EQ(cmd_synthesize(run.config, again), 0);
  EXPECT_EQ(t::read_file(run.dir / "ws/manifest.json"), before);
}

TEST(Commands, ReplayWithoutStoreIsConfigError) {
  t::TempDir dir;
  auto c = parse_run_config(R"({"corpus": "p", "workspace": "w", "seed": 1, "gateway": {"mode": "replay"}})",
                            dir.path());
  EXPECT_THROW(c.validate(), ConfigError);
}
