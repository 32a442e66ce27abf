#include <gtest/gtest.h>
#include <httplib.h>

#include <json.hpp>
#include <random>
#include <set>
#include <thread>

#include "algo/errors.hpp"
#include "algo/llm_gateway.hpp"
#include "algo/problem.hpp"
#include "test_support.hpp"

using namespace algo;
namespace t = algo::testing;
using namespace std::chrono_literals;

namespace {

Problem sample_problem() {
  return parse_problem(R"({
    "id": "sum", "title": "Pair Sum", "description": "Given a and b, print a+b. Unique marker 71c4.",
    "constraints": "0 <= a, b <= 10", "io_style": "stdin_stdout",
    "public_tests": [{"input": "1 2\n", "expected_output": "3\n"}]
  })");
}

GenerationRequest request(std::string prompt, int attempt = 1, PromptKind kind = PromptKind::NaiveSolution) {
  GenerationRequest r;
  r.kind = kind;
  r.rendered_prompt = std::move(prompt);
  r.attempt = attempt;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Prompts

TEST(Prompts, OracleTemplateCarriesInstructionAndDescription) {
  auto p = sample_problem();
  std::string text = render_prompt(PromptKind::Oracle, p, {});
  EXPECT_NE(text.find("exhaustive search"), std::string::npos);
  EXPECT_NE(text.find("Enumerate ALL combinations"), std::string::npos);
  EXPECT_NE(text.find(p.description), std::string::npos);
  EXPECT_NE(text.find("Python 3"), std::string::npos);
  EXPECT_EQ(text.find("{{"), std::string::npos);
}

TEST(Prompts, TaggedTemplateNeedsCategory) {
  auto p = sample_problem();
  EXPECT_NE(render_prompt(PromptKind::TaggedSolution, p, {{"category", "Binary Search"}}).find("Binary Search"),
            std::string::npos);
  try {
    render_prompt(PromptKind::TaggedSolution, p, {});
    FAIL() << "expected MissingSlot";
  } catch (const MissingSlot& e) {
    EXPECT_EQ(e.slot(), "category");
  }
}

TEST(Prompts, RefinementNeedsBothSlots) {
  auto p = sample_problem();
  EXPECT_THROW(render_prompt(PromptKind::Refinement, p, {{"previous_program", "print(1)"}}), MissingSlot);
  auto text = render_prompt(PromptKind::Refinement, p, {{"previous_program", "print(1)"}, {"failing_cases", "X9"}});
  EXPECT_NE(text.find("print(1)"), std::string::npos);
  EXPECT_NE(text.find("X9"), std::string::npos);
}

TEST(Prompts, RenderingIsDeterministic) {
  auto p = sample_problem();
  EXPECT_EQ(render_prompt(PromptKind::InputValidator, p, {}), render_prompt(PromptKind::InputValidator, p, {}));
}

TEST(Prompts, EveryBuiltinIsTranscribedAndVersioned) {
  const auto& catalog = PromptCatalog::builtin();
  for (auto kind : {PromptKind::NaiveSolution, PromptKind::TaggedSolution, PromptKind::Oracle,
                    PromptKind::InputValidator, PromptKind::InputGenerator, PromptKind::BatchGenerator,
                    PromptKind::Refinement}) {
    const auto& tmpl = catalog.get(kind);
    EXPECT_EQ(tmpl.source, "transcribed") << tmpl.name;
    EXPECT_EQ(tmpl.name, file_stem(kind));
    EXPECT_EQ(tmpl.version_tag(), tmpl.name + "@1");
  }
}

TEST(Prompts, DirectoryCatalogMatchesEmbedded) {
  auto from_disk = PromptCatalog::from_directory(t::source_dir() / "prompts");
  EXPECT_EQ(from_disk.get(PromptKind::Oracle).body, PromptCatalog::builtin().get(PromptKind::Oracle).body);
}

TEST(Prompts, TemplateHeaderParsing) {
  auto tmpl = parse_prompt_template("name: x\nversion: 3\nsource: transcribed\nslots: a, b\n---\nhi {{a}}{{b}}\n", "x");
  EXPECT_EQ(tmpl.version, 3);
  EXPECT_EQ(tmpl.slots, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(tmpl.body, "hi {{a}}{{b}}\n");
  EXPECT_THROW(parse_prompt_template("name: x\nno separator", "x"), ParseError);
}

// ---------------------------------------------------------------------------
// Extraction

TEST(Extract, FirstFencedBlock) {
  EXPECT_EQ(extract_program("```python\ndef f(): pass\n```"), "def f(): pass\n");
  EXPECT_EQ(extract_program("Here you go:\n```py\nA = 1\n```\nand\n```\nB = 2\n```\n"), "A = 1\n");
  EXPECT_EQ(extract_program("  print(3)  \n"), "print(3)");
  EXPECT_THROW(extract_program(" \n\t"), EmptyResponse);
}

// ---------------------------------------------------------------------------
// Request hashing

TEST(RequestHash, AttemptAndKindAreKeyedProblemIdIsNot) {
  auto a = request("p", 1);
  auto b = request("p", 2);
  auto c = request("p", 1, PromptKind::Oracle);
  auto d = request("p", 1);
  d.problem_id = "other";
  auto e = request("p", 1);
  e.temperature = 0.5;
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_NE(a.hash(), e.hash());
  EXPECT_EQ(a.hash(), d.hash());
  EXPECT_EQ(a.hash().size(), 64u);
}

TEST(RequestHash, ValidationRejectsBadRequests) {
  EXPECT_THROW(request("", 1).validate(), DomainError);
  EXPECT_THROW(request("p", 0).validate(), DomainError);
  auto r = request("p");
  r.temperature = -0.1;
  EXPECT_THROW(r.validate(), DomainError);
}

TEST(RequestHash, NoCollisionsOverTenThousandRandomRequests) {
  std::mt19937_64 rng(12345);
  std::set<std::string> encodings;
  std::set<std::string> hashes;
  const PromptKind kinds[] = {PromptKind::NaiveSolution, PromptKind::TaggedSolution, PromptKind::Oracle,
                              PromptKind::Refinement};
  for (int i = 0; i < 10000; ++i) {
    GenerationRequest r;
    r.kind = kinds[rng() % 4];
    r.attempt = 1 + static_cast<int>(rng() % 5);
    r.temperature = (rng() % 3) * 0.5;
    // Short prompts from a tiny alphabet force many near-identical encodings.
    std::string prompt;
    int len = 1 + static_cast<int>(rng() % 6);
    for (int j = 0; j < len; ++j) prompt.push_back("ab\n\"{"[rng() % 5]);
    r.rendered_prompt = prompt;
    encodings.insert(r.canonical_encoding());
    hashes.insert(r.hash());
  }
  EXPECT_EQ(hashes.size(), encodings.size());
  EXPECT_GT(encodings.size(), 5000u);
}

// ---------------------------------------------------------------------------
// Transcript store

TEST(TranscriptStore, AppendFindReopen) {
  t::TempDir dir;
  {
    TranscriptStore store(dir / "tx");
    EXPECT_TRUE(store.append({"h1", "resp one", "2026-01-01T00:00:00Z", "m", PromptKind::Oracle, 1}));
    EXPECT_TRUE(store.append({"h2", "resp\ntwo", "2026-01-01T00:00:00Z", "m", PromptKind::Oracle, 2}));
    EXPECT_FALSE(store.append({"h1", "other", "", "m", PromptKind::Oracle, 1}));
    EXPECT_EQ(store.size(), 2u);
  }
  EXPECT_TRUE(TranscriptStore::exists(dir / "tx"));
  TranscriptStore again(dir / "tx");
  ASSERT_TRUE(again.find("h2").has_value());
  EXPECT_EQ(again.find("h2")->response_text, "resp\ntwo");
  EXPECT_EQ(again.find("h1")->response_text, "resp one");
  EXPECT_FALSE(again.find("h3").has_value());
}

TEST(TranscriptStore, IndexIsRebuiltFromRecords) {
  t::TempDir dir;
  {
    TranscriptStore store(dir / "tx");
    store.append({"h1", "one", "", "m", PromptKind::Oracle, 1});
    store.append({"h2", "two", "", "m", PromptKind::Oracle, 1});
  }
  t::write_file(dir / "tx" / "index.tsv", "h1\t999999\n");
  TranscriptStore reopened(dir / "tx");
  EXPECT_EQ(reopened.find("h1")->response_text, "one");
  EXPECT_EQ(reopened.find("h2")->response_text, "two");
}

// ---------------------------------------------------------------------------
// Gateway modes

TEST(Gateway, ReplayReturnsStoredTextOrMisses) {
  t::TempDir dir;
  auto store = std::make_shared<TranscriptStore>(dir / "tx");
  auto req = request("prompt");
  store->append({req.hash(), "stored answer", "", "m", req.kind, 1});
  Gateway gw({}, nullptr, store);
  EXPECT_EQ(gw.complete(req), "stored answer");
  EXPECT_EQ(gw.complete(req), "stored answer");
  try {
    gw.complete(request("prompt", 2));
    FAIL() << "expected ReplayMiss";
  } catch (const ReplayMiss& e) {
    EXPECT_EQ(e.request_hash(), request("prompt", 2).hash());
  }
  EXPECT_EQ(gw.calls(), 3);
}

TEST(Gateway, RecordKeysOnAttempt) {
  t::TempDir dir;
  auto store = std::make_shared<TranscriptStore>(dir / "tx");
  std::atomic<int> sent{0};
  GatewayOptions opt;
  opt.mode = GatewayMode::Record;
  opt.model_tag = "fake-1";
  Gateway gw(opt, std::make_unique<t::FakeTransport>(
                      [](const GenerationRequest& r) { return "answer " + std::to_string(r.attempt); }, &sent),
             store);
  EXPECT_EQ(gw.complete(request("same", 1)), "answer 1");
  EXPECT_EQ(gw.complete(request("same", 2)), "answer 2");
  EXPECT_EQ(gw.complete(request("same", 1)), "answer 1");
  EXPECT_EQ(sent.load(), 2);
  EXPECT_EQ(store->size(), 2u);
  auto tx = store->find(request("same", 2).hash());
  ASSERT_TRUE(tx.has_value());
  EXPECT_EQ(tx->model_tag, "fake-1");
  EXPECT_EQ(tx->attempt, 2);
  EXPECT_EQ(tx->timestamp.size(), 20u);

  Gateway replay({}, nullptr, store);
  EXPECT_EQ(replay.complete(request("same", 2)), "answer 2");
}

TEST(Gateway, RetriesWithDoublingBackoff) {
  int failures_left = 2;
  GatewayOptions opt;
  opt.mode = GatewayMode::Live;
  Gateway gw(opt, std::make_unique<t::FakeTransport>([&](const GenerationRequest&) -> std::string {
               if (failures_left-- > 0) throw TransportFailure("busy", true);
               return "ok";
             }),
             nullptr);
  std::vector<Millis> sleeps;
  gw.set_sleeper([&](Millis d) { sleeps.push_back(d); });
  EXPECT_EQ(gw.complete(request("x")), "ok");
  EXPECT_EQ(sleeps, (std::vector<Millis>{1000ms, 2000ms}));
}

TEST(Gateway, GivesUpAfterThreeRetries) {
  int sent = 0;
  GatewayOptions opt;
  opt.mode = GatewayMode::Live;
  Gateway gw(opt, std::make_unique<t::FakeTransport>([&](const GenerationRequest&) -> std::string {
               ++sent;
               throw TransportFailure("down", true);
             }),
             nullptr);
  gw.set_sleeper([](Millis) {});
  try {
    gw.complete(request("x"));
    FAIL() << "expected TransportError";
  } catch (const TransportError& e) {
    EXPECT_EQ(e.retries(), 3);
  }
  EXPECT_EQ(sent, 4);
}

TEST(Gateway, NonRetryableFailsAtOnce) {
  int sent = 0;
  GatewayOptions opt;
  opt.mode = GatewayMode::Live;
  Gateway gw(opt, std::make_unique<t::FakeTransport>([&](const GenerationRequest&) -> std::string {
               ++sent;
               throw TransportFailure("bad request", false);
             }),
             nullptr);
  EXPECT_THROW(gw.complete(request("x")), TransportError);
  EXPECT_EQ(sent, 1);
}

TEST(Gateway, InFlightCapBoundsConcurrency) {
  std::atomic<int> live{0};
  std::atomic<int> peak{0};
  GatewayOptions opt;
  opt.mode = GatewayMode::Live;
  opt.max_in_flight = 2;
  Gateway gw(opt, std::make_unique<t::FakeTransport>([&](const GenerationRequest&) {
               int now = ++live;
               int seen = peak.load();
               while (now > seen && !peak.compare_exchange_weak(seen, now)) {
               }
               std::this_thread::sleep_for(30ms);
               --live;
               return std::string("ok");
             }),
             nullptr);
  {
    std::vector<std::jthread> threads;
    for (int i = 0; i < 6; ++i) threads.emplace_back([&, i] { gw.complete(request("p", i + 1)); });
  }
  EXPECT_EQ(peak.load(), 2);
  EXPECT_EQ(gw.calls(), 6);
}

TEST(Gateway, ModeNeedsItsParts) {
  GatewayOptions live;
  live.mode = GatewayMode::Live;
  EXPECT_THROW(Gateway(live, nullptr, nullptr), ConfigError);
  EXPECT_THROW(Gateway({}, nullptr, nullptr), ConfigError);
  EXPECT_THROW(gateway_mode_from_string("offline"), ConfigError);
}

// ---------------------------------------------------------------------------
// Transports

TEST(HttpTransport, SpeaksChatCompletions) {
  httplib::Server server;
  std::string seen_auth;
  nlohmann::json seen_body;
  int hits = 0;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    if (hits++ == 0) {
      res.status = 503;
      return;
    }
    seen_auth = req.get_header_value("Authorization");
    seen_body = nlohmann::json::parse(req.body);
    nlohmann::json reply = {{"choices", {{{"message", {{"role", "assistant"}, {"content", "```\nprint(9)\n```"}}}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread loop([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  GatewayOptions opt;
  opt.mode = GatewayMode::Live;
  opt.model_tag = "local-model";
  Gateway gw(opt, make_transport("http://127.0.0.1:" + std::to_string(port), "sk-test"), nullptr);
  gw.set_sleeper([](Millis) {});
  auto req = request("say nine");
  req.temperature = 0.7;
  std::string text = gw.complete(req);
  server.stop();
  loop.join();

  EXPECT_EQ(extract_program(text), "print(9)\n");
  EXPECT_EQ(hits, 2);
  EXPECT_EQ(seen_auth, "Bearer sk-test");
  EXPECT_EQ(seen_body["model"], "local-model");
  EXPECT_DOUBLE_EQ(seen_body["temperature"].get<double>(), 0.7);
  EXPECT_EQ(seen_body["messages"][0]["content"], "say nine");
}

TEST(HttpTransport, MalformedBodyIsNotRetryable) {
  try {
    HttpChatTransport::parse_response("{\"choices\": []}");
    FAIL();
  } catch (const TransportFailure& f) {
    EXPECT_FALSE(f.retryable());
  }
}

TEST(ScriptedTransport, MatchesProblemKindAttemptAndText) {
  t::TempDir dir;
  t::write_file(dir / "prog.py", "print(5)\n");
  t::write_file(dir / "script.jsonl",
                "{\"problem\": \"a\", \"kind\": \"oracle\", \"attempt\": 2, \"response\": \"second\"}\n"
                "{\"problem\": \"a\", \"kind\": \"Oracle\", \"response\": \"any\"}\n"
                "{\"kind\": \"tagged_solution\", \"contains\": \"Greedy\", \"program\": \"prog.py\"}\n");
  auto transport = make_transport("script://" + (dir / "script.jsonl").string(), "");
  auto r = request("x", 2, PromptKind::Oracle);
  r.problem_id = "a";
  EXPECT_EQ(transport->send(r, "m"), "second");
  r.attempt = 1;
  EXPECT_EQ(transport->send(r, "m"), "any");
  r.problem_id = "b";
  EXPECT_THROW(transport->send(r, "m"), TransportFailure);
  auto tagged = request("use Greedy here", 1, PromptKind::TaggedSolution);
  EXPECT_EQ(transport->send(tagged, "m"), "```python\nprint(5)\n```\n");
}
