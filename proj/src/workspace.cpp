#include "algo/workspace.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "algo/digest.hpp"
#include "algo/errors.hpp"
#include "algo/metrics.hpp"
#include "algo/problem.hpp"

namespace algo {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path.lexically_normal() : (base / path).lexically_normal();
}

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig

fs::path RunConfig::transcripts() const {
  return transcripts_path ? *transcripts_path : workspace_path / "transcripts";
}

ResourceLimits RunConfig::candidate_limits() const {
  auto l = ResourceLimits::with_wall_time(candidate_wall);
  l.memory = memory;
  return l;
}

ResourceLimits RunConfig::oracle_limits() const {
  auto l = ResourceLimits::with_wall_time(oracle_wall);
  l.memory = memory;
  return l;
}

ResourceLimits RunConfig::tool_limits() const {
  auto l = ResourceLimits::with_wall_time(tool_wall);
  l.memory = memory;
  return l;
}

void RunConfig::validate() const {
  if (corpus_path.empty()) throw ConfigError("corpus path is not set");
  if (workspace_path.empty()) throw ConfigError("workspace path is not set");
  if (!seed) throw ConfigError("seed is mandatory");
  if (suite_size < 1) throw ConfigError("suite_size must be >= 1");
  if (max_var_length < 1) throw ConfigError("max_var_length must be >= 1");
  if (max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
  for (int k : ks) {
    if (k < 1) throw ConfigError("every k must be >= 1");
  }
  for (int s : suite_sizes) {
    if (s < 1) throw ConfigError("every suite size must be >= 1");
  }
  candidate_limits().validate();
  oracle_limits().validate();
  tool_limits().validate();
  strategy.validate({"(per problem)"});
  if (mode == GatewayMode::Replay && !TranscriptStore::exists(transcripts())) {
    throw ConfigError("replay mode needs an existing transcript store at " + transcripts().string());
  }
  if (mode != GatewayMode::Replay && endpoint.empty()) throw ConfigError("gateway endpoint is not set");
}

std::string RunConfig::canonical() const {
  json doc = {
      {"corpus", corpus_path.string()},
      {"transcripts", transcripts().string()},
      {"prompts", prompts_path ? json(prompts_path->string()) : json(nullptr)},
      {"gateway", {{"endpoint", endpoint}, {"model", model_tag}, {"temperature", temperature}}},
      {"runtime", {{"language", runtime.language}, {"command", runtime.command}, {"extension", runtime.extension}}},
      {"limits",
       {{"candidate_ms", candidate_wall.count()},
        {"oracle_ms", oracle_wall.count()},
        {"tool_ms", tool_wall.count()},
        {"memory", memory}}},
      {"suite_size", suite_size},
      {"max_var_length", max_var_length},
      {"seed", seed ? json(*seed) : json(nullptr)},
      {"strategy",
       {{"kind", std::string(to_string(strategy.kind))},
        {"sample_budget", strategy.sample_budget},
        {"instruction_set", strategy.instruction_set},
        {"max_rounds", strategy.max_rounds}}},
      {"equivalence", std::string(to_string(equivalence))},
      {"k", ks},
      {"suite_sizes", suite_sizes},
      {"coverage_adapter", coverage_adapter ? json(*coverage_adapter) : json(nullptr)},
  };
  return doc.dump();
}

std::string RunConfig::hash() const { return sha256_hex(canonical()); }

RunConfig parse_run_config(std::string_view text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  RunConfig c;
  if (auto p = get_or<std::string>(doc, "corpus", ""); !p.empty()) c.corpus_path = resolve(base_dir, p);
  if (auto p = get_or<std::string>(doc, "workspace", ""); !p.empty()) c.workspace_path = resolve(base_dir, p);
  if (doc.contains("seed") && !doc["seed"].is_null()) c.seed = get_or<std::uint64_t>(doc, "seed", 0);
  c.suite_size = get_or(doc, "suite_size", c.suite_size);
  c.max_var_length = get_or(doc, "max_var_length", c.max_var_length);
  c.parallelism = get_or(doc, "parallelism", c.parallelism);
  c.ks = get_or(doc, "k", c.ks);
  c.suite_sizes = get_or(doc, "suite_sizes", c.suite_sizes);
  c.equivalence = equivalence_from_string(get_or<std::string>(doc, "equivalence", "token"));
  if (auto p = get_or<std::string>(doc, "prompts", ""); !p.empty()) c.prompts_path = resolve(base_dir, p);
  if (auto a = get_or<std::string>(doc, "coverage_adapter", ""); !a.empty()) {
    for (std::size_t pos; (pos = a.find("{config_dir}")) != std::string::npos;) {
      a.replace(pos, 12, base_dir.string());
    }
    c.coverage_adapter = a;
  }

  if (doc.contains("gateway")) {
    const json& g = doc["gateway"];
    for (const char* forbidden : {"api_key", "key", "token"}) {
      if (g.contains(forbidden)) throw ConfigError("API keys are read from the environment, not the config file");
    }
    c.mode = gateway_mode_from_string(get_or<std::string>(g, "mode", "replay"));
    c.endpoint = get_or<std::string>(g, "endpoint", "");
    if (c.endpoint.rfind("script://", 0) == 0) {
      c.endpoint = "script://" + resolve(base_dir, c.endpoint.substr(9)).string();
    }
    c.model_tag = get_or<std::string>(g, "model", c.model_tag);
    c.api_key_env = get_or<std::string>(g, "api_key_env", c.api_key_env);
    c.max_in_flight = get_or(g, "max_in_flight", c.max_in_flight);
    c.temperature = get_or(g, "temperature", c.temperature);
    if (auto p = get_or<std::string>(g, "transcripts", ""); !p.empty()) c.transcripts_path = resolve(base_dir, p);
  }
  if (doc.contains("api_key")) throw ConfigError("API keys are read from the environment, not the config file");

  if (doc.contains("runtime")) {
    const json& r = doc["runtime"];
    c.runtime.language = get_or<std::string>(r, "language", c.runtime.language);
    c.runtime.command = get_or<std::string>(r, "command", c.runtime.command);
    c.runtime.extension = get_or<std::string>(r, "extension", c.runtime.extension);
  }
  if (doc.contains("limits")) {
    const json& l = doc["limits"];
    c.candidate_wall = Millis{get_or<long>(l, "candidate_ms", c.candidate_wall.count())};
    c.oracle_wall = Millis{get_or<long>(l, "oracle_ms", c.oracle_wall.count())};
    c.tool_wall = Millis{get_or<long>(l, "tool_ms", c.tool_wall.count())};
    c.memory = get_or<std::size_t>(l, "memory_mb", c.memory >> 20) << 20;
  }
  if (doc.contains("strategy")) {
    const json& s = doc["strategy"];
    c.strategy.kind = strategy_kind_from_string(get_or<std::string>(s, "kind", "implicit"));
    c.strategy.sample_budget = get_or(s, "sample_budget", c.strategy.sample_budget);
    c.strategy.instruction_set = get_or(s, "instruction_set", c.strategy.instruction_set);
    c.strategy.max_rounds = get_or(s, "max_rounds", c.strategy.max_rounds);
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  fs::path absolute = fs::absolute(path);
  return parse_run_config(slurp(absolute), absolute.parent_path());
}

// ---------------------------------------------------------------------------
// Workspace

Workspace::Workspace(fs::path root) : root_(std::move(root)) {
  for (const auto& dir : {root_, programs(), suites(), verdicts(), reports()}) fs::create_directories(dir);
  fs::path manifest = root_ / "manifest.json";
  if (!fs::exists(manifest)) return;
  try {
    json doc = json::parse(slurp(manifest));
    config_hash_ = doc.value("config_hash", "");
    for (const auto& [rel, e] : doc.at("artifacts").items()) {
      artifacts_[rel] = {e.at("sha256").get<std::string>(), e.at("input_key").get<std::string>()};
    }
  } catch (const json::exception&) {
    // A damaged manifest only costs recomputation.
    artifacts_.clear();
  }
}

void Workspace::save_manifest() const {
  json artifacts = json::object();
  for (const auto& [rel, e] : artifacts_) artifacts[rel] = {{"sha256", e.sha256}, {"input_key", e.input_key}};
  json doc = {{"config_hash", config_hash_}, {"artifacts", artifacts}};
  fs::path tmp = root_ / "manifest.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << doc.dump(2) << '\n';
  }
  fs::rename(tmp, root_ / "manifest.json");
}

void Workspace::set_config_hash(const std::string& hash) {
  std::lock_guard lock(mu_);
  config_hash_ = hash;
  save_manifest();
}

void Workspace::write_artifact(const std::string& relative, const std::string& content,
                               const std::string& input_key) {
  fs::path path = root_ / relative;
  fs::create_directories(path.parent_path());
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error("cannot write " + path.string());
  }
  std::lock_guard lock(mu_);
  artifacts_[relative] = {sha256_hex(content), input_key};
  save_manifest();
}

void Workspace::track(const std::string& relative, const std::string& input_key) {
  std::string content = slurp(root_ / relative);
  std::lock_guard lock(mu_);
  artifacts_[relative] = {sha256_hex(content), input_key};
  save_manifest();
}

bool Workspace::fresh(const std::string& relative, const std::string& input_key) const {
  Entry entry;
  {
    std::lock_guard lock(mu_);
    auto it = artifacts_.find(relative);
    if (it == artifacts_.end()) return false;
    entry = it->second;
  }
  if (entry.input_key != input_key || !has(relative)) return false;
  return sha256_hex(slurp(root_ / relative)) == entry.sha256;
}

std::string Workspace::read(const std::string& relative) const { return slurp(root_ / relative); }

bool Workspace::has(const std::string& relative) const { return fs::is_regular_file(root_ / relative); }

// ---------------------------------------------------------------------------
// Persisted artifacts

namespace {

json program_to_json(const GeneratedProgram& p) {
  return {
      {"label", p.label()},
      {"kind", std::string(to_string(p.kind))},
      {"attempt", p.provenance.attempt},
      {"transcript_hash", p.provenance.transcript_hash},
      {"template", p.provenance.template_version},
      {"passed_public_tests", p.passed_public_tests},
      {"category", p.category ? json(*p.category) : json(nullptr)},
      {"source", p.source},
  };
}

GeneratedProgram program_from_json(const json& j) {
  GeneratedProgram p;
  p.kind = prompt_kind_from_string(j.at("kind").get<std::string>());
  p.provenance.attempt = j.at("attempt").get<int>();
  p.provenance.transcript_hash = j.at("transcript_hash").get<std::string>();
  p.provenance.template_version = j.at("template").get<std::string>();
  p.passed_public_tests = j.at("passed_public_tests").get<bool>();
  if (!j.at("category").is_null()) p.category = j.at("category").get<std::string>();
  p.source = j.at("source").get<std::string>();
  return p;
}

}  // namespace

std::string serialize_bundle(const VerifierBundle& bundle) {
  json doc = {
      {"max_var_length", bundle.max_var_length},
      {"oracle", program_to_json(bundle.oracle)},
      {"validator", program_to_json(bundle.validator)},
      {"batch_generator", program_to_json(bundle.batch_generator)},
      {"input_generator", bundle.input_generator ? program_to_json(*bundle.input_generator) : json(nullptr)},
  };
  return doc.dump(2) + "\n";
}

VerifierBundle parse_bundle(std::string_view text) {
  try {
    json doc = json::parse(text);
    VerifierBundle b;
    b.max_var_length = doc.at("max_var_length").get<int>();
    b.oracle = program_from_json(doc.at("oracle"));
    b.validator = program_from_json(doc.at("validator"));
    b.batch_generator = program_from_json(doc.at("batch_generator"));
    if (!doc.at("input_generator").is_null()) b.input_generator = program_from_json(doc["input_generator"]);
    return b;
  } catch (const json::exception& e) {
    throw ParseError(std::string("verifier bundle: ") + e.what());
  }
}

std::string serialize_ranking(const RankedCandidates& ranking) {
  json entries = json::array();
  for (const auto& e : ranking.entries) {
    std::string results;
    for (bool r : e.verdict.case_results) results.push_back(r ? '1' : '0');
    json cexs = json::array();
    for (const auto& c : e.verdict.counterexamples) {
      cexs.push_back({{"case_index", c.case_index}, {"input", c.input}, {"expected", c.expected}, {"actual", c.actual}});
    }
    entries.push_back({
        {"rank", e.rank},
        {"candidate", program_to_json(e.candidate)},
        {"verdict",
         {{"pass", e.verdict.pass},
          {"cases_run", e.verdict.cases_run},
          {"cases_passed", e.verdict.cases_passed},
          {"case_results", results},
          {"counterexamples", cexs}}},
    });
  }
  auto cat = ranking.selected_category();
  json doc = {
      {"entries", entries},
      {"selected_category", cat ? json(*cat) : json(nullptr)},
      {"first_passing_category",
       ranking.first_passing_category ? json(*ranking.first_passing_category) : json(nullptr)},
  };
  return doc.dump(2) + "\n";
}

RankedCandidates parse_ranking(std::string_view text) {
  try {
    json doc = json::parse(text);
    RankedCandidates out;
    for (const auto& e : doc.at("entries")) {
      RankedEntry entry;
      entry.rank = e.at("rank").get<int>();
      entry.candidate = program_from_json(e.at("candidate"));
      const json& v = e.at("verdict");
      entry.verdict.pass = v.at("pass").get<bool>();
      entry.verdict.cases_run = v.at("cases_run").get<int>();
      entry.verdict.cases_passed = v.at("cases_passed").get<int>();
      for (char ch : v.at("case_results").get<std::string>()) entry.verdict.case_results.push_back(ch == '1');
      for (const auto& c : v.at("counterexamples")) {
        entry.verdict.counterexamples.push_back({c.at("case_index").get<std::size_t>(), c.at("input").get<std::string>(),
                                                 c.at("expected").get<std::string>(),
                                                 c.at("actual").get<std::string>()});
      }
      out.entries.push_back(std::move(entry));
    }
    if (!doc.at("first_passing_category").is_null()) {
      out.first_passing_category = doc["first_passing_category"].get<std::string>();
    }
    return out;
  } catch (const json::exception& e) {
    throw ParseError(std::string("ranking: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Commands

namespace {

// Program sink that keeps the workspace manifest in step.
class WorkspaceSink : public ProgramSink {
 public:
  WorkspaceSink(Workspace& ws, std::string extension)
      : ws_(ws), inner_(ws.programs(), std::move(extension)) {}

  void store(const std::string& problem_id, const GeneratedProgram& program) override {
    inner_.store(problem_id, program);
    auto file = fs::relative(inner_.path_for(problem_id, program), ws_.root()).string();
    ws_.track(file, program.provenance.transcript_hash);
    ws_.track("programs/" + problem_id + "/manifest.json", "");
  }

 private:
  Workspace& ws_;
  DirectoryProgramSink inner_;
};

struct Pipeline {
  const RunConfig& config;
  std::vector<Problem> problems;
  Workspace ws;
  PromptCatalog catalog;
  Executor executor;
  std::unique_ptr<Gateway> gateway;
  WorkspaceSink sink;

  explicit Pipeline(const RunConfig& c)
      : config(c),
        problems(load_corpus(c.corpus_path)),
        ws(c.workspace_path),
        catalog(c.prompts_path ? PromptCatalog::from_directory(*c.prompts_path) : PromptCatalog::builtin()),
        executor(c.runtime, c.parallelism),
        sink(ws, c.runtime.extension) {
    catalog.set_default("language", c.runtime.language);
    ws.set_config_hash(c.hash());
  }

  // The gateway is only needed by commands that generate.
  Gateway& llm() {
    if (gateway) return *gateway;
    GatewayOptions options;
    options.mode = config.mode;
    options.model_tag = config.model_tag;
    options.max_in_flight = config.max_in_flight;
    std::unique_ptr<ChatTransport> transport;
    if (config.mode != GatewayMode::Replay) {
      const char* key = std::getenv(config.api_key_env.c_str());
      transport = make_transport(config.endpoint, key ? key : "");
    }
    std::shared_ptr<TranscriptStore> store;
    if (config.mode != GatewayMode::Live) store = std::make_shared<TranscriptStore>(config.transcripts());
    gateway = std::make_unique<Gateway>(options, std::move(transport), std::move(store));
    return *gateway;
  }

  Services services(std::ostream& log) {
    return Services{llm(), executor, catalog, config.oracle_limits(), config.candidate_limits(),
                    config.tool_limits(), config.temperature, &sink, &log};
  }

  std::string problem_seed_label(const Problem& p) const { return p.id; }

  std::string verifier_key(const Problem& p) const {
    json tests = json::array();
    for (const auto& t : p.public_tests) tests.push_back({t.input, t.expected_output});
    json doc = {
        {"problem", {p.id, p.title, p.description, p.constraints, std::string(to_string(p.io_style)), tests}},
        {"seed", *config.seed},
        {"suite_size", config.suite_size},
        {"max_var_length", config.max_var_length},
        {"model", config.model_tag},
        {"temperature", config.temperature},
        {"runtime", config.runtime.command},
        {"limits", {config.oracle_wall.count(), config.tool_wall.count(), config.memory}},
        {"prompts", prompt_versions()},
    };
    return sha256_hex(doc.dump());
  }

  std::string synth_key(const Problem& p) const {
    json doc = {
        {"verifier", verifier_key(p)},
        {"bundle", sha256_hex(ws.read("suites/" + p.id + ".bundle.json"))},
        {"suite", sha256_hex(ws.read("suites/" + p.id + ".jsonl"))},
        {"strategy",
         {std::string(to_string(config.strategy.kind)), config.strategy.sample_budget,
          config.strategy.instruction_set, config.strategy.max_rounds}},
        {"candidate_ms", config.candidate_wall.count()},
        {"equivalence", std::string(to_string(config.equivalence))},
    };
    return sha256_hex(doc.dump());
  }

  std::vector<std::string> prompt_versions() const {
    std::vector<std::string> out;
    for (auto kind : {PromptKind::NaiveSolution, PromptKind::TaggedSolution, PromptKind::Oracle,
                      PromptKind::InputValidator, PromptKind::InputGenerator, PromptKind::BatchGenerator,
                      PromptKind::Refinement}) {
      out.push_back(catalog.get(kind).version_tag());
    }
    return out;
  }

  // Runs fn(i, log_i) for every problem on up to `parallelism` threads and
  // replays the per-problem logs in corpus order.
  template <typename Fn>
  void for_each_problem(std::ostream& log, Fn fn) {
    std::vector<std::ostringstream> logs(problems.size());
    unsigned workers = executor.parallelism();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(problems.size())));
    std::atomic<std::size_t> next{0};
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t i; (i = next.fetch_add(1)) < problems.size();) fn(i, logs[i]);
        });
      }
    }
    for (auto& l : logs) log << l.str();
  }
};

std::string describe(const std::exception& e) { return e.what(); }

}  // namespace

int cmd_build_verifier(const RunConfig& config, std::ostream& log) {
  config.validate();
  Pipeline pipe(config);
  std::vector<std::string> failures(pipe.problems.size());

  pipe.for_each_problem(log, [&](std::size_t i, std::ostream& plog) {
    const Problem& p = pipe.problems[i];
    const std::string key = pipe.verifier_key(p);
    const std::string bundle_file = "suites/" + p.id + ".bundle.json";
    const std::string suite_file = "suites/" + p.id + ".jsonl";
    const std::string stats_file = "suites/" + p.id + ".stats.json";
    if (pipe.ws.fresh(bundle_file, key) && pipe.ws.fresh(suite_file, key) && pipe.ws.fresh(stats_file, key)) {
      plog << p.id << ": verifier up to date\n";
      return;
    }
    try {
      Services services = pipe.services(plog);
      VerifierBundle bundle;
      bundle.oracle = generate_oracle(p, services);
      auto components = generate_verifier_components(p, services, config.max_var_length);
      bundle.validator = std::move(components.validator);
      bundle.batch_generator = std::move(components.batch_generator);
      bundle.input_generator = std::move(components.input_generator);
      bundle.max_var_length = config.max_var_length;
      Suite suite = build_suite(p, bundle, config.suite_size, derive_seed(*config.seed, p.id), pipe.executor,
                                {config.oracle_limits(), config.tool_limits()});
      pipe.ws.write_artifact(bundle_file, serialize_bundle(bundle), key);
      pipe.ws.write_artifact(suite_file, serialize_suite(suite), key);
      pipe.ws.write_artifact(stats_file, serialize_suite_stats(suite), key);
      plog << p.id << ": suite of " << suite.cases.size() << " cases (" << suite.rejected_by_validator
           << " rejected, " << suite.skipped_oracle << " skipped, " << suite.oracle_errors << " oracle errors)\n";
    } catch (const OracleExhausted& e) {
      failures[i] = describe(e);
    } catch (const ComponentRejected& e) {
      failures[i] = describe(e);
    } catch (const SuiteTooSmall& e) {
      failures[i] = describe(e);
    } catch (const ReplayMiss& e) {
      failures[i] = describe(e);
    } catch (const TransportError& e) {
      failures[i] = describe(e);
    } catch (const TransportFailure& e) {
      failures[i] = describe(e);
    } catch (const EmptyResponse& e) {
      failures[i] = describe(e);
    }
  });

  int failed = 0;
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (failures[i].empty()) continue;
    if (failed++ == 0) log << "failed problems:\n";
    log << "  " << pipe.problems[i].id << ": " << failures[i] << "\n";
  }
  return failed == 0 ? 0 : 1;
}

int cmd_synthesize(const RunConfig& config, std::ostream& log) {
  config.validate();
  Pipeline pipe(config);
  std::vector<std::string> failures(pipe.problems.size());

  pipe.for_each_problem(log, [&](std::size_t i, std::ostream& plog) {
    const Problem& p = pipe.problems[i];
    const std::string bundle_file = "suites/" + p.id + ".bundle.json";
    const std::string suite_file = "suites/" + p.id + ".jsonl";
    const std::string out_file = "verdicts/" + p.id + ".json";
    if (!pipe.ws.has(bundle_file) || !pipe.ws.has(suite_file)) {
      failures[i] = "no suite; run build-verifier first";
      return;
    }
    try {
      const std::string key = pipe.synth_key(p);
      if (pipe.ws.fresh(out_file, key)) {
        plog << p.id << ": ranking up to date\n";
        return;
      }
      Suite suite = parse_suite(pipe.ws.read(suite_file));
      Services services = pipe.services(plog);
      SearchContext ctx{services, suite, config.equivalence};
      RankedCandidates ranking = run_strategy(p, config.strategy, ctx);
      pipe.ws.write_artifact(out_file, serialize_ranking(ranking), key);
      int passing = 0;
      for (const auto& e : ranking.entries) passing += e.verdict.pass;
      plog << p.id << ": " << ranking.entries.size() << " candidates, " << passing << " pass the suite";
      if (const auto* top = ranking.top()) plog << ", top " << top->candidate.label();
      plog << "\n";
    } catch (const ReplayMiss& e) {
      failures[i] = describe(e);
    } catch (const TransportError& e) {
      failures[i] = describe(e);
    } catch (const TransportFailure& e) {
      failures[i] = describe(e);
    } catch (const ParseError& e) {
      failures[i] = describe(e);
    }
  });

  int failed = 0;
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (failures[i].empty()) continue;
    if (failed++ == 0) log << "failed problems:\n";
    log << "  " << pipe.problems[i].id << ": " << failures[i] << "\n";
  }
  return failed == 0 ? 0 : 1;
}

namespace {

struct JudgedEntry {
  RankedEntry entry;
  bool public_verdict = false;
  std::optional<JudgeStatus> status;
};

struct JudgedProblem {
  std::vector<JudgedEntry> entries;
  std::optional<OracleClassification> oracle;
  std::optional<double> coverage;
  std::optional<std::string> first_passing_category;
  Suite suite;
};

ProblemReport make_problem_report(const Problem& p, const JudgedProblem& jp, std::optional<std::size_t> prefix) {
  std::vector<std::pair<GeneratedProgram, Verdict>> pairs;
  std::map<std::string, const JudgedEntry*> by_label;
  for (const auto& je : jp.entries) {
    Verdict v = prefix ? je.entry.verdict.restricted_to(*prefix) : je.entry.verdict;
    by_label[je.entry.candidate.label()] = &je;
    pairs.emplace_back(je.entry.candidate, v);
  }
  RankedCandidates ranking = rank_candidates(std::move(pairs));

  ProblemReport r;
  r.problem_id = p.id;
  r.oracle = jp.oracle;
  r.coverage = prefix ? std::nullopt : jp.coverage;
  r.selected_category = ranking.selected_category();
  // Generation order is not persisted, so sweep variants omit it.
  if (!prefix) r.first_passing_category = jp.first_passing_category;
  Suite s = prefix ? jp.suite.prefix(*prefix) : jp.suite;
  r.suite_cases = static_cast<int>(s.cases.size());
  r.suite_requested = s.requested;
  r.suite_generated = s.generated;
  r.suite_rejected = s.rejected_by_validator;
  r.suite_skipped_oracle = s.skipped_oracle;
  r.suite_oracle_errors = s.oracle_errors;
  for (const auto& e : ranking.entries) {
    const JudgedEntry* je = by_label.at(e.candidate.label());
    r.candidates.push_back({e.candidate.label(), e.rank, e.candidate.passed_public_tests, je->public_verdict,
                            e.verdict, je->status});
  }
  return r;
}

}  // namespace

int cmd_evaluate(const RunConfig& config, std::ostream& log) {
  config.validate();
  Pipeline pipe(config);
  std::vector<std::string> failures(pipe.problems.size());
  std::vector<JudgedProblem> judged(pipe.problems.size());

  pipe.for_each_problem(log, [&](std::size_t i, std::ostream& plog) {
    const Problem& p = pipe.problems[i];
    const std::string verdict_file = "verdicts/" + p.id + ".json";
    if (!pipe.ws.has(verdict_file)) {
      failures[i] = "no ranking; run synthesize first";
      return;
    }
    try {
      RankedCandidates ranking = parse_ranking(pipe.ws.read(verdict_file));
      VerifierBundle bundle = parse_bundle(pipe.ws.read("suites/" + p.id + ".bundle.json"));
      JudgedProblem& jp = judged[i];
      jp.suite = parse_suite(pipe.ws.read("suites/" + p.id + ".jsonl"));
      apply_suite_stats(jp.suite, pipe.ws.read("suites/" + p.id + ".stats.json"));
      jp.first_passing_category = ranking.first_passing_category;
      for (auto& e : ranking.entries) {
        JudgedEntry je;
        auto results = run_cases(p, e.candidate.source, p.public_tests, pipe.executor, config.candidate_limits(),
                                 config.equivalence);
        je.public_verdict = passes_all(results);
        if (p.judge) je.status = judge(e.candidate.source, p, *p.judge, pipe.executor);
        je.entry = std::move(e);
        jp.entries.push_back(std::move(je));
      }
      if (p.judge) jp.oracle = classify_oracle(p, bundle.oracle, *p.judge, pipe.executor);
      if (config.coverage_adapter && !jp.entries.empty()) {
        try {
          auto tests = jp.suite.tests();
          jp.coverage = coverage_percent(p, jp.entries.front().entry.candidate, tests,
                                         CoverageAdapter{*config.coverage_adapter}, pipe.executor);
        } catch (const AdapterUnavailable& e) {
          plog << p.id << ": coverage absent: " << e.what() << "\n";
        }
      }
      if (!p.judge) plog << p.id << ": no judge data; judge-backed metrics absent\n";
    } catch (const Error& e) {
      failures[i] = describe(e);
    }
  });

  int failed = 0;
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (failures[i].empty()) continue;
    if (failed++ == 0) log << "failed problems:\n";
    log << "  " << pipe.problems[i].id << ": " << failures[i] << "\n";
  }
  if (failed) return 1;

  auto emit = [&](std::optional<std::size_t> prefix) {
    EvaluationReport report;
    for (std::size_t i = 0; i < pipe.problems.size(); ++i) {
      report.problems.push_back(make_problem_report(pipe.problems[i], judged[i], prefix));
    }
    aggregate(report, config.ks);
    std::string stem = "reports/report";
    if (prefix) {
      report.suite_size = static_cast<int>(*prefix);
      stem += ".s" + std::to_string(*prefix);
    }
    pipe.ws.write_artifact(stem + ".json", report.to_json(), config.hash());
    pipe.ws.write_artifact(stem + ".txt", report.to_table(), config.hash());
    return report;
  };

  log << emit(std::nullopt).to_table();
  for (int s : config.suite_sizes) {
    auto report = emit(static_cast<std::size_t>(s));
    log << "suite size " << s << ": agreement " << (report.agreement ? std::to_string(*report.agreement) : "absent")
        << "\n";
  }
  return 0;
}

}  // namespace algo
