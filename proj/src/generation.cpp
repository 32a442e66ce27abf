#include "algo/generation.hpp"

#include <cctype>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "algo/errors.hpp"

namespace algo {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slug(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!out.empty() && out.back() != '_') {
      out.push_back('_');
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "x" : out;
}

void log_line(const Services& services, const std::string& text) {
  if (services.log) *services.log << text << '\n';
}

// One gateway round trip. Returns nullopt when the response holds no program.
std::optional<GeneratedProgram> sample(const Problem& problem, Services& services, PromptKind kind,
                                       const Slots& slots, int attempt,
                                       const std::optional<std::string>& category) {
  GenerationRequest request;
  request.kind = kind;
  request.rendered_prompt = render_prompt(kind, problem, slots, services.prompts);
  request.temperature = services.temperature;
  request.attempt = attempt;
  request.problem_id = problem.id;
  std::string response = services.gateway.complete(request);

  GeneratedProgram program;
  program.kind = kind;
  program.category = category;
  program.provenance = {request.hash(), attempt, services.prompts.get(kind).version_tag()};
  try {
    program.source = extract_program(response);
  } catch (const EmptyResponse&) {
    log_line(services, problem.id + ": empty " + std::string(to_string(kind)) + " response on attempt " +
                           std::to_string(attempt));
    return std::nullopt;
  }
  return program;
}

void persist(Services& services, const Problem& problem, const GeneratedProgram& program) {
  if (services.sink) services.sink->store(problem.id, program);
}

bool check_public(const Problem& problem, const GeneratedProgram& program, Services& services,
                  const ResourceLimits& limits) {
  auto results = run_cases(problem, program.source, problem.public_tests, services.executor, limits,
                           problem.equivalence);
  return passes_all(results);
}

}  // namespace

std::string GeneratedProgram::label() const {
  std::string out(file_stem(kind));
  if (category) out += "." + slug(*category);
  out += "_" + std::to_string(provenance.attempt);
  return out;
}

// ---------------------------------------------------------------------------

DirectoryProgramSink::DirectoryProgramSink(fs::path root, std::string extension)
    : root_(std::move(root)), extension_(std::move(extension)) {}

fs::path DirectoryProgramSink::path_for(const std::string& problem_id, const GeneratedProgram& program) const {
  return root_ / problem_id / (program.label() + extension_);
}

void DirectoryProgramSink::store(const std::string& problem_id, const GeneratedProgram& program) {
  std::lock_guard lock(mu_);
  fs::path dir = root_ / problem_id;
  fs::create_directories(dir);
  fs::path file = path_for(problem_id, program);
  {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out << program.source;
  }

  fs::path manifest_path = dir / "manifest.json";
  json manifest = json::object();
  if (fs::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    manifest = json::parse(in);
  }
  json entry = {
      {"file", file.filename().string()},
      {"kind", std::string(to_string(program.kind))},
      {"attempt", program.provenance.attempt},
      {"transcript_hash", program.provenance.transcript_hash},
      {"template", program.provenance.template_version},
      {"passed_public_tests", program.passed_public_tests},
  };
  if (program.category) entry["category"] = *program.category;
  manifest[program.label()] = entry;
  std::ofstream out(manifest_path, std::ios::trunc);
  out << manifest.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

GeneratedProgram generate_oracle(const Problem& problem, Services& services, int max_attempts) {
  if (problem.public_tests.empty()) throw DomainError("oracle generation needs public tests");
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    auto program = sample(problem, services, PromptKind::Oracle, {}, attempt, std::nullopt);
    if (!program) continue;
    program->passed_public_tests = check_public(problem, *program, services, services.oracle_limits);
    persist(services, problem, *program);
    if (!program->passed_public_tests) {
      log_line(services, problem.id + ": oracle attempt " + std::to_string(attempt) + " failed public tests");
      continue;
    }
    // Oracles are assumed deterministic; a double run on one public test
    // flags obvious violations.
    auto guest = problem.guest(program->source);
    const auto& probe = problem.public_tests.front().input;
    auto first = services.executor.run(guest, probe, services.oracle_limits);
    auto second = services.executor.run(guest, probe, services.oracle_limits);
    if (first.stdout_text != second.stdout_text) {
      log_line(services, "warning: " + problem.id + ": oracle output differs between runs");
    }
    return *program;
  }
  throw OracleExhausted(max_attempts);
}

GeneratedProgram generate_candidate(const Problem& problem, const std::optional<std::string>& instruction,
                                    Services& services, int max_attempts, int first_attempt) {
  if (max_attempts < 1) throw DomainError("max_attempts must be >= 1");
  PromptKind kind = instruction ? PromptKind::TaggedSolution : PromptKind::NaiveSolution;
  Slots slots;
  if (instruction) slots["category"] = *instruction;

  std::optional<GeneratedProgram> last;
  for (int attempt = first_attempt; attempt < first_attempt + max_attempts; ++attempt) {
    auto program = sample(problem, services, kind, slots, attempt, instruction);
    if (!program) continue;
    program->passed_public_tests = check_public(problem, *program, services, services.candidate_limits);
    persist(services, problem, *program);
    if (program->passed_public_tests) return *program;
    last = std::move(program);
  }
  if (!last) throw EmptyResponse();
  return *last;
}

GeneratedProgram generate_refinement(const Problem& problem, const GeneratedProgram& previous,
                                     const std::string& failing_cases, Services& services, int attempt) {
  Slots slots{{"previous_program", previous.source}, {"failing_cases", failing_cases}};
  auto program = sample(problem, services, PromptKind::Refinement, slots, attempt, previous.category);
  if (!program) throw EmptyResponse();
  program->passed_public_tests = check_public(problem, *program, services, services.candidate_limits);
  persist(services, problem, *program);
  return *program;
}

std::string batch_generator_request(int count, std::uint64_t seed, int max_var_length) {
  return std::to_string(count) + " " + std::to_string(seed) + " " + std::to_string(max_var_length) + "\n";
}

std::vector<std::string> parse_generated_inputs(std::string_view output) {
  std::vector<std::string> inputs;
  std::size_t pos = 0;
  int lineno = 0;
  while (pos < output.size()) {
    std::size_t end = output.find('\n', pos);
    if (end == std::string_view::npos) end = output.size();
    std::string_view line = output.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      json v = json::parse(line);
      inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    } catch (const json::parse_error& e) {
      throw ParseError("generator output line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return inputs;
}

bool validator_accepts(const ExecutionOutcome& outcome) {
  if (outcome.status != RunStatus::OK) return false;
  std::istringstream in(outcome.stdout_text);
  std::string word;
  in >> word;
  return word == "True" || word == "true" || word == "1";
}

VerifierComponents generate_verifier_components(const Problem& problem, Services& services,
                                                int max_var_length, int max_attempts) {
  VerifierComponents out;
  std::vector<std::string> public_inputs;
  for (const auto& t : problem.public_tests) public_inputs.push_back(t.input);

  std::string reason = "no program in response";
  bool have_validator = false;
  for (int attempt = 1; attempt <= max_attempts && !have_validator; ++attempt) {
    auto program = sample(problem, services, PromptKind::InputValidator, {}, attempt, std::nullopt);
    if (!program) continue;
    auto outcomes = services.executor.run_batch(GuestProgram{program->source, std::nullopt}, public_inputs,
                                                services.tool_limits);
    bool runs = true;
    bool accepts = true;
    for (const auto& o : outcomes) {
      runs = runs && o.status == RunStatus::OK;
      accepts = accepts && validator_accepts(o);
    }
    program->passed_public_tests = accepts;
    persist(services, problem, *program);
    if (accepts) {
      out.validator = std::move(*program);
      have_validator = true;
    } else {
      reason = runs ? "rejects public input" : "crashes on public input";
    }
  }
  if (!have_validator) throw ComponentRejected("validator", reason);

  const std::string mvl = std::to_string(max_var_length);
  constexpr int kSmokeCount = 5;
  reason = "no program in response";
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    auto single = sample(problem, services, PromptKind::InputGenerator, {{"max_var_length", mvl}}, attempt,
                         std::nullopt);
    if (!single) continue;
    persist(services, problem, *single);
    auto batch = sample(problem, services, PromptKind::BatchGenerator,
                        {{"max_var_length", mvl}, {"input_generator", single->source}}, attempt, std::nullopt);
    if (!batch) continue;
    auto outcome = services.executor.run(GuestProgram{batch->source, std::nullopt},
                                         batch_generator_request(kSmokeCount, 0, max_var_length),
                                         services.tool_limits);
    bool ok = false;
    if (outcome.status != RunStatus::OK) {
      reason = "does not run (" + std::string(to_string(outcome.status)) + ")";
    } else {
      try {
        auto records = parse_generated_inputs(outcome.stdout_text);
        ok = records.size() == kSmokeCount;
        if (!ok) reason = "emitted " + std::to_string(records.size()) + " records, asked for 5";
      } catch (const ParseError& e) {
        reason = std::string("unparseable output: ") + e.what();
      }
    }
    batch->passed_public_tests = ok;
    persist(services, problem, *batch);
    if (ok) {
      out.batch_generator = std::move(*batch);
      out.input_generator = std::move(*single);
      return out;
    }
  }
  throw ComponentRejected("batch_generator", reason);
}

}  // namespace algo
