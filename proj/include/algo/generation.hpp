#pragma once

#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "algo/executor.hpp"
#include "algo/llm_gateway.hpp"
#include "algo/problem.hpp"

namespace algo {

struct Provenance {
  std::string transcript_hash;
  int attempt = 1;
  std::string template_version;
};

struct GeneratedProgram {
  std::string source;
  PromptKind kind = PromptKind::NaiveSolution;
  Provenance provenance;
  // Set only after the program has been run on the public tests.
  bool passed_public_tests = false;
  // The instruction (algorithm category) the program was generated under.
  std::optional<std::string> category;

  // Stable name used for files and reports, e.g. "naive_solution_2" or
  // "tagged_solution.binary_search_1".
  std::string label() const;
};

struct VerifierBundle {
  GeneratedProgram oracle;
  GeneratedProgram validator;
  GeneratedProgram batch_generator;
  // The single-input generator the batch generator was built from. Persisted
  // for audit, never executed.
  std::optional<GeneratedProgram> input_generator;
  int max_var_length = 10;
  std::optional<std::vector<TestCase>> suite;
};

// Persists every generated program, passing or not.
class ProgramSink {
 public:
  virtual ~ProgramSink() = default;
  virtual void store(const std::string& problem_id, const GeneratedProgram& program) = 0;
};

// Writes programs/<problem_id>/<label><ext> plus a manifest.json per problem.
class DirectoryProgramSink : public ProgramSink {
 public:
  DirectoryProgramSink(std::filesystem::path root, std::string extension);
  void store(const std::string& problem_id, const GeneratedProgram& program) override;

  std::filesystem::path path_for(const std::string& problem_id, const GeneratedProgram& program) const;

 private:
  std::filesystem::path root_;
  std::string extension_;
  std::mutex mu_;
};

// What a generation pipeline needs besides the problem itself.
struct Services {
  Gateway& gateway;
  const Executor& executor;
  const PromptCatalog& prompts = PromptCatalog::builtin();
  ResourceLimits oracle_limits = ResourceLimits::with_wall_time(Millis{30000});
  ResourceLimits candidate_limits = ResourceLimits::with_wall_time(Millis{2000});
  ResourceLimits tool_limits = ResourceLimits::with_wall_time(Millis{10000});
  double temperature = 1.0;
  ProgramSink* sink = nullptr;
  std::ostream* log = nullptr;
};

inline constexpr int kOracleMaxAttempts = 10;
inline constexpr int kCandidateMaxAttempts = 5;
inline constexpr int kComponentMaxAttempts = 5;
inline constexpr int kDefaultMaxVarLength = 10;

// Samples oracles until one passes every public test under the oracle limits.
// Throws OracleExhausted(max_attempts) when none does.
GeneratedProgram generate_oracle(const Problem& problem, Services& services,
                                 int max_attempts = kOracleMaxAttempts);

// Samples a solution (TaggedSolution when `instruction` is set) and returns
// the first sample passing the public tests, or the last sample with
// passed_public_tests=false. Attempts are numbered from first_attempt.
GeneratedProgram generate_candidate(const Problem& problem, const std::optional<std::string>& instruction,
                                    Services& services, int max_attempts = kCandidateMaxAttempts,
                                    int first_attempt = 1);

// One Refinement sample revising `previous` given rendered failing cases.
// Checked against the public tests like any candidate. Throws EmptyResponse
// when the response holds no program.
GeneratedProgram generate_refinement(const Problem& problem, const GeneratedProgram& previous,
                                     const std::string& failing_cases, Services& services, int attempt);

struct VerifierComponents {
  GeneratedProgram validator;
  GeneratedProgram batch_generator;
  GeneratedProgram input_generator;
};

// Generates and smoke-tests the input validator and batch generator. Throws
// ComponentRejected when a component fails its smoke test max_attempts times.
VerifierComponents generate_verifier_components(const Problem& problem, Services& services,
                                                int max_var_length = kDefaultMaxVarLength,
                                                int max_attempts = kComponentMaxAttempts);

// Stdin payload for the batch generator protocol: "<count> <seed> <max_len>\n".
std::string batch_generator_request(int count, std::uint64_t seed, int max_var_length);

// Parses batch generator output: one JSON value per line. A JSON string is
// taken verbatim as the test input; any other value is re-encoded compactly.
// Throws ParseError on a malformed line.
std::vector<std::string> parse_generated_inputs(std::string_view output);

// True when the validator's output says the input is acceptable.
bool validator_accepts(const ExecutionOutcome& outcome);

}  // namespace algo
