#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "algo/equivalence.hpp"
#include "algo/executor.hpp"
#include "algo/generation.hpp"
#include "algo/llm_gateway.hpp"
#include "algo/search.hpp"
#include "algo/verifier.hpp"

namespace algo {

struct RunConfig {
  std::filesystem::path corpus_path;
  std::filesystem::path workspace_path;
  // Defaults to <workspace>/transcripts.
  std::optional<std::filesystem::path> transcripts_path;
  std::optional<std::filesystem::path> prompts_path;

  GatewayMode mode = GatewayMode::Replay;
  std::string endpoint;
  std::string model_tag = "unknown";
  // Name of the environment variable holding the API key. The key itself is
  // never part of a config file.
  std::string api_key_env = "ALGO_API_KEY";
  unsigned max_in_flight = 4;
  double temperature = 1.0;

  Runtime runtime;
  Millis candidate_wall{2000};
  Millis oracle_wall{30000};
  Millis tool_wall{10000};
  std::size_t memory = std::size_t{512} << 20;

  int suite_size = kDefaultSuiteSize;
  int max_var_length = kDefaultMaxVarLength;
  std::optional<std::uint64_t> seed;
  StrategySpec strategy;
  EquivalencePolicy equivalence = EquivalencePolicy::Token;
  unsigned parallelism = 0;
  std::vector<int> ks{1};
  std::vector<int> suite_sizes;
  // Coverage adapter command; "{config_dir}" expands to the config's folder.
  std::optional<std::string> coverage_adapter;

  std::filesystem::path transcripts() const;
  ResourceLimits candidate_limits() const;
  ResourceLimits oracle_limits() const;
  ResourceLimits tool_limits() const;

  // Throws ConfigError (missing seed, bad limits, replay without a store...).
  void validate() const;

  // Canonical JSON of every field that influences results.
  std::string canonical() const;
  std::string hash() const;
};

// Relative paths resolve against `base_dir`. Throws ConfigError.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

// Directory tree for one run plus a manifest.json that maps every artifact
// (path relative to the root) to its sha256 and the key of the inputs that
// produced it.
class Workspace {
 public:
  explicit Workspace(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path programs() const { return root_ / "programs"; }
  std::filesystem::path suites() const { return root_ / "suites"; }
  std::filesystem::path verdicts() const { return root_ / "verdicts"; }
  std::filesystem::path reports() const { return root_ / "reports"; }

  void set_config_hash(const std::string& hash);

  // Writes the file and records it in the manifest.
  void write_artifact(const std::string& relative, const std::string& content, const std::string& input_key);
  // True when the file exists, its digest matches the manifest and it was
  // produced from `input_key`.
  bool fresh(const std::string& relative, const std::string& input_key) const;
  // Records a file some other writer already put under the root.
  void track(const std::string& relative, const std::string& input_key);
  std::string read(const std::string& relative) const;
  bool has(const std::string& relative) const;

 private:
  void save_manifest() const;

  std::filesystem::path root_;
  mutable std::mutex mu_;
  std::string config_hash_;
  struct Entry {
    std::string sha256;
    std::string input_key;
  };
  std::map<std::string, Entry> artifacts_;
};

// VerifierBundle without the suite, as persisted under suites/<id>.bundle.json.
std::string serialize_bundle(const VerifierBundle& bundle);
VerifierBundle parse_bundle(std::string_view text);

// Ranking as persisted under verdicts/<id>.json, candidate sources included.
std::string serialize_ranking(const RankedCandidates& ranking);
RankedCandidates parse_ranking(std::string_view text);

// Each command returns the process exit code. Progress goes to `log`.
int cmd_build_verifier(const RunConfig& config, std::ostream& log);
int cmd_synthesize(const RunConfig& config, std::ostream& log);
int cmd_evaluate(const RunConfig& config, std::ostream& log);

}  // namespace algo
