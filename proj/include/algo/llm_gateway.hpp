#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "algo/errors.hpp"
#include "algo/problem.hpp"

namespace algo {

enum class PromptKind {
  NaiveSolution,
  TaggedSolution,
  Oracle,
  InputValidator,
  InputGenerator,
  BatchGenerator,
  Refinement,
};

std::string_view to_string(PromptKind kind);
PromptKind prompt_kind_from_string(std::string_view text);
// snake_case form used for template and program file names.
std::string_view file_stem(PromptKind kind);

struct GenerationRequest {
  PromptKind kind = PromptKind::NaiveSolution;
  std::string rendered_prompt;
  double temperature = 1.0;
  int attempt = 1;
  // Routing hint for scripted transports. Not part of the request hash.
  std::string problem_id;

  // Throws DomainError unless temperature >= 0, attempt >= 1 and the prompt
  // is non-empty.
  void validate() const;
  // Canonical JSON encoding of (kind, prompt, temperature, attempt).
  std::string canonical_encoding() const;
  std::string hash() const;
};

struct Transcript {
  std::string request_hash;
  std::string response_text;
  std::string timestamp;
  std::string model_tag;
  PromptKind kind = PromptKind::NaiveSolution;
  int attempt = 1;
};

// ---------------------------------------------------------------------------
// Prompt templates

struct PromptTemplate {
  std::string name;
  int version = 1;
  std::string source;  // "transcribed" when reconstructed from figures
  std::vector<std::string> slots;
  std::string body;

  std::string version_tag() const { return name + "@" + std::to_string(version); }
};

// Parses "key: value" header lines, a "---" separator, then the body.
PromptTemplate parse_prompt_template(std::string_view text, const std::string& name);

const std::vector<std::pair<std::string, std::string>>& embedded_prompt_templates();

class PromptCatalog {
 public:
  // The templates compiled into the binary from prompts/*.tmpl.
  static const PromptCatalog& builtin();
  // Loads <dir>/<stem>.tmpl for every prompt kind.
  static PromptCatalog from_directory(const std::filesystem::path& dir);

  const PromptTemplate& get(PromptKind kind) const;
  // Extra substitutions applied to every template (e.g. "language").
  void set_default(std::string slot, std::string value) { defaults_[std::move(slot)] = std::move(value); }
  const std::map<std::string, std::string>& defaults() const { return defaults_; }

 private:
  std::map<PromptKind, PromptTemplate> templates_;
  std::map<std::string, std::string> defaults_;
};

using Slots = std::map<std::string, std::string>;

// Substitutes {{slot}} placeholders from the problem (title, description,
// constraints, examples, io_format, signature), the catalog defaults and
// `extras`. Throws MissingSlot for any placeholder left unresolved.
std::string render_prompt(PromptKind kind, const Problem& problem, const Slots& extras,
                          const PromptCatalog& catalog = PromptCatalog::builtin());

// Content of the first fenced code block, else the trimmed response.
// Throws EmptyResponse when nothing remains.
std::string extract_program(std::string_view response);

// ---------------------------------------------------------------------------
// Transcript store: records.jsonl (append-only) + index.tsv (hash, offset).

class TranscriptStore {
 public:
  explicit TranscriptStore(std::filesystem::path dir);

  static bool exists(const std::filesystem::path& dir);

  std::optional<Transcript> find(const std::string& request_hash) const;
  // Appends unless the hash is already present. Returns false if it was.
  bool append(const Transcript& transcript);
  std::size_t size() const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  void load_index();
  Transcript read_at(std::uint64_t offset) const;

  std::filesystem::path dir_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::uint64_t> index_;
};

// ---------------------------------------------------------------------------
// Transports

class TransportFailure : public Error {
 public:
  TransportFailure(const std::string& what, bool retryable) : Error(what), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  // Returns the assistant message text or throws TransportFailure.
  virtual std::string send(const GenerationRequest& request, const std::string& model) = 0;
};

// OpenAI-compatible chat-completions client. `endpoint` is the full URL of
// the completions route, e.g. https://host/v1/chat/completions.
class HttpChatTransport : public ChatTransport {
 public:
  HttpChatTransport(std::string endpoint, std::string api_key,
                    std::chrono::seconds timeout = std::chrono::seconds(120));
  std::string send(const GenerationRequest& request, const std::string& model) override;

  static std::string request_body(const GenerationRequest& request, const std::string& model);
  static std::string parse_response(std::string_view body);

 private:
  std::string base_;
  std::string path_;
  std::string api_key_;
  std::chrono::seconds timeout_;
};

// Deterministic stand-in model that answers from a script file. Each line is
// a JSON object {problem, kind, attempt, [contains], program|response}; the
// first entry matching the request wins. `program` names a file (relative to
// the script) whose text is returned inside a fenced code block.
class ScriptedTransport : public ChatTransport {
 public:
  explicit ScriptedTransport(const std::filesystem::path& script);
  std::string send(const GenerationRequest& request, const std::string& model) override;

 private:
  struct Entry {
    std::string problem;
    PromptKind kind;
    int attempt;
    std::string contains;
    std::string response;
  };
  std::vector<Entry> entries_;
};

// "script://<path>" selects ScriptedTransport, anything else HTTP.
std::unique_ptr<ChatTransport> make_transport(const std::string& endpoint, const std::string& api_key);

// ---------------------------------------------------------------------------
// Gateway

enum class GatewayMode { Live, Record, Replay };

std::string_view to_string(GatewayMode mode);
GatewayMode gateway_mode_from_string(std::string_view text);

struct GatewayOptions {
  GatewayMode mode = GatewayMode::Replay;
  std::string model_tag = "unknown";
  int retries = 3;
  std::chrono::milliseconds initial_backoff{1000};
  unsigned max_in_flight = 4;
};

class Gateway {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  // `transport` may be null in replay mode; `store` may be null in live mode.
  Gateway(GatewayOptions options, std::unique_ptr<ChatTransport> transport,
          std::shared_ptr<TranscriptStore> store);

  // Live: ask the transport. Record: reuse a stored transcript for the same
  // request hash, else ask and persist. Replay: stored transcript or ReplayMiss.
  std::string complete(const GenerationRequest& request);

  // Number of complete() calls served, whatever the mode.
  int calls() const { return calls_.load(); }
  const GatewayOptions& options() const { return options_; }
  void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }

 private:
  std::string call_transport(const GenerationRequest& request);

  GatewayOptions options_;
  std::unique_ptr<ChatTransport> transport_;
  std::shared_ptr<TranscriptStore> store_;
  Sleeper sleeper_;
  std::atomic<int> calls_{0};
  std::mutex flight_mu_;
  std::condition_variable flight_cv_;
  unsigned in_flight_ = 0;
};

}  // namespace algo
