#pragma once

#include <sys/types.h>

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "algo/signature.hpp"

namespace algo {

using Millis = std::chrono::milliseconds;

struct ResourceLimits {
  Millis wall_time{2000};
  std::size_t memory = std::size_t{512} << 20;
  std::size_t output_cap = std::size_t{8} << 20;
  // Extra time after wall_time before the process group is killed. A run
  // that finishes inside the grace window is still classified TLE.
  Millis grace{500};

  // Throws ConfigError unless every field is positive and grace < wall_time.
  void validate() const;

  // Limits with the given wall time and grace = min(500ms, wall/2).
  static ResourceLimits with_wall_time(Millis wall);
};

enum class RunStatus { OK, TLE, RE, OOM, OutputTruncated };

std::string_view to_string(RunStatus status);

struct ExecutionOutcome {
  RunStatus status = RunStatus::OK;
  std::string stdout_text;
  std::string stderr_text;
  Millis duration{0};
  bool recursion_error = false;
  int exit_code = -1;
  int term_signal = 0;
  pid_t process_group = 0;
};

// How guest programs are started. The command template is split on
// whitespace; `{program}` expands to the file the runtime should execute and
// `{source}` to the file holding the guest source (they differ only for
// FunctionCall programs, where {program} is the generated driver).
struct Runtime {
  std::string language = "Python 3";
  std::string command = "python3 {program}";
  std::string extension = ".py";
  // stderr substrings that identify recursion-limit and allocation failures.
  std::string recursion_marker = "RecursionError";
  std::string memory_marker = "MemoryError";
  // Driver for FunctionCall programs. `{{solution}}` is replaced with the
  // source file name and `{{function}}` with the entry point name. The driver
  // reads a JSON argument array on stdin and prints the compact JSON result.
  std::string function_driver = default_python_driver();
  std::map<std::string, std::string> extra_env;

  static std::string default_python_driver();
};

// A guest program plus, for FunctionCall problems, its entry point.
struct GuestProgram {
  std::string source;
  std::optional<Signature> entry;
};

// Process-wide cap on concurrently running guest processes.
class ProcessSlots {
 public:
  static ProcessSlots& global();
  // 0 selects the logical CPU count.
  void set_capacity(unsigned capacity);
  unsigned capacity() const;

  class Guard {
   public:
    explicit Guard(ProcessSlots& slots);
    ~Guard();
    Guard(const Guard&) = delete;
    Guard& operator=(const Guard&) = delete;

   private:
    ProcessSlots& slots_;
  };

 private:
  ProcessSlots();
  mutable std::mutex mu_;
  std::condition_variable cv_;
  unsigned capacity_;
  unsigned in_use_ = 0;
};

// Runs `program` once in a fresh temporary directory with `input` on stdin.
// Throws RuntimeUnavailable when the runtime command cannot be started.
ExecutionOutcome run_program(const GuestProgram& program, std::string_view input,
                             const ResourceLimits& limits, const Runtime& runtime);

// Runs `program` on every input; outcomes are positionally aligned with
// `inputs`. parallelism must be >= 1.
std::vector<ExecutionOutcome> run_batch(const GuestProgram& program,
                                        std::span<const std::string> inputs,
                                        const ResourceLimits& limits, const Runtime& runtime,
                                        unsigned parallelism);

// Handle bundling a runtime with a batch parallelism setting.
class Executor {
 public:
  explicit Executor(Runtime runtime = {}, unsigned parallelism = 0);

  ExecutionOutcome run(const GuestProgram& program, std::string_view input,
                       const ResourceLimits& limits) const {
    return run_program(program, input, limits, runtime_);
  }
  std::vector<ExecutionOutcome> run_batch(const GuestProgram& program,
                                          std::span<const std::string> inputs,
                                          const ResourceLimits& limits) const {
    return algo::run_batch(program, inputs, limits, runtime_, parallelism_);
  }

  const Runtime& runtime() const { return runtime_; }
  unsigned parallelism() const { return parallelism_; }

 private:
  Runtime runtime_;
  unsigned parallelism_;
};

}  // namespace algo
