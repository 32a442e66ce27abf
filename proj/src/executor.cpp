#include "algo/executor.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/prctl.h>
#include <sys/resource.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "algo/errors.hpp"

namespace algo {
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

void ResourceLimits::validate() const {
  if (wall_time <= Millis{0}) throw ConfigError("wall_time must be positive");
  if (grace <= Millis{0}) throw ConfigError("grace must be positive");
  if (grace >= wall_time) throw ConfigError("grace must be shorter than wall_time");
  if (memory == 0) throw ConfigError("memory limit must be positive");
  if (output_cap == 0) throw ConfigError("output_cap must be positive");
}

namespace {

// Guest descendants orphaned by an exiting guest are reparented to us rather
// than to init, so reap_group() can wait for them.
void become_subreaper() {
  static std::once_flag once;
  std::call_once(once, [] { ::prctl(PR_SET_CHILD_SUBREAPER, 1); });
}

// Kills whatever is left of the guest's process group and waits for it.
void reap_group(pid_t pgid) {
  ::kill(-pgid, SIGKILL);
  while (::waitpid(-pgid, nullptr, 0) > 0 || errno == EINTR) {
  }
}

}  // namespace

ResourceLimits ResourceLimits::with_wall_time(Millis wall) {
  ResourceLimits limits;
  limits.wall_time = wall;
  limits.grace = std::min(Millis{500}, wall / 2);
  return limits;
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::OK: return "OK";
    case RunStatus::TLE: return "TLE";
    case RunStatus::RE: return "RE";
    case RunStatus::OOM: return "OOM";
    case RunStatus::OutputTruncated: return "OutputTruncated";
  }
  return "?";
}

std::string Runtime::default_python_driver() {
  return R"(import json
import runpy
import sys

_ns = runpy.run_path("{{solution}}")
_args = json.loads(sys.stdin.read())
_name = "{{function}}"
if "Solution" in _ns and hasattr(_ns["Solution"], _name):
    _fn = getattr(_ns["Solution"](), _name)
else:
    _fn = _ns[_name]
sys.stdout.write(json.dumps(_fn(*_args), separators=(",", ":")) + "\n")
)";
}

// ---------------------------------------------------------------------------
// ProcessSlots

ProcessSlots::ProcessSlots() : capacity_(std::max(1u, std::thread::hardware_concurrency())) {}

ProcessSlots& ProcessSlots::global() {
  static ProcessSlots slots;
  return slots;
}

void ProcessSlots::set_capacity(unsigned capacity) {
  std::lock_guard lock(mu_);
  capacity_ = capacity == 0 ? std::max(1u, std::thread::hardware_concurrency()) : capacity;
  cv_.notify_all();
}

unsigned ProcessSlots::capacity() const {
  std::lock_guard lock(mu_);
  return capacity_;
}

ProcessSlots::Guard::Guard(ProcessSlots& slots) : slots_(slots) {
  std::unique_lock lock(slots_.mu_);
  slots_.cv_.wait(lock, [&] { return slots_.in_use_ < slots_.capacity_; });
  ++slots_.in_use_;
}

ProcessSlots::Guard::~Guard() {
  std::lock_guard lock(slots_.mu_);
  --slots_.in_use_;
  slots_.cv_.notify_one();
}

namespace {

void ignore_sigpipe_once() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

class TempDir {
 public:
  TempDir() {
    std::string pattern = (fs::temp_directory_path() / "algo-run-XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) {
      throw ExecutorUnavailable(std::string("mkdtemp failed: ") + std::strerror(errno));
    }
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(Fd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Fd& operator=(Fd&& other) noexcept {
    if (this != &other) {
      reset();
      fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
  }
  int get() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

struct Pipe {
  Fd read;
  Fd write;
};

Pipe make_pipe() {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) {
    throw ExecutorUnavailable(std::string("pipe2 failed: ") + std::strerror(errno));
  }
  return {Fd(fds[0]), Fd(fds[1])};
}

void write_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw ExecutorUnavailable("cannot write " + path.string());
}

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::vector<std::string> split_command(std::string_view command) {
  std::vector<std::string> parts;
  std::istringstream in{std::string(command)};
  std::string tok;
  while (in >> tok) parts.push_back(tok);
  return parts;
}

bool is_executable(const fs::path& p) {
  return ::access(p.c_str(), X_OK) == 0 && !fs::is_directory(p);
}

std::string search_path_env() {
  const char* path = std::getenv("PATH");
  return path ? path : "/usr/local/bin:/usr/bin:/bin";
}

fs::path resolve_executable(const std::string& name) {
  if (name.find('/') != std::string::npos) {
    if (is_executable(name)) return name;
    throw RuntimeUnavailable("runtime command not executable: " + name);
  }
  std::string paths = search_path_env();
  std::size_t start = 0;
  while (start <= paths.size()) {
    std::size_t end = paths.find(':', start);
    if (end == std::string::npos) end = paths.size();
    fs::path candidate = fs::path(paths.substr(start, end - start)) / name;
    if (end > start && is_executable(candidate)) return candidate;
    start = end + 1;
  }
  throw RuntimeUnavailable("runtime command not found: " + name);
}

bool set_nonblocking(int fd) {
  int flags = ::fcntl(fd, F_GETFL);
  return flags >= 0 && ::fcntl(fd, F_SETFL, flags | O_NONBLOCK) == 0;
}

// Reads what is available on `fd` into `sink`, honouring `cap`. Returns false
// on EOF or error.
bool drain(int fd, std::string& sink, std::size_t cap, bool& overflow) {
  char buf[65536];
  for (;;) {
    ssize_t n = ::read(fd, buf, sizeof buf);
    if (n > 0) {
      std::size_t room = cap > sink.size() ? cap - sink.size() : 0;
      sink.append(buf, std::min<std::size_t>(room, static_cast<std::size_t>(n)));
      if (static_cast<std::size_t>(n) > room) overflow = true;
      continue;
    }
    if (n == 0) return false;
    if (errno == EINTR) continue;
    return errno == EAGAIN || errno == EWOULDBLOCK;
  }
}

}  // namespace

ExecutionOutcome run_program(const GuestProgram& program, std::string_view input,
                             const ResourceLimits& limits, const Runtime& runtime) {
  limits.validate();
  ignore_sigpipe_once();

  auto argv_template = split_command(runtime.command);
  if (argv_template.empty()) throw RuntimeUnavailable("runtime command is empty");

  TempDir dir;
  fs::path source_path = dir.path() / ("solution" + runtime.extension);
  fs::path program_path = source_path;
  write_file(source_path, program.source);
  if (program.entry) {
    program_path = dir.path() / ("main" + runtime.extension);
    std::string driver = replace_all(runtime.function_driver, "{{solution}}", source_path.string());
    driver = replace_all(driver, "{{function}}", program.entry->name);
    write_file(program_path, driver);
  }

  std::vector<std::string> args;
  for (const auto& part : argv_template) {
    args.push_back(replace_all(replace_all(part, "{program}", program_path.string()), "{source}",
                               source_path.string()));
  }
  std::string exe = resolve_executable(args[0]).string();

  std::vector<std::string> env = {
      "PATH=" + search_path_env(),
      "HOME=" + dir.path().string(),
      "TMPDIR=" + dir.path().string(),
      "LANG=C.UTF-8",
      "PYTHONHASHSEED=0",
      "PYTHONDONTWRITEBYTECODE=1",
      "PYTHONIOENCODING=utf-8",
  };
  for (const auto& [k, v] : runtime.extra_env) env.push_back(k + "=" + v);

  std::vector<char*> argv_ptrs;
  for (auto& a : args) argv_ptrs.push_back(a.data());
  argv_ptrs.push_back(nullptr);
  std::vector<char*> env_ptrs;
  for (auto& e : env) env_ptrs.push_back(e.data());
  env_ptrs.push_back(nullptr);
  std::string workdir = dir.path().string();

  ProcessSlots::Guard slot(ProcessSlots::global());

  Pipe in = make_pipe();
  Pipe out = make_pipe();
  Pipe err = make_pipe();
  Pipe status = make_pipe();

  rlimit mem{static_cast<rlim_t>(limits.memory), static_cast<rlim_t>(limits.memory)};
  rlimit no_core{0, 0};

  auto started = Clock::now();
  pid_t pid = ::fork();
  if (pid < 0) throw ExecutorUnavailable(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    // Child: async-signal-safe calls only.
    ::setpgid(0, 0);
    ::setrlimit(RLIMIT_AS, &mem);
    ::setrlimit(RLIMIT_CORE, &no_core);
    ::signal(SIGPIPE, SIG_DFL);
    if (::chdir(workdir.c_str()) != 0 || ::dup2(in.read.get(), 0) < 0 ||
        ::dup2(out.write.get(), 1) < 0 || ::dup2(err.write.get(), 2) < 0) {
      int e = errno;
      (void)!::write(status.write.get(), &e, sizeof e);
      ::_exit(127);
    }
    ::execve(exe.c_str(), argv_ptrs.data(), env_ptrs.data());
    int e = errno;
    (void)!::write(status.write.get(), &e, sizeof e);
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  in.read.reset();
  out.write.reset();
  err.write.reset();
  status.write.reset();

  int exec_errno = 0;
  if (::read(status.read.get(), &exec_errno, sizeof exec_errno) == sizeof exec_errno) {
    ::kill(-pid, SIGKILL);
    ::waitpid(pid, nullptr, 0);
    throw RuntimeUnavailable("cannot start " + exe + ": " + std::strerror(exec_errno));
  }

  set_nonblocking(in.write.get());
  set_nonblocking(out.read.get());
  set_nonblocking(err.read.get());

  ExecutionOutcome outcome;
  outcome.process_group = pid;
  const auto soft_deadline = started + limits.wall_time;
  const auto hard_deadline = soft_deadline + limits.grace;
  std::size_t written = 0;
  bool stdout_overflow = false;
  bool stderr_overflow = false;
  bool killed_by_us = false;
  bool timed_out = false;
  bool exited = false;
  int wait_status = 0;
  Clock::time_point finished{};

  if (input.empty()) in.write.reset();

  for (;;) {
    if (!exited) {
      pid_t r = ::waitpid(pid, &wait_status, WNOHANG);
      if (r == pid) {
        exited = true;
        finished = Clock::now();
        // Reap anything the guest left behind in its process group.
        ::kill(-pid, SIGKILL);
      }
    }
    bool pipes_open = out.read.valid() || err.read.valid();
    if (exited && !pipes_open) break;

    auto now = Clock::now();
    if (!exited && now >= hard_deadline) {
      ::kill(-pid, SIGKILL);
      killed_by_us = true;
      timed_out = true;
      ::waitpid(pid, &wait_status, 0);
      exited = true;
      finished = now;
      continue;
    }

    pollfd fds[3];
    int nfds = 0;
    int out_idx = -1, err_idx = -1, in_idx = -1;
    if (out.read.valid()) { out_idx = nfds; fds[nfds++] = {out.read.get(), POLLIN, 0}; }
    if (err.read.valid()) { err_idx = nfds; fds[nfds++] = {err.read.get(), POLLIN, 0}; }
    if (in.write.valid()) { in_idx = nfds; fds[nfds++] = {in.write.get(), POLLOUT, 0}; }

    auto remaining = std::chrono::duration_cast<Millis>(hard_deadline - now).count();
    int timeout = static_cast<int>(std::clamp<long long>(remaining, 1, 20));
    if (exited) timeout = 20;
    int ready = ::poll(fds, static_cast<nfds_t>(nfds), timeout);
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) {
      if (exited) {
        // Leftover holders of the pipes were killed above; stop waiting.
        out.read.reset();
        err.read.reset();
      }
      continue;
    }

    if (out_idx >= 0 && fds[out_idx].revents) {
      if (!drain(out.read.get(), outcome.stdout_text, limits.output_cap, stdout_overflow)) out.read.reset();
      if (stdout_overflow && !exited) {
        ::kill(-pid, SIGKILL);
        killed_by_us = true;
        out.read.reset();
      }
    }
    if (err_idx >= 0 && fds[err_idx].revents) {
      if (!drain(err.read.get(), outcome.stderr_text, limits.output_cap, stderr_overflow)) err.read.reset();
    }
    if (in_idx >= 0 && fds[in_idx].revents) {
      if (fds[in_idx].revents & (POLLERR | POLLHUP)) {
        in.write.reset();
      } else {
        ssize_t n = ::write(in.write.get(), input.data() + written, input.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        if ((n < 0 && errno != EAGAIN && errno != EINTR) || written == input.size()) in.write.reset();
      }
    }
  }

  reap_group(pid);

  outcome.duration = std::chrono::duration_cast<Millis>(finished - started);
  if (timed_out) outcome.duration = std::min(outcome.duration, limits.wall_time + limits.grace);
  if (WIFEXITED(wait_status)) outcome.exit_code = WEXITSTATUS(wait_status);
  if (WIFSIGNALED(wait_status)) outcome.term_signal = WTERMSIG(wait_status);

  bool stderr_mentions_memory =
      !runtime.memory_marker.empty() && outcome.stderr_text.find(runtime.memory_marker) != std::string::npos;
  if (timed_out || outcome.duration > limits.wall_time) {
    outcome.status = RunStatus::TLE;
  } else if (stdout_overflow) {
    outcome.status = RunStatus::OutputTruncated;
  } else if (WIFEXITED(wait_status) && outcome.exit_code == 0) {
    outcome.status = RunStatus::OK;
  } else if (stderr_mentions_memory || (outcome.term_signal == SIGKILL && !killed_by_us)) {
    outcome.status = RunStatus::OOM;
  } else {
    outcome.status = RunStatus::RE;
    outcome.recursion_error = !runtime.recursion_marker.empty() &&
                              outcome.stderr_text.find(runtime.recursion_marker) != std::string::npos;
  }
  return outcome;
}

std::vector<ExecutionOutcome> run_batch(const GuestProgram& program,
                                        std::span<const std::string> inputs,
                                        const ResourceLimits& limits, const Runtime& runtime,
                                        unsigned parallelism) {
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  std::vector<ExecutionOutcome> outcomes(inputs.size());
  if (inputs.empty()) return outcomes;

  std::atomic<std::size_t> next{0};
  std::mutex error_mu;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= inputs.size()) return;
      try {
        outcomes[i] = run_program(program, inputs[i], limits, runtime);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        next = inputs.size();
        return;
      }
    }
  };
  unsigned threads = static_cast<unsigned>(std::min<std::size_t>(parallelism, inputs.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
  return outcomes;
}

Executor::Executor(Runtime runtime, unsigned parallelism)
    : runtime_(std::move(runtime)),
      parallelism_(parallelism == 0 ? std::max(1u, std::thread::hardware_concurrency()) : parallelism) {
  become_subreaper();
}

}  // namespace algo
