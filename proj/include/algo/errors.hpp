#pragma once

#include <stdexcept>
#include <string>

namespace algo {

// Root of every error raised by the harness. Program outcomes (a candidate
// that times out, a wrong answer) are values, never exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// A loaded document violated a Problem/config invariant. field() names it.
class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& detail)
      : Error("schema error in field '" + field + "': " + detail), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ExecutorUnavailable : public Error {
 public:
  using Error::Error;
};

// The guest runtime command could not be started (binary missing, not
// executable). A configuration problem, not a program outcome.
class RuntimeUnavailable : public ExecutorUnavailable {
 public:
  using ExecutorUnavailable::ExecutorUnavailable;
};

class MissingSlot : public Error {
 public:
  explicit MissingSlot(std::string slot)
      : Error("prompt slot '" + slot + "' was not supplied"), slot_(std::move(slot)) {}
  const std::string& slot() const noexcept { return slot_; }

 private:
  std::string slot_;
};

class ReplayMiss : public Error {
 public:
  explicit ReplayMiss(std::string hash)
      : Error("no stored transcript for request " + hash), hash_(std::move(hash)) {}
  const std::string& request_hash() const noexcept { return hash_; }

 private:
  std::string hash_;
};

class TransportError : public Error {
 public:
  TransportError(const std::string& what, int retries)
      : Error(what + " (after " + std::to_string(retries) + " retries)"), retries_(retries) {}
  int retries() const noexcept { return retries_; }

 private:
  int retries_;
};

class EmptyResponse : public Error {
 public:
  EmptyResponse() : Error("model response is empty") {}
};

class OracleExhausted : public Error {
 public:
  explicit OracleExhausted(int attempts)
      : Error("no oracle sample passed the public tests in " + std::to_string(attempts) +
              " attempts"),
        attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

class ComponentRejected : public Error {
 public:
  ComponentRejected(std::string which, std::string reason)
      : Error(which + " rejected: " + reason), which_(std::move(which)), reason_(std::move(reason)) {}
  const std::string& which() const noexcept { return which_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string which_;
  std::string reason_;
};

class SuiteTooSmall : public Error {
 public:
  SuiteTooSmall(int got, int want)
      : Error("suite has " + std::to_string(got) + " cases, wanted " + std::to_string(want)),
        got_(got),
        want_(want) {}
  int got() const noexcept { return got_; }
  int want() const noexcept { return want_; }

 private:
  int got_;
  int want_;
};

class KeyMismatch : public Error {
 public:
  using Error::Error;
};

class AdapterUnavailable : public Error {
 public:
  using Error::Error;
};

}  // namespace algo
