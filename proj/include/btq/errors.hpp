#pragma once

#include <stdexcept>
#include <string>

namespace btq {

enum class ErrorKind {
  Parameter,
  Accuracy,
  DegenerateInput,
  UnsupportedVariant,
  GrowthExceedsPolynomial,
  Evaluation,
  Assembly,
  MemoryGuard,
  Spec,
  StepSize,
  Io,
};

const char* to_string(ErrorKind kind);

// Every module reports failures through this one exception type; the kind
// drives the machine-readable error record written by the CLI.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace btq
