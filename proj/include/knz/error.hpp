#pragma once

#include <stdexcept>
#include <string>

namespace knz {

/// Failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  config,        // malformed or inconsistent input
  precondition,  // mathematical precondition violated (critical level, nongeneric points)
  numerical,     // quadrature hit a singularity or failed to converge
  truncation,    // finite module truncation too small for the requested action
  internal
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace knz
