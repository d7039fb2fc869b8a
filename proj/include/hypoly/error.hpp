#pragma once

#include <stdexcept>
#include <string>

namespace hypoly {

/// Error categories. The CLI maps them onto exit codes.
enum class ErrorKind {
  invalid_input,     // malformed data, out-of-range indices, bad n
  size_limit,        // a configured cap was exceeded
  verification,      // a construction-time invariant failed
  inconclusive,      // the finite computation cannot decide the question
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

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace hypoly
