#pragma once

#include <stdexcept>
#include <string>

namespace thetalab {

// Coarse classification used by the CLI to pick an exit status.
enum class ErrorKind {
  kDomain,         // precondition on a mathematical argument violated
  kInput,          // malformed or unknown user input
  kInconsistency,  // an internal cross-check disagreed with itself
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void domain_error(const std::string& what) {
  throw Error(ErrorKind::kDomain, what);
}

[[noreturn]] inline void input_error(const std::string& what) {
  throw Error(ErrorKind::kInput, what);
}

}  // namespace thetalab
