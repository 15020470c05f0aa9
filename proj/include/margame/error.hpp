#pragma once

#include <stdexcept>
#include <string>

namespace margame {

enum class ErrorKind {
  InvalidArgument,  // caller passed something out of contract
  Parse,            // malformed document
  InvalidGraph,     // document parsed but violates a model invariant
  Unreachable,      // no entry -> target path
  Io,
  Convergence,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace margame
