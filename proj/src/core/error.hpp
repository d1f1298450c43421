#pragma once

#include <stdexcept>
#include <string>

namespace ipslab {

enum class ErrorKind {
  domain,       // argument outside the operation's mathematical domain
  unsupported,  // valid input the operation does not handle (e.g. alphabet != 2)
  parse,        // malformed JSON/config
  capacity,     // state-space or point cap exceeded
  infeasible,   // certificate requested from an infeasible decomposition
  numeric,      // linear algebra breakdown
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace ipslab
