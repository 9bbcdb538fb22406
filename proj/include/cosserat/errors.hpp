#pragma once

#include <stdexcept>
#include <string>

namespace cosserat {

enum class ErrorKind {
  Domain,        // point outside chart / invalid argument
  Composability, // groupoid endpoint mismatch
  Singular,      // non-invertible matrix, near-singular jet
  Evaluation,    // field not evaluable at a stencil point
  FlowEscape,    // flow left the chart domain
  Parse,         // config / expression syntax error
  Semantic,      // config semantic error
  Insufficient,  // operation lacks required generating data
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg) {
  throw Error(k, msg);
}

} // namespace cosserat
