#pragma once

#include <stdexcept>
#include <string>

namespace hrcorr {

enum class ErrorKind {
  Domain,          // argument outside the mathematical domain
  Constraint,      // beta * xi >= 1/2 and friends
  NonConvergence,  // quadrature / root finding gave up
  Config,          // configuration parse or validation failure
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_domain(const std::string& what) {
  throw Error(ErrorKind::Domain, what);
}
[[noreturn]] inline void throw_constraint(const std::string& what) {
  throw Error(ErrorKind::Constraint, what);
}

}  // namespace hrcorr
