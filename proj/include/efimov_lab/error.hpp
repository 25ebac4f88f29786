#pragma once

#include <stdexcept>
#include <string>

namespace efimov {

/// A numerical procedure failed: no bracket, no convergence, a pole hit.
/// The CLI maps this to exit code 2.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an evaluation lands on a non-removable pole of the
/// hyperangular eigenvalue expression.
class pole_error : public numerical_error {
 public:
  explicit pole_error(const std::string& what, double nu_squared)
      : numerical_error(what), nu_squared_(nu_squared) {}
  double nu_squared() const noexcept { return nu_squared_; }

 private:
  double nu_squared_;
};

/// A request that is well-formed but physically meaningless, e.g. the
/// spectrum of an unregularized inverse-square potential (unbounded below).
/// The CLI maps this to exit code 3.
class forbidden_request : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace efimov
