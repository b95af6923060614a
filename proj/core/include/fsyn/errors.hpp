#pragma once

#include <stdexcept>
#include <string>

namespace fsyn {

/// Bad caller input: non-finite values, out-of-range parameters, mismatched kinds.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not reach its tolerance. Carries the residual estimate.
class NumericalToleranceError : public std::runtime_error {
 public:
  NumericalToleranceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// An interchange file (design/program JSON, state CSV) could not be parsed.
class MalformedInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fsyn
