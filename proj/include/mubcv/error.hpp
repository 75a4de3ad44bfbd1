#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mubcv {

// Base class for every error raised by the library. The C API maps each
// subclass onto a distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Two quadrature axes are parallel or antiparallel, so their eigenbases are
// not mutually unbiased and the overlap is a delta function.
class DegenerateAxes : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Non-convergent least-squares fit. Carries the last parameter iterate
// (amplitude, mean, sigma, background).
class FitFailure : public Error {
 public:
  FitFailure(const std::string& what, std::vector<double> last_iterate)
      : Error(what), last_iterate_(std::move(last_iterate)) {}

  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

 private:
  std::vector<double> last_iterate_;
};

}  // namespace mubcv
