#ifndef ACCRETA_ERROR_HPP
#define ACCRETA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace accreta {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input or configuration that violates a modelling assumption.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed (non-convergence, ill-posed data, broken invariant).
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace accreta

#endif  // ACCRETA_ERROR_HPP
