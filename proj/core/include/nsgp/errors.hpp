#pragma once

#include <stdexcept>
#include <string>

namespace nsgp {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Shape or layout disagreement between inputs and a kernel spec.
class DimensionError : public Error {
public:
  using Error::Error;
};

// Problems reading or interpreting data files.
class DataError : public Error {
public:
  using Error::Error;
};

// Covariance factorization failed even after the jitter ladder.
class NotPositiveDefiniteError : public Error {
public:
  NotPositiveDefiniteError(const std::string& what, double attempted_jitter)
      : Error(what), attempted_jitter_(attempted_jitter) {}

  double attempted_jitter() const noexcept { return attempted_jitter_; }

private:
  double attempted_jitter_;
};

}  // namespace nsgp
