#pragma once

#include <stdexcept>
#include <string>

namespace panqa {

// Malformed files, bad arguments, shape mismatches. CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Zero variance, rank-deficient covariance and similar. CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace panqa
