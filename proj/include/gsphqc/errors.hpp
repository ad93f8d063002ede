#pragma once

#include <stdexcept>
#include <string>

namespace gsphqc {

/// Invalid argument to a library operation (out-of-range value, dimension
/// mismatch, asymmetric adjacency, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid or incomplete configuration (missing field, bad algorithm
/// parameters, malformed dataset file).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A constructive procedure exhausted its options (e.g. no recoverable
/// sampling set found within the retry budget).
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric failure: singular normalisation matrix, operating point outside
/// the stability region, non-convergent eigensolver.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gsphqc
