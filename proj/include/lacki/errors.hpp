#pragma once

#include <stdexcept>
#include <string>

namespace lacki {

/// Input dimensions disagree with a dataset or configuration.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A parameter is outside its admissible range.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The prediction rule cannot produce a finite value (empty data with open bounds).
class UndefinedPrediction : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical failure: divergence, singular formula, search exhausted.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed external input (CSV/JSON).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lacki
