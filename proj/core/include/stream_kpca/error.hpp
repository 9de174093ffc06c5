#pragma once

#include <stdexcept>
#include <string>

namespace stream_kpca {

// A caller broke an operation's precondition (shape, range, dimension).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configuration value is invalid or two parameters disagree.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A factorization or iteration failed to produce a trustworthy answer.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be read/written or its content is malformed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stream_kpca
