#pragma once

#include <stdexcept>
#include <string>

namespace biasq {

/// A parameter or configuration value is outside its documented range.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation received input it cannot evaluate (empty sequence, mismatched dimensions, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A non-finite value reached a numeric routine.
class NumericError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace biasq
