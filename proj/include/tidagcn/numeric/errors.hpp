#pragma once

#include <stdexcept>
#include <string>

namespace tidagcn {

// Shapes or inner dimensions that do not line up.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A hyperparameter or configuration value outside its valid range.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent input data (files, sequences, ids).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An index outside the valid range of a table, graph or distribution.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// API called in a way its contract forbids (e.g. backward on a non-scalar).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Training diverged: a loss or gradient became NaN/Inf.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tidagcn
