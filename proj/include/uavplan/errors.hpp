#pragma once

#include <stdexcept>
#include <string>

namespace uavplan {

/// Invalid sizes, weights, or config files. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-PSD covariance, singular matrices, zero distances. Maps to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A tour or word that references vertices the instance does not contain.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace uavplan
