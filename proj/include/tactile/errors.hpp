#pragma once

#include <stdexcept>
#include <string>

namespace tactile {

// Error taxonomy shared by all modules. Each maps onto one failure class of
// the public contracts: bad configuration, API misuse, corrupt data, physics
// blow-up and non-finite training signals.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tactile
