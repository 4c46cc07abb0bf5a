#pragma once

#include <stdexcept>
#include <string>

namespace wsn {

// Error hierarchy mapped to process exit codes by the CLI:
//   ConfigError -> 1, SimulationError -> 2, IoError -> 3.

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DisconnectedTopologyError : SimulationError {
  using SimulationError::SimulationError;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace wsn
