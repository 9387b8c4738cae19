#pragma once

#include <stdexcept>
#include <string>

namespace otfs {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct ModulationError : Error {
  using Error::Error;
};

struct InvalidPathError : Error {
  using Error::Error;
};

struct SingularChannelError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

struct TrainingDivergenceError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace otfs
