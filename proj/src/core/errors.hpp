#pragma once

#include <stdexcept>
#include <string>

namespace lintm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape or extent mismatch in array math.
struct DimensionError : Error {
  using Error::Error;
};

// A vector that should be a probability distribution is not one.
struct DistributionError : Error {
  using Error::Error;
};

// Bad hyperparameters, infeasible split fractions, incompatible artifacts.
struct ConfigError : Error {
  using Error::Error;
};

// Ingestion and file-format failures.
struct DataError : Error {
  using Error::Error;
};

// NaN/Inf escaped a computation; aborts the current batch or run.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace lintm
