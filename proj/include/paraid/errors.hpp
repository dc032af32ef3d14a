#pragma once

#include <stdexcept>
#include <string>

namespace paraid {

/// Caller handed in something malformed (sizes, files, config).
struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Base class of numerical failures; the CLI maps these to exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularConfiguration : NumericalError {
  using NumericalError::NumericalError;
};
struct NoConvergence : NumericalError {
  using NumericalError::NumericalError;
};
struct RankUnstable : NumericalError {
  using NumericalError::NumericalError;
};
struct RankDeficient : NumericalError {
  using NumericalError::NumericalError;
};
struct NeverFeasible : NumericalError {
  using NumericalError::NumericalError;
};
struct InfeasibleSample : NumericalError {
  using NumericalError::NumericalError;
};
struct NoFeasiblePoint : NumericalError {
  using NumericalError::NumericalError;
};
struct SingularMass : NumericalError {
  using NumericalError::NumericalError;
};
struct StepFailure : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace paraid
