#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "paraid/closure.hpp"

namespace paraid {

/// Stacked regressor system W * Phi = Y over sampled poses. Rows are grouped
/// per actuated joint (all samples of joint 1, then joint 2, ...) so a
/// per-joint weighting matrix is block-constant.
struct ObservationSystem {
  MatXd W;
  VecXd Y;
  int dof{0};
  int n_samples{0};
  std::vector<double> times;           // per sample
  std::vector<std::string> col_names;  // layout column names

  int rowOf(int joint, int sample) const { return joint * n_samples + sample; }
};

struct SampleOptions {
  int count = 2000;
  uint64_t seed = 1;
  /// Fraction of the velocity/acceleration limit used when drawing rates.
  double rate_fraction = 1.0;
  int max_rejects = 20000;
};

/// Random closure-consistent states: independent coordinates uniform over
/// their limits, rates uniform in +/- limit, dependent coordinates solved by
/// continuation from the home branch. Samples that fail to close or are near
/// singular are rejected and redrawn.
std::vector<FullState> sampleFeasibleStates(const ParallelRobotModel& model,
                                            const SampleOptions& opts);

/// Stack the full regressor over the given states (no force vector).
ObservationSystem buildObservation(const ParallelRobotModel& model,
                                   const std::vector<FullState>& states,
                                   const ParameterLayout& layout);

/// Same, with per-sample actuator forces to fill Y (joint-major stacking).
ObservationSystem buildObservation(const ParallelRobotModel& model,
                                   const std::vector<FullState>& states,
                                   const ParameterLayout& layout,
                                   const std::vector<VecXd>& torques);

/// Keep only the given columns of W (base-parameter projection).
ObservationSystem restrictColumns(const ObservationSystem& obs,
                                  const std::vector<int>& cols);

}  // namespace paraid
