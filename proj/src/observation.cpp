#include "paraid/observation.hpp"

#include <random>

namespace paraid {

std::vector<FullState> sampleFeasibleStates(const ParallelRobotModel& model,
                                            const SampleOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  const VecXd qmin_i = gatherIndices(model.q_min, model.independent);
  const VecXd qmax_i = gatherIndices(model.q_max, model.independent);
  const VecXd qdmax_i = gatherIndices(model.qd_max, model.independent);
  const VecXd qddmax_i = gatherIndices(model.qdd_max, model.independent);
  const VecXd home_d = gatherIndices(model.home, model.dependent);
  const int ni = model.dof();

  std::vector<FullState> out;
  out.reserve(opts.count);
  int rejects = 0;
  while (static_cast<int>(out.size()) < opts.count) {
    VecXd q_i(ni), qd_i(ni), qdd_i(ni);
    for (int k = 0; k < ni; ++k) {
      q_i[k] = qmin_i[k] + (qmax_i[k] - qmin_i[k]) * u01(rng);
      qd_i[k] = opts.rate_fraction * qdmax_i[k] * (2 * u01(rng) - 1);
      qdd_i[k] = opts.rate_fraction * qddmax_i[k] * (2 * u01(rng) - 1);
    }
    try {
      out.push_back(solveDependent(model, q_i, qd_i, qdd_i, home_d));
    } catch (const NumericalError&) {
      if (++rejects > opts.max_rejects)
        throw NoConvergence("sampleFeasibleStates: too many rejected draws");
    }
  }
  return out;
}

namespace {

ObservationSystem buildObservationImpl(const ParallelRobotModel& model,
                                       const std::vector<FullState>& states,
                                       const ParameterLayout& layout,
                                       const std::vector<VecXd>* torques) {
  ObservationSystem obs;
  obs.dof = model.dof();
  obs.n_samples = static_cast<int>(states.size());
  obs.col_names = layout.names;
  obs.W.resize(obs.dof * obs.n_samples, layout.totalCount());
  obs.Y = VecXd::Zero(obs.dof * obs.n_samples);
  obs.times.resize(states.size(), 0.0);
  for (int s = 0; s < obs.n_samples; ++s) {
    MatXd K = fullRegressorRowBlock(model, states[s], layout);
    for (int j = 0; j < obs.dof; ++j) {
      obs.W.row(obs.rowOf(j, s)) = K.row(j);
      if (torques) obs.Y[obs.rowOf(j, s)] = (*torques)[s][j];
    }
  }
  return obs;
}

}  // namespace

ObservationSystem buildObservation(const ParallelRobotModel& model,
                                   const std::vector<FullState>& states,
                                   const ParameterLayout& layout) {
  return buildObservationImpl(model, states, layout, nullptr);
}

ObservationSystem buildObservation(const ParallelRobotModel& model,
                                   const std::vector<FullState>& states,
                                   const ParameterLayout& layout,
                                   const std::vector<VecXd>& torques) {
  if (torques.size() != states.size())
    throw InvalidInput("buildObservation: torque count mismatch");
  return buildObservationImpl(model, states, layout, &torques);
}

ObservationSystem restrictColumns(const ObservationSystem& obs,
                                  const std::vector<int>& cols) {
  ObservationSystem out;
  out.dof = obs.dof;
  out.n_samples = obs.n_samples;
  out.times = obs.times;
  out.Y = obs.Y;
  out.W.resize(obs.W.rows(), cols.size());
  for (size_t c = 0; c < cols.size(); ++c) {
    out.W.col(c) = obs.W.col(cols[c]);
    out.col_names.push_back(obs.col_names[cols[c]]);
  }
  return out;
}

}  // namespace paraid
