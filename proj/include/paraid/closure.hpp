#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "paraid/kinmodel.hpp"
#include "paraid/types.hpp"

// Parallel-robot assembly: the closed chain is modeled as a set of open
// chains rooted at the base, with cut spherical joints expressed as
// coincidence constraints between a point on a cut chain's last link and an
// attachment point on the platform. Coordinate partitioning (independent =
// actuated, dependent = the rest) turns the open-chain regressor into the
// closed-chain one:  tau_i = (K_i - X^T K_d) Phi,  X = A_d^{-1} A_i.

namespace paraid {

struct FrictionParams {
  double fc_pos{0}, fc_neg{0};
  double fv_pos{0}, fv_neg{0};
  bool symmetric{true};
};

struct RotorParams {
  double j_rotor{0};
  double j_drive{0};
  double gear_ratio{1};
  /// Effective reflected inertia J_r = J_j + Gamma^2 J_m.
  double effective() const { return j_rotor + gear_ratio * gear_ratio * j_drive; }
};

/// One joint of one chain. `param_slot` indexes the robot's physical link
/// list; -1 marks a massless frame (the virtual links of a spherical joint).
struct ChainJoint {
  LinkFrame<double> frame;
  int param_slot{-1};
  double q_min{-1e9}, q_max{1e9};
  double qd_max{1e9}, qdd_max{1e9};
};

struct Chain {
  Mat3d mount_rotation = Mat3d::Identity();
  Vec3d mount_origin = Vec3d::Zero();
  std::vector<ChainJoint> joints;
  std::vector<int> coords;  // global coordinate index per joint

  int size() const { return static_cast<int>(joints.size()); }
};

/// Spherical-joint coincidence at a cut: a point fixed on the cut chain's
/// last link must match a point fixed on the platform link.
struct CutConstraint {
  int chain{0};
  Vec3d tip_point = Vec3d::Zero();       // in the cut chain's last-link frame
  Vec3d platform_point = Vec3d::Zero();  // in the platform link frame
};

struct PhysicalLink {
  std::string name;
  RigidBodyParams<double> nominal;
};

/// Reference to one rigid-body parameter: (link slot, component 0..9).
struct ParamRef {
  int link{0};
  int comp{0};
  int flatIndex() const { return kParamsPerLink * link + comp; }
  bool operator==(const ParamRef&) const = default;
};

struct ParallelRobotModel {
  std::string name;
  Vec3d gravity = Vec3d(0, 0, -9.81);
  std::vector<PhysicalLink> links;
  std::vector<Chain> chains;
  int platform_chain{0};
  std::vector<CutConstraint> cuts;
  std::vector<int> independent;
  std::vector<int> dependent;
  std::vector<int> friction_joints;  // global coordinate indices
  std::vector<FrictionParams> friction_nominal;
  std::vector<int> actuator_joints;  // global coordinate indices (== independent)
  std::vector<RotorParams> actuators;
  std::map<std::string, double> geometry;
  std::vector<std::vector<ParamRef>> symmetry_groups;
  std::vector<ParamRef> zero_params;
  VecXd home;
  VecXd q_min, q_max, qd_max, qdd_max;  // per global coordinate
  double singularity_threshold = 1e8;
  std::map<std::string, std::pair<double, double>> feasibility_bounds;

  int dof() const { return static_cast<int>(independent.size()); }
  int coordCount() const {
    return static_cast<int>(independent.size() + dependent.size());
  }
  int linkCount() const { return static_cast<int>(links.size()); }
  int rigidParamCount() const { return kParamsPerLink * linkCount(); }

  /// Stacked nominal rigid-body parameters (complete layout).
  VecXd nominalRigidVector() const;
};

/// Closure-consistent generalized coordinates split is implicit: q, qd, qdd
/// are indexed by the global coordinate numbering.
struct FullState {
  VecXd q, qd, qdd;
};

/// Residual of the cut-joint coincidence constraints (3 rows per cut).
VecXd constraintResidual(const ParallelRobotModel& model, const VecXd& q);

/// Partitioned constraint Jacobian at a configuration. `b` is the
/// acceleration-level right-hand side of A_d qdd_d + A_i qdd_i = b, computed
/// analytically from the point-acceleration recursion at qdd = 0 (it depends
/// on velocities; with qd omitted b is zero).
struct Partition {
  MatXd A_d, A_i, X;
  VecXd b;
  double cond_Ad{0};
};
Partition partitionJacobian(const ParallelRobotModel& model, const VecXd& q,
                            const VecXd& qd);
Partition partitionJacobian(const ParallelRobotModel& model, const VecXd& q);

struct SolveOptions {
  double tol = 1e-13;
  int max_iter = 60;
};

/// Newton-Raphson on the dependent coordinates from a seed on the intended
/// assembly branch, then velocity/acceleration closure.
FullState solveDependent(const ParallelRobotModel& model, const VecXd& q_i,
                         const VecXd& qd_i, const VecXd& qdd_i,
                         const VecXd& seed_q_d, const SolveOptions& opts = {});

/// Helpers for scattering between global vectors and partition blocks.
VecXd gatherIndices(const VecXd& full, const std::vector<int>& idx);
void scatterIndices(VecXd& full, const std::vector<int>& idx, const VecXd& vals);

/// Open-chain regressor over all coordinates, columns in the complete
/// per-link layout (coordCount x 10*n_links). Gravity from the model.
MatXd openChainRegressorAllCoords(const ParallelRobotModel& model,
                                  const FullState& state);

/// Open-chain inverse-dynamics torques for all coordinates via the
/// Newton-Euler recursion (test oracle route; rigid body only).
VecXd openChainTorquesAllCoords(const ParallelRobotModel& model,
                                const FullState& state, const VecXd& phi_rigid);

/// Closed-chain rigid-body regressor K_rb = K_i - X^T K_d
/// (dof x 10*n_links, complete layout).
MatXd closedChainRigidRegressor(const ParallelRobotModel& model,
                                const FullState& state);
MatXd closedChainRigidRegressor(const ParallelRobotModel& model,
                                const FullState& state, const Partition& part);

/// Friction regressor columns. Symmetric mode: per friction joint
/// [Fc, Fv] -> sign(qd), qd. Asymmetric mode splits by velocity sign per the
/// +/- Coulomb/viscous model. sign(0) = 0. Dependent-joint columns are
/// projected with -X^T, so identified coefficients come out positive for
/// dissipative friction.
MatXd frictionColumns(const ParallelRobotModel& model, const FullState& state,
                      bool asymmetric = false);
MatXd frictionColumns(const ParallelRobotModel& model, const FullState& state,
                      const Partition& part, bool asymmetric = false);

/// Actuator rotor/gear columns: diagonal in the independent accelerations.
MatXd rotorColumns(const ParallelRobotModel& model, const FullState& state);

/// Column layout of the identification model: merged/zeroed rigid-body
/// columns followed by friction and rotor columns.
struct ParameterLayout {
  int n_links{0};
  bool simplified{false};
  bool asymmetric_friction{false};
  std::vector<std::vector<int>> rigid_groups;  // flat complete indices per column
  std::vector<std::string> names;              // all columns
  int n_friction{0};
  int n_rotor{0};

  int rigidCount() const { return static_cast<int>(rigid_groups.size()); }
  int totalCount() const { return rigidCount() + n_friction + n_rotor; }

  /// Merge the complete-layout rigid regressor into this layout's columns.
  MatXd mergeRigid(const MatXd& K_complete) const;
  /// Expand merged rigid values to the complete layout (value copied to each
  /// group member; zeroed/absent parameters get 0).
  VecXd expandRigid(const VecXd& merged) const;
  /// Collapse a complete rigid vector to merged columns (first member wins).
  VecXd collapseRigid(const VecXd& complete) const;

  static ParameterLayout complete(const ParallelRobotModel& model,
                                  bool asymmetric_friction = false);
  static ParameterLayout simplifiedLayout(const ParallelRobotModel& model,
                                          bool asymmetric_friction = false);
};

/// [K_rb | K_f | K_r] in the given layout.
MatXd fullRegressorRowBlock(const ParallelRobotModel& model,
                            const FullState& state,
                            const ParameterLayout& layout);

/// Nominal parameter vector in the given layout (rigid | friction | rotor).
VecXd nominalParameterVector(const ParallelRobotModel& model,
                             const ParameterLayout& layout);

/// Predicted actuator forces for the given layout and parameter vector.
VecXd predictedTorques(const ParallelRobotModel& model, const FullState& state,
                       const ParameterLayout& layout, const VecXd& phi);

/// Component names in the fixed per-link order.
const char* paramComponentName(int comp);
int paramComponentIndex(const std::string& name);

}  // namespace paraid
