#include "paraid/closure.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace paraid {

namespace {

ChainState<double> chainStateOf(const Chain& chain, const FullState& st) {
  const int n = chain.size();
  ChainState<double> cs;
  cs.q.resize(n);
  cs.qd.resize(n);
  cs.qdd.resize(n);
  for (int j = 0; j < n; ++j) {
    cs.q[j] = st.q[chain.coords[j]];
    cs.qd[j] = st.qd[chain.coords[j]];
    cs.qdd[j] = st.qdd[chain.coords[j]];
  }
  return cs;
}

SerialChain<double> serialOf(const Chain& chain) {
  SerialChain<double> sc;
  sc.links.reserve(chain.size());
  for (const auto& j : chain.joints) sc.links.push_back(j.frame);
  return sc;
}

struct ChainPose {
  std::vector<Mat3d> R;  // world
  std::vector<Vec3d> p;  // world
};

ChainPose worldPose(const Chain& chain, const VecXd& q) {
  ChainState<double> cs;
  const int n = chain.size();
  cs.q.resize(n);
  cs.qd = VecXd::Zero(n);
  cs.qdd = VecXd::Zero(n);
  for (int j = 0; j < n; ++j) cs.q[j] = q[chain.coords[j]];
  auto kin = chainKinematics(serialOf(chain), cs, Vec3d::Zero());
  ChainPose out;
  out.R.reserve(n);
  out.p.reserve(n);
  for (const auto& k : kin) {
    out.R.push_back(chain.mount_rotation * k.rotation);
    out.p.push_back(chain.mount_origin + chain.mount_rotation * k.origin);
  }
  return out;
}

// World acceleration of a point fixed on a link, from a velocity-only
// evaluation (qdd = 0, no gravity): exactly the Adot*qd contribution.
Vec3d pointBiasAccel(const Chain& chain, const FullState& st, int link,
                     const Vec3d& s) {
  ChainState<double> cs = chainStateOf(chain, st);
  cs.qdd.setZero();
  auto kin = chainKinematics(serialOf(chain), cs, Vec3d::Zero());
  const auto& k = kin[link];
  Vec3d a_local =
      k.r_ddot + k.omega_dot.cross(s) + k.omega.cross(k.omega.cross(s));
  return chain.mount_rotation * (k.rotation * a_local);
}

int positionIn(const std::vector<int>& list, int value) {
  auto it = std::find(list.begin(), list.end(), value);
  return it == list.end() ? -1 : static_cast<int>(it - list.begin());
}

}  // namespace

VecXd ParallelRobotModel::nominalRigidVector() const {
  VecXd phi(rigidParamCount());
  for (int i = 0; i < linkCount(); ++i)
    phi.segment<kParamsPerLink>(kParamsPerLink * i) = links[i].nominal.vector();
  return phi;
}

VecXd gatherIndices(const VecXd& full, const std::vector<int>& idx) {
  VecXd out(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) out[i] = full[idx[i]];
  return out;
}

void scatterIndices(VecXd& full, const std::vector<int>& idx, const VecXd& vals) {
  for (size_t i = 0; i < idx.size(); ++i) full[idx[i]] = vals[i];
}

VecXd constraintResidual(const ParallelRobotModel& model, const VecXd& q) {
  if (q.size() != model.coordCount())
    throw InvalidInput("constraintResidual: coordinate count mismatch");
  VecXd r(3 * model.cuts.size());
  if (model.cuts.empty()) return r;

  const Chain& plat = model.chains[model.platform_chain];
  ChainPose plat_pose = worldPose(plat, q);
  const int plast = plat.size() - 1;
  for (size_t c = 0; c < model.cuts.size(); ++c) {
    const CutConstraint& cut = model.cuts[c];
    const Chain& ch = model.chains[cut.chain];
    ChainPose pose = worldPose(ch, q);
    const int last = ch.size() - 1;
    Vec3d tip = pose.p[last] + pose.R[last] * cut.tip_point;
    Vec3d att = plat_pose.p[plast] + plat_pose.R[plast] * cut.platform_point;
    r.segment<3>(3 * c) = tip - att;
  }
  return r;
}

namespace {

MatXd constraintJacobian(const ParallelRobotModel& model, const VecXd& q) {
  MatXd A = MatXd::Zero(3 * model.cuts.size(), model.coordCount());
  if (model.cuts.empty()) return A;

  const Chain& plat = model.chains[model.platform_chain];
  ChainPose plat_pose = worldPose(plat, q);
  const int plast = plat.size() - 1;

  auto addPointJacobian = [&](const Chain& ch, const ChainPose& pose,
                              const Vec3d& point_world, int row, double sign,
                              MatXd& A_out) {
    for (int j = 0; j < ch.size(); ++j) {
      const Vec3d z = pose.R[j].col(2);
      Vec3d col;
      if (ch.joints[j].frame.kind == JointKind::Revolute)
        col = z.cross(point_world - pose.p[j]);
      else
        col = z;
      A_out.block<3, 1>(row, ch.coords[j]) += sign * col;
    }
  };

  for (size_t c = 0; c < model.cuts.size(); ++c) {
    const CutConstraint& cut = model.cuts[c];
    const Chain& ch = model.chains[cut.chain];
    ChainPose pose = worldPose(ch, q);
    const int last = ch.size() - 1;
    Vec3d tip = pose.p[last] + pose.R[last] * cut.tip_point;
    Vec3d att = plat_pose.p[plast] + plat_pose.R[plast] * cut.platform_point;
    addPointJacobian(ch, pose, tip, 3 * static_cast<int>(c), +1.0, A);
    addPointJacobian(plat, plat_pose, att, 3 * static_cast<int>(c), -1.0, A);
  }
  return A;
}

MatXd takeColumns(const MatXd& A, const std::vector<int>& idx) {
  MatXd out(A.rows(), idx.size());
  for (size_t i = 0; i < idx.size(); ++i) out.col(i) = A.col(idx[i]);
  return out;
}

Partition makePartition(const ParallelRobotModel& model, const VecXd& q,
                        const VecXd* qd) {
  Partition part;
  const MatXd A = constraintJacobian(model, q);
  part.A_i = takeColumns(A, model.independent);
  part.A_d = takeColumns(A, model.dependent);

  if (model.dependent.empty()) {
    part.X = MatXd::Zero(0, model.independent.size());
    part.b = VecXd::Zero(0);
    part.cond_Ad = 1.0;
    return part;
  }
  if (part.A_d.rows() != part.A_d.cols())
    throw InvalidInput("partitionJacobian: non-square dependent block "
                       "(redundant constraints are not supported)");

  Eigen::JacobiSVD<MatXd> svd(part.A_d,
                              Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  part.cond_Ad = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(part.cond_Ad < model.singularity_threshold))
    throw SingularConfiguration("partitionJacobian: cond(A_d) = " +
                                std::to_string(part.cond_Ad));
  part.X = svd.solve(part.A_i);

  if (qd != nullptr) {
    // b = -Adot*qd: bias acceleration of the residual at qdd = 0, negated.
    FullState st;
    st.q = q;
    st.qd = *qd;
    st.qdd = VecXd::Zero(q.size());
    const Chain& plat = model.chains[model.platform_chain];
    const int plast = plat.size() - 1;
    part.b.resize(3 * model.cuts.size());
    for (size_t c = 0; c < model.cuts.size(); ++c) {
      const CutConstraint& cut = model.cuts[c];
      const Chain& ch = model.chains[cut.chain];
      Vec3d a_tip = pointBiasAccel(ch, st, ch.size() - 1, cut.tip_point);
      Vec3d a_att = pointBiasAccel(plat, st, plast, cut.platform_point);
      part.b.segment<3>(3 * c) = -(a_tip - a_att);
    }
  } else {
    part.b = VecXd::Zero(3 * model.cuts.size());
  }
  return part;
}

}  // namespace

Partition partitionJacobian(const ParallelRobotModel& model, const VecXd& q,
                            const VecXd& qd) {
  return makePartition(model, q, &qd);
}

Partition partitionJacobian(const ParallelRobotModel& model, const VecXd& q) {
  return makePartition(model, q, nullptr);
}

FullState solveDependent(const ParallelRobotModel& model, const VecXd& q_i,
                         const VecXd& qd_i, const VecXd& qdd_i,
                         const VecXd& seed_q_d, const SolveOptions& opts) {
  const int nc = model.coordCount();
  if (q_i.size() != model.dof() ||
      seed_q_d.size() != static_cast<int>(model.dependent.size()))
    throw InvalidInput("solveDependent: size mismatch");

  VecXd q = VecXd::Zero(nc);
  scatterIndices(q, model.independent, q_i);
  scatterIndices(q, model.dependent, seed_q_d);

  bool converged = false;
  for (int it = 0; it < opts.max_iter; ++it) {
    VecXd r = constraintResidual(model, q);
    if (r.size() == 0 || r.cwiseAbs().maxCoeff() <= opts.tol) {
      converged = true;
      break;
    }
    Partition part = partitionJacobian(model, q);
    VecXd dq = part.A_d.partialPivLu().solve(-r);
    VecXd q_d = gatherIndices(q, model.dependent) + dq;
    scatterIndices(q, model.dependent, q_d);
  }
  if (!converged)
    throw NoConvergence("solveDependent: Newton did not reach tolerance");

  FullState st;
  st.q = q;
  st.qd = VecXd::Zero(nc);
  st.qdd = VecXd::Zero(nc);
  scatterIndices(st.qd, model.independent, qd_i);
  scatterIndices(st.qdd, model.independent, qdd_i);
  if (!model.dependent.empty()) {
    Partition part = partitionJacobian(model, q);
    VecXd qd_d = -part.X * qd_i;
    scatterIndices(st.qd, model.dependent, qd_d);
    Partition partv = partitionJacobian(model, q, st.qd);
    VecXd qdd_d = part.A_d.partialPivLu().solve(partv.b) - part.X * qdd_i;
    scatterIndices(st.qdd, model.dependent, qdd_d);
  }
  return st;
}

MatXd openChainRegressorAllCoords(const ParallelRobotModel& model,
                                  const FullState& state) {
  MatXd K = MatXd::Zero(model.coordCount(), model.rigidParamCount());
  for (const auto& chain : model.chains) {
    const Vec3d root_accel = chain.mount_rotation.transpose() * (-model.gravity);
    MatXd Kc = regressorRowsOpenChain(serialOf(chain), chainStateOf(chain, state),
                                      root_accel);
    for (int j = 0; j < chain.size(); ++j)
      for (int l = 0; l < chain.size(); ++l) {
        const int slot = chain.joints[l].param_slot;
        if (slot < 0) continue;
        K.block<1, kParamsPerLink>(chain.coords[j], kParamsPerLink * slot) +=
            Kc.block<1, kParamsPerLink>(j, kParamsPerLink * l);
      }
  }
  return K;
}

VecXd openChainTorquesAllCoords(const ParallelRobotModel& model,
                                const FullState& state, const VecXd& phi_rigid) {
  if (phi_rigid.size() != model.rigidParamCount())
    throw InvalidInput("openChainTorquesAllCoords: parameter size mismatch");
  VecXd tau = VecXd::Zero(model.coordCount());
  for (const auto& chain : model.chains) {
    const Vec3d root_accel = chain.mount_rotation.transpose() * (-model.gravity);
    std::vector<RigidBodyParams<double>> params(chain.size());
    for (int l = 0; l < chain.size(); ++l) {
      const int slot = chain.joints[l].param_slot;
      if (slot >= 0)
        params[l] = RigidBodyParams<double>::fromVector(
            phi_rigid.segment<kParamsPerLink>(kParamsPerLink * slot));
    }
    VecXd tc = newtonEulerTorques(serialOf(chain), chainStateOf(chain, state),
                                  params, root_accel);
    for (int j = 0; j < chain.size(); ++j) tau[chain.coords[j]] += tc[j];
  }
  return tau;
}

namespace {

MatXd takeRows(const MatXd& M, const std::vector<int>& idx) {
  MatXd out(idx.size(), M.cols());
  for (size_t i = 0; i < idx.size(); ++i) out.row(i) = M.row(idx[i]);
  return out;
}

}  // namespace

MatXd closedChainRigidRegressor(const ParallelRobotModel& model,
                                const FullState& state, const Partition& part) {
  MatXd K = openChainRegressorAllCoords(model, state);
  MatXd K_i = takeRows(K, model.independent);
  if (model.dependent.empty()) return K_i;
  MatXd K_d = takeRows(K, model.dependent);
  return K_i - part.X.transpose() * K_d;
}

MatXd closedChainRigidRegressor(const ParallelRobotModel& model,
                                const FullState& state) {
  Partition part = partitionJacobian(model, state.q);
  return closedChainRigidRegressor(model, state, part);
}

MatXd frictionColumns(const ParallelRobotModel& model, const FullState& state,
                      const Partition& part, bool asymmetric) {
  const int per = asymmetric ? 4 : 2;
  MatXd F = MatXd::Zero(model.dof(), per * model.friction_joints.size());
  for (size_t f = 0; f < model.friction_joints.size(); ++f) {
    const int g = model.friction_joints[f];
    const double v = state.qd[g];
    const double sgn = (v > 0) - (v < 0);
    double vals[4] = {0, 0, 0, 0};
    if (asymmetric) {
      vals[0] = v > 0 ? 1.0 : 0.0;   // Fc+
      vals[1] = v > 0 ? v : 0.0;     // Fv+
      vals[2] = v < 0 ? -1.0 : 0.0;  // Fc-
      vals[3] = v < 0 ? v : 0.0;     // Fv-
    } else {
      vals[0] = sgn;  // Fc
      vals[1] = v;    // Fv
    }
    const int ip = positionIn(model.independent, g);
    const int dp = ip < 0 ? positionIn(model.dependent, g) : -1;
    for (int c = 0; c < per; ++c) {
      const int col = per * static_cast<int>(f) + c;
      if (ip >= 0)
        F(ip, col) += vals[c];
      else if (dp >= 0)
        F.col(col) -= part.X.transpose().col(dp) * vals[c];
      else
        throw InvalidInput("frictionColumns: joint not in either partition");
    }
  }
  return F;
}

MatXd frictionColumns(const ParallelRobotModel& model, const FullState& state,
                      bool asymmetric) {
  Partition part = partitionJacobian(model, state.q);
  return frictionColumns(model, state, part, asymmetric);
}

MatXd rotorColumns(const ParallelRobotModel& model, const FullState& state) {
  MatXd R = MatXd::Zero(model.dof(), model.actuator_joints.size());
  for (size_t a = 0; a < model.actuator_joints.size(); ++a) {
    const int g = model.actuator_joints[a];
    const int ip = positionIn(model.independent, g);
    if (ip < 0)
      throw InvalidInput("rotorColumns: actuator on a dependent joint");
    R(ip, a) = state.qdd[g];
  }
  return R;
}

const char* paramComponentName(int comp) {
  static const char* names[kParamsPerLink] = {"Ixx", "Ixy", "Ixz", "Iyy", "Iyz",
                                              "Izz", "m",   "mx",  "my",  "mz"};
  return names[comp];
}

int paramComponentIndex(const std::string& name) {
  for (int i = 0; i < kParamsPerLink; ++i)
    if (name == paramComponentName(i)) return i;
  throw InvalidInput("unknown parameter component: " + name);
}

namespace {

std::string paramName(int link, int comp) {
  return std::string(paramComponentName(comp)) + std::to_string(link + 1);
}

}  // namespace

MatXd ParameterLayout::mergeRigid(const MatXd& K_complete) const {
  MatXd out(K_complete.rows(), rigid_groups.size());
  for (size_t g = 0; g < rigid_groups.size(); ++g) {
    out.col(g).setZero();
    for (int idx : rigid_groups[g]) out.col(g) += K_complete.col(idx);
  }
  return out;
}

VecXd ParameterLayout::expandRigid(const VecXd& merged) const {
  VecXd full = VecXd::Zero(kParamsPerLink * n_links);
  for (size_t g = 0; g < rigid_groups.size(); ++g)
    for (int idx : rigid_groups[g]) full[idx] = merged[g];
  return full;
}

VecXd ParameterLayout::collapseRigid(const VecXd& complete) const {
  VecXd out(rigid_groups.size());
  for (size_t g = 0; g < rigid_groups.size(); ++g)
    out[g] = complete[rigid_groups[g].front()];
  return out;
}

namespace {

void appendFrictionRotorNames(const ParallelRobotModel& model, bool asymmetric,
                              ParameterLayout& layout) {
  const int per = asymmetric ? 4 : 2;
  layout.n_friction = per * static_cast<int>(model.friction_joints.size());
  for (size_t f = 0; f < model.friction_joints.size(); ++f) {
    const std::string id = std::to_string(f + 1);
    if (asymmetric) {
      layout.names.push_back("Fc" + id + "+");
      layout.names.push_back("Fv" + id + "+");
      layout.names.push_back("Fc" + id + "-");
      layout.names.push_back("Fv" + id + "-");
    } else {
      layout.names.push_back("Fc" + id);
      layout.names.push_back("Fv" + id);
    }
  }
  layout.n_rotor = static_cast<int>(model.actuators.size());
  for (int a = 0; a < layout.n_rotor; ++a)
    layout.names.push_back("Jr" + std::to_string(a + 1));
}

}  // namespace

ParameterLayout ParameterLayout::complete(const ParallelRobotModel& model,
                                          bool asymmetric_friction) {
  ParameterLayout layout;
  layout.n_links = model.linkCount();
  layout.simplified = false;
  layout.asymmetric_friction = asymmetric_friction;
  for (int i = 0; i < model.rigidParamCount(); ++i) {
    layout.rigid_groups.push_back({i});
    layout.names.push_back(paramName(i / kParamsPerLink, i % kParamsPerLink));
  }
  appendFrictionRotorNames(model, asymmetric_friction, layout);
  return layout;
}

ParameterLayout ParameterLayout::simplifiedLayout(const ParallelRobotModel& model,
                                                  bool asymmetric_friction) {
  ParameterLayout layout;
  layout.n_links = model.linkCount();
  layout.simplified = true;
  layout.asymmetric_friction = asymmetric_friction;

  const int np = model.rigidParamCount();
  std::vector<int> group_of(np, -2);  // -2 untouched, -1 zeroed
  for (const auto& z : model.zero_params) group_of[z.flatIndex()] = -1;

  std::vector<std::vector<int>> groups;
  for (const auto& sg : model.symmetry_groups) {
    std::vector<int> g;
    for (const auto& ref : sg) {
      const int idx = ref.flatIndex();
      if (group_of[idx] == -1)
        throw InvalidInput("simplifiedLayout: parameter both zeroed and merged");
      group_of[idx] = static_cast<int>(groups.size());
      g.push_back(idx);
    }
    std::sort(g.begin(), g.end());
    groups.push_back(std::move(g));
  }
  for (int i = 0; i < np; ++i)
    if (group_of[i] == -2) groups.push_back({i});

  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  layout.rigid_groups = groups;
  for (const auto& g : groups)
    layout.names.push_back(
        paramName(g.front() / kParamsPerLink, g.front() % kParamsPerLink));

  appendFrictionRotorNames(model, asymmetric_friction, layout);
  return layout;
}

MatXd fullRegressorRowBlock(const ParallelRobotModel& model,
                            const FullState& state,
                            const ParameterLayout& layout) {
  Partition part = partitionJacobian(model, state.q);
  MatXd K_rb = layout.mergeRigid(closedChainRigidRegressor(model, state, part));
  MatXd K_f = frictionColumns(model, state, part, layout.asymmetric_friction);
  MatXd K_r = rotorColumns(model, state);
  MatXd K(model.dof(), layout.totalCount());
  K << K_rb, K_f, K_r;
  return K;
}

VecXd nominalParameterVector(const ParallelRobotModel& model,
                             const ParameterLayout& layout) {
  VecXd phi(layout.totalCount());
  phi.head(layout.rigidCount()) =
      layout.collapseRigid(model.nominalRigidVector());
  int at = layout.rigidCount();
  for (const auto& fp : model.friction_nominal) {
    if (layout.asymmetric_friction) {
      phi[at++] = fp.fc_pos;
      phi[at++] = fp.fv_pos;
      phi[at++] = fp.fc_neg;
      phi[at++] = fp.fv_neg;
    } else {
      phi[at++] = fp.fc_pos;
      phi[at++] = fp.fv_pos;
    }
  }
  for (const auto& act : model.actuators) phi[at++] = act.effective();
  return phi;
}

VecXd predictedTorques(const ParallelRobotModel& model, const FullState& state,
                       const ParameterLayout& layout, const VecXd& phi) {
  if (phi.size() != layout.totalCount())
    throw InvalidInput("predictedTorques: parameter size mismatch");
  return fullRegressorRowBlock(model, state, layout) * phi;
}

}  // namespace paraid
