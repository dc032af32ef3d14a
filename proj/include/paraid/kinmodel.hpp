#pragma once

#include <type_traits>
#include <vector>

#include "paraid/errors.hpp"
#include "paraid/types.hpp"

// Open-chain kinematics and the joint-wise regressor of the linear dynamic
// model tau = K(q, qd, qdd) * Phi, with Phi the stacked per-link vectors
// [Ixx Ixy Ixz Iyy Iyz Izz m mx my mz]. A classical Newton-Euler recursion is
// provided as an independent route to the same torques for testing.

namespace paraid {

/// skew(a) * b == a x b.
template <typename Derived>
Mat3<typename Derived::Scalar> skew(const Eigen::MatrixBase<Derived>& av) {
  using T = typename Derived::Scalar;
  const Vec3<T> a = av;
  Mat3<T> s;
  s << T(0), -a.z(),  a.y(),
       a.z(),  T(0), -a.x(),
      -a.y(), a.x(),   T(0);
  return s;
}

/// 3x6 operator mapping the packed symmetric tensor [Ixx Ixy Ixz Iyy Iyz Izz]
/// to I*a:  hat(a) * vec(I) == I * a.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 6> hatOperator(
    const Eigen::MatrixBase<Derived>& av) {
  using T = typename Derived::Scalar;
  const Vec3<T> a = av;
  Eigen::Matrix<T, 3, 6> h;
  h << a.x(), a.y(), a.z(),  T(0),  T(0),  T(0),
        T(0), a.x(),  T(0), a.y(), a.z(),  T(0),
        T(0),  T(0), a.x(),  T(0), a.y(), a.z();
  return h;
}

namespace detail {

template <typename T>
Mat3<T> dhRotation(const LinkFrame<T>& lf, T q) {
  using std::cos;
  using std::sin;
  const T theta = lf.theta_offset + (lf.kind == JointKind::Revolute ? q : T(0));
  const T ca = cos(lf.alpha), sa = sin(lf.alpha);
  const T ct = cos(theta), st = sin(theta);
  Mat3<T> r;  // Rot_x(alpha) * Rot_z(theta)
  r <<      ct,     -st,   T(0),
       ca * st, ca * ct,    -sa,
       sa * st, sa * ct,     ca;
  return r;
}

template <typename T>
Vec3<T> dhOrigin(const LinkFrame<T>& lf, T q) {
  using std::cos;
  using std::sin;
  const T d = lf.d + (lf.kind == JointKind::Prismatic ? q : T(0));
  return Vec3<T>(lf.a, -d * sin(lf.alpha), d * cos(lf.alpha));
}

}  // namespace detail

/// Outward recursion over one serial chain. `root_accel` is the linear
/// acceleration of the chain root expressed in the root frame; passing
/// -gravity reproduces gravity loading in every r_ddot downstream.
template <typename T>
std::vector<LinkKinematics<T>> chainKinematics(
    const SerialChain<T>& chain, const ChainState<T>& state,
    const std::type_identity_t<Vec3<T>>& root_accel) {
  const int n = chain.size();
  if (state.q.size() != n || state.qd.size() != n || state.qdd.size() != n)
    throw InvalidInput("chainKinematics: state size does not match chain");

  std::vector<LinkKinematics<T>> out(n);
  Mat3<T> R_root = Mat3<T>::Identity();  // root -> parent
  Vec3<T> p_root = Vec3<T>::Zero();
  Vec3<T> w = Vec3<T>::Zero(), wd = Vec3<T>::Zero();
  Vec3<T> a = root_accel;
  const Vec3<T> ez(T(0), T(0), T(1));

  for (int j = 0; j < n; ++j) {
    const LinkFrame<T>& lf = chain.links[j];
    const Mat3<T> R = detail::dhRotation(lf, state.q[j]);   // parent -> link j
    const Vec3<T> p = detail::dhOrigin(lf, state.q[j]);     // O_j in parent frame
    const Mat3<T> Rt = R.transpose();

    const Vec3<T> w_in = Rt * w;
    Vec3<T> a_j = Rt * (a + wd.cross(p) + w.cross(w.cross(p)));
    Vec3<T> w_j = w_in;
    Vec3<T> wd_j = Rt * wd;
    if (lf.kind == JointKind::Revolute) {
      w_j += state.qd[j] * ez;
      wd_j += state.qdd[j] * ez + w_in.cross(state.qd[j] * ez);
    } else {
      a_j += state.qdd[j] * ez + T(2) * w_in.cross(state.qd[j] * ez);
    }

    p_root = p_root + R_root * p;
    R_root = R_root * R;

    out[j].rotation = R_root;
    out[j].origin = p_root;
    out[j].omega = w_j;
    out[j].omega_dot = wd_j;
    out[j].r_ddot = a_j;

    w = w_j;
    wd = wd_j;
    a = a_j;
  }
  return out;
}

/// Joint-space regressor of the open chain: row k gives the generalized force
/// at joint k as a linear function of the stacked link parameters
/// (n_links * 10 columns). Revolute rows project moments on the joint axis,
/// prismatic rows project forces; the sum runs over the links at or above k.
template <typename T>
MatX<T> regressorRowsOpenChain(const SerialChain<T>& chain,
                               const ChainState<T>& state,
                               const std::type_identity_t<Vec3<T>>& root_accel) {
  const auto kin = chainKinematics(chain, state, root_accel);
  const int n = chain.size();
  MatX<T> K = MatX<T>::Zero(n, kParamsPerLink * n);

  // Per-link operators: moment and force about the link's own origin as
  // linear maps of [vecI | m | h].
  std::vector<Eigen::Matrix<T, 3, 6>> eta(n);  // inertia-tensor part of N_i
  std::vector<Mat3<T>> S(n);                   // h part of F_i
  for (int i = 0; i < n; ++i) {
    const Mat3<T> wt = skew(kin[i].omega);
    eta[i] = hatOperator(kin[i].omega_dot) + wt * hatOperator(kin[i].omega);
    S[i] = skew(kin[i].omega_dot) + wt * wt;
  }

  for (int k = 0; k < n; ++k) {
    const Mat3<T> Rk_t = kin[k].rotation.transpose();
    const bool revolute = chain.links[k].kind == JointKind::Revolute;
    for (int i = k; i < n; ++i) {
      const Mat3<T> Rki = Rk_t * kin[i].rotation;  // frame i -> frame k
      // z_k^T applied in frame k is just the third row after rotating from i.
      const Eigen::Matrix<T, 1, 3> zRow = Rki.row(2);
      auto block = K.template block<1, kParamsPerLink>(k, kParamsPerLink * i);
      if (revolute) {
        // O_i relative to O_k, expressed in frame i.
        const Vec3<T> r =
            kin[i].rotation.transpose() * (kin[i].origin - kin[k].origin);
        const Mat3<T> rt = skew(r);
        block.template segment<6>(0) = zRow * eta[i];
        block(0, 6) = zRow * (rt * kin[i].r_ddot);
        block.template segment<3>(7) =
            zRow * (rt * S[i] - skew(kin[i].r_ddot));
      } else {
        block.template segment<6>(0).setZero();
        block(0, 6) = zRow * kin[i].r_ddot;
        block.template segment<3>(7) = zRow * S[i];
      }
    }
  }
  return K;
}

/// Classical inverse dynamics by outward-kinematics / inward-force recursion.
/// Linear in the parameters by construction; used as the oracle against the
/// regressor route. Parameters need not be physically feasible.
template <typename T>
VecX<T> newtonEulerTorques(const SerialChain<T>& chain,
                           const ChainState<T>& state,
                           const std::vector<RigidBodyParams<T>>& params,
                           const std::type_identity_t<Vec3<T>>& root_accel) {
  const int n = chain.size();
  if (static_cast<int>(params.size()) != n)
    throw InvalidInput("newtonEulerTorques: params size does not match chain");
  const auto kin = chainKinematics(chain, state, root_accel);

  VecX<T> tau(n);
  Vec3<T> f_child = Vec3<T>::Zero();
  Vec3<T> n_child = Vec3<T>::Zero();
  for (int j = n - 1; j >= 0; --j) {
    const Mat3<T> I = params[j].inertiaOrigin();
    const Vec3<T> h = params[j].firstMoment();
    const Vec3<T>& w = kin[j].omega;
    const Vec3<T>& wd = kin[j].omega_dot;
    const Vec3<T>& a = kin[j].r_ddot;

    const Vec3<T> F = params[j].m * a + wd.cross(h) + w.cross(w.cross(h));
    const Vec3<T> N = I * wd + w.cross(I * w) + h.cross(a);

    Vec3<T> f = F;
    Vec3<T> nm = N;
    if (j + 1 < n) {
      const Mat3<T> R_next =
          kin[j].rotation.transpose() * kin[j + 1].rotation;
      const Vec3<T> p_next =
          kin[j].rotation.transpose() * (kin[j + 1].origin - kin[j].origin);
      const Vec3<T> f_rot = R_next * f_child;
      f += f_rot;
      nm += R_next * n_child + p_next.cross(f_rot);
    }
    tau[j] = (chain.links[j].kind == JointKind::Revolute) ? nm.z() : f.z();
    f_child = f;
    n_child = nm;
  }
  return tau;
}

}  // namespace paraid
