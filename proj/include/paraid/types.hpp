#pragma once

#include <Eigen/Dense>

namespace paraid {

template <typename T> using Vec3 = Eigen::Matrix<T, 3, 1>;
template <typename T> using Mat3 = Eigen::Matrix<T, 3, 3>;
template <typename T> using VecX = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T> using MatX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

using Vec3d = Vec3<double>;
using Mat3d = Mat3<double>;
using VecXd = VecX<double>;
using MatXd = MatX<double>;

/// Number of rigid-body parameters per link: [Ixx Ixy Ixz Iyy Iyz Izz m mx my mz].
inline constexpr int kParamsPerLink = 10;

enum class JointKind { Revolute, Prismatic };

/// One joint/link of a serial chain in the modified Denavit-Hartenberg
/// convention: T(parent->child) = Rot_x(alpha) * Trans_x(a) * Rot_z(theta) * Trans_z(d).
/// The joint variable adds to theta_offset (revolute) or to d (prismatic).
template <typename T>
struct LinkFrame {
  T a{0};
  T alpha{0};
  T d{0};
  T theta_offset{0};
  JointKind kind{JointKind::Revolute};
};

/// Inertial parameters of one link about its (non-centroidal) frame origin,
/// in the fixed column order [Ixx Ixy Ixz Iyy Iyz Izz m mx my mz].
template <typename T>
struct RigidBodyParams {
  T ixx{0}, ixy{0}, ixz{0}, iyy{0}, iyz{0}, izz{0};
  T m{0};
  T mx{0}, my{0}, mz{0};

  Eigen::Matrix<T, 10, 1> vector() const {
    Eigen::Matrix<T, 10, 1> v;
    v << ixx, ixy, ixz, iyy, iyz, izz, m, mx, my, mz;
    return v;
  }
  static RigidBodyParams fromVector(const Eigen::Matrix<T, 10, 1>& v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]};
  }

  /// Inertia tensor about the frame origin.
  Mat3<T> inertiaOrigin() const {
    Mat3<T> I;
    I << ixx, ixy, ixz,
         ixy, iyy, iyz,
         ixz, iyz, izz;
    return I;
  }
  /// First mass moment m*c, c = center of gravity in the link frame.
  Vec3<T> firstMoment() const { return Vec3<T>(mx, my, mz); }
};

template <typename T>
struct SerialChain {
  std::vector<LinkFrame<T>> links;

  int size() const { return static_cast<int>(links.size()); }
};

/// Generalized coordinates of one chain and their time derivatives.
template <typename T>
struct ChainState {
  VecX<T> q, qd, qdd;
};

/// Per-link kinematic quantities produced by the outward recursion.
/// omega, omega_dot and r_ddot are expressed in the link's own frame;
/// rotation/origin are relative to the chain root frame. Gravity is folded
/// into the root acceleration (root accelerates at -g), so r_ddot already
/// carries the gravity loading.
template <typename T>
struct LinkKinematics {
  Mat3<T> rotation;    // root -> link
  Vec3<T> origin;      // link frame origin in root frame
  Vec3<T> omega;
  Vec3<T> omega_dot;
  Vec3<T> r_ddot;
};

}  // namespace paraid
