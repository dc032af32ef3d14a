#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "paraid/kinmodel.hpp"
#include "test_util.hpp"

using namespace paraid;
namespace tu = paraid::testutil;

TEST_CASE("skew: zero and unit axis") {
  CHECK(skew(Vec3d::Zero()).isZero(0));
  Mat3d s = skew(Vec3d(1, 0, 0));
  Mat3d expect;
  expect << 0, 0, 0,
            0, 0, -1,
            0, 1, 0;
  CHECK((s - expect).norm() == 0);
}

TEST_CASE("skew matches componentwise cross product") {
  auto g = tu::rng(11);
  for (int it = 0; it < 200; ++it) {
    Vec3d a = tu::randomVec3(g), b = tu::randomVec3(g);
    Vec3d direct(a.y() * b.z() - a.z() * b.y(),
                 a.z() * b.x() - a.x() * b.z(),
                 a.x() * b.y() - a.y() * b.x());
    CHECK((skew(a) * b - direct).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((skew(a).transpose() + skew(a)).norm() == 0);
  }
}

TEST_CASE("hat operator layout") {
  Eigen::Matrix<double, 3, 6> h = hatOperator(Vec3d(1, 2, 3));
  Eigen::Matrix<double, 3, 6> expect;
  expect << 1, 2, 3, 0, 0, 0,
            0, 1, 0, 2, 3, 0,
            0, 0, 1, 0, 2, 3;
  CHECK((h - expect).norm() == 0);
  CHECK(hatOperator(Vec3d::Zero()).isZero(0));
}

TEST_CASE("hat operator reproduces tensor-vector product") {
  auto g = tu::rng(12);
  for (int it = 0; it < 200; ++it) {
    Vec3d a = tu::randomVec3(g, 2.0);
    double ixx = tu::uniform(g, -1, 1), ixy = tu::uniform(g, -1, 1),
           ixz = tu::uniform(g, -1, 1), iyy = tu::uniform(g, -1, 1),
           iyz = tu::uniform(g, -1, 1), izz = tu::uniform(g, -1, 1);
    Eigen::Matrix<double, 6, 1> vecI;
    vecI << ixx, ixy, ixz, iyy, iyz, izz;
    Mat3d I;
    I << ixx, ixy, ixz,
         ixy, iyy, iyz,
         ixz, iyz, izz;
    CHECK((hatOperator(a) * vecI - I * a).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("chain kinematics: static chain is all zero") {
  auto g = tu::rng(13);
  auto chain = tu::randomChain(g, 4);
  ChainState<double> st;
  st.q = VecXd::Zero(4);
  st.qd = VecXd::Zero(4);
  st.qdd = VecXd::Zero(4);
  auto kin = chainKinematics(chain, st, Vec3d::Zero());
  for (const auto& k : kin) {
    CHECK(k.omega.norm() == 0);
    CHECK(k.omega_dot.norm() == 0);
    CHECK(k.r_ddot.norm() == 0);
  }
}

TEST_CASE("chain kinematics: revolute rate appears on the joint axis") {
  SerialChain<double> chain;
  chain.links.push_back({0.2, 0.7, 0.1, 0.3, JointKind::Revolute});
  ChainState<double> st;
  st.q = VecXd::Zero(1);
  st.qd = VecXd::Ones(1);
  st.qdd = VecXd::Zero(1);
  auto kin = chainKinematics(chain, st, Vec3d::Zero());
  CHECK((kin[0].omega - Vec3d(0, 0, 1)).norm() <= 1e-15);
}

TEST_CASE("chain kinematics: dimension mismatch rejected") {
  auto g = tu::rng(14);
  auto chain = tu::randomChain(g, 3);
  ChainState<double> st = tu::randomState(g, 2);
  CHECK_THROWS_AS(chainKinematics(chain, st, Vec3d::Zero()), InvalidInput);
}

namespace {

// World-frame pose of every link at a shifted time, for difference oracles.
struct PoseSample {
  std::vector<Mat3d> R;
  std::vector<Vec3d> p;
};

PoseSample posesAt(const SerialChain<double>& chain, const ChainState<double>& st,
                   double t) {
  ChainState<double> s = st;
  s.q = st.q + t * st.qd + 0.5 * t * t * st.qdd;
  s.qd = st.qd + t * st.qdd;
  auto kin = chainKinematics(chain, s, Vec3d::Zero());
  PoseSample out;
  for (const auto& k : kin) {
    out.R.push_back(k.rotation);
    out.p.push_back(k.origin);
  }
  return out;
}

std::vector<LinkKinematics<double>> kinAt(const SerialChain<double>& chain,
                                          const ChainState<double>& st, double t) {
  ChainState<double> s = st;
  s.q = st.q + t * st.qd + 0.5 * t * t * st.qdd;
  s.qd = st.qd + t * st.qdd;
  return chainKinematics(chain, s, Vec3d::Zero());
}

}  // namespace

TEST_CASE("chain kinematics: finite-difference oracle") {
  auto g = tu::rng(15);
  for (int it = 0; it < 20; ++it) {
    auto chain = tu::randomChain(g, 3);
    auto st = tu::randomState(g, 3);
    auto kin = chainKinematics(chain, st, Vec3d::Zero());

    // Angular velocity against central differences of the rotations.
    {
      const double dt = 1e-6;
      auto plus = posesAt(chain, st, dt), minus = posesAt(chain, st, -dt);
      for (int j = 0; j < 3; ++j) {
        Mat3d Rdot = (plus.R[j] - minus.R[j]) / (2 * dt);
        Mat3d w_world = Rdot * kin[j].rotation.transpose();
        Vec3d w(w_world(2, 1), w_world(0, 2), w_world(1, 0));
        CHECK((w - kin[j].rotation * kin[j].omega).cwiseAbs().maxCoeff() <= 1e-6);
      }
    }

    // Angular acceleration against central differences of omega.
    {
      const double dt = 1e-6;
      auto plus = kinAt(chain, st, dt), minus = kinAt(chain, st, -dt);
      for (int j = 0; j < 3; ++j) {
        Vec3d wd = (plus[j].rotation * plus[j].omega -
                    minus[j].rotation * minus[j].omega) /
                   (2 * dt);
        CHECK((wd - kin[j].rotation * kin[j].omega_dot).cwiseAbs().maxCoeff() <=
              1e-6);
      }
    }

    // Linear acceleration against second differences of the origins.
    {
      const double dt = 1e-4;
      auto plus = posesAt(chain, st, dt), minus = posesAt(chain, st, -dt);
      auto mid = posesAt(chain, st, 0.0);
      for (int j = 0; j < 3; ++j) {
        Vec3d acc = (plus.p[j] - 2 * mid.p[j] + minus.p[j]) / (dt * dt);
        CHECK((acc - kin[j].rotation * kin[j].r_ddot).cwiseAbs().maxCoeff() <=
              1e-5);
      }
    }
  }
}

TEST_CASE("regressor: zero state and gravity gives the zero matrix") {
  auto g = tu::rng(16);
  auto chain = tu::randomChain(g, 4);
  ChainState<double> st;
  st.q = VecXd::Zero(4);
  st.qd = VecXd::Zero(4);
  st.qdd = VecXd::Zero(4);
  CHECK(regressorRowsOpenChain(chain, st, Vec3d::Zero()).isZero(0));
}

TEST_CASE("regressor: single-link pendulum matches the Lagrangian torque") {
  SerialChain<double> chain;
  chain.links.push_back({0, 0, 0, 0, JointKind::Revolute});
  const double grav = 9.81;
  auto g = tu::rng(17);
  for (int it = 0; it < 50; ++it) {
    ChainState<double> st = tu::randomState(g, 1);
    auto params = tu::randomParams(g, 1);
    // Gravity (0, -g, 0): root accelerates at (0, +g, 0).
    MatXd K = regressorRowsOpenChain(chain, st, Vec3d(0, grav, 0));
    double tau = (K * tu::stackParams(params))(0);
    double expect = params[0].izz * st.qdd[0] +
                    grav * (params[0].mx * std::cos(st.q[0]) -
                            params[0].my * std::sin(st.q[0]));
    CHECK(tau == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("newton-euler: zero motion, zero gravity gives zero torques") {
  auto g = tu::rng(18);
  auto chain = tu::randomChain(g, 5);
  ChainState<double> st;
  st.q = VecXd::Zero(5);
  st.qd = VecXd::Zero(5);
  st.qdd = VecXd::Zero(5);
  auto params = tu::randomParams(g, 5);
  CHECK(newtonEulerTorques(chain, st, params, Vec3d::Zero()).isZero(0));
}

TEST_CASE("newton-euler: static gravity loading ignores the inertia tensor") {
  auto g = tu::rng(19);
  auto chain = tu::randomChain(g, 4);
  ChainState<double> st = tu::randomState(g, 4);
  st.qd.setZero();
  st.qdd.setZero();
  auto params = tu::randomParams(g, 4);
  Vec3d root_accel(0, 0, 9.81);
  VecXd tau = newtonEulerTorques(chain, st, params, root_accel);
  for (auto& p : params) {
    p.ixx += 3;
    p.iyy -= 2;
    p.ixz += 1;
    p.izz += 5;
  }
  VecXd tau2 = newtonEulerTorques(chain, st, params, root_accel);
  CHECK((tau - tau2).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("regressor equals newton-euler on random chains up to 5 links") {
  auto g = tu::rng(20);
  for (int it = 0; it < 400; ++it) {
    int n = 1 + static_cast<int>(tu::uniform(g, 0, 4.999));
    auto chain = tu::randomChain(g, n);
    auto st = tu::randomState(g, n);
    auto params = tu::randomParams(g, n);
    Vec3d root_accel = tu::randomVec3(g, 10.0);
    VecXd via_regressor =
        regressorRowsOpenChain(chain, st, root_accel) * tu::stackParams(params);
    VecXd via_ne = newtonEulerTorques(chain, st, params, root_accel);
    for (int k = 0; k < n; ++k)
      CHECK(std::abs(via_regressor[k] - via_ne[k]) <=
            1e-10 * (1.0 + std::abs(via_ne[k])));
  }
}

TEST_CASE("regressor is independent of the parameters (linearity)") {
  auto g = tu::rng(21);
  auto chain = tu::randomChain(g, 4);
  auto st = tu::randomState(g, 4);
  Vec3d root_accel = tu::randomVec3(g, 10.0);
  MatXd K = regressorRowsOpenChain(chain, st, root_accel);
  for (int it = 0; it < 10; ++it) {
    auto params = tu::randomParams(g, 4);
    VecXd ref = newtonEulerTorques(chain, st, params, root_accel);
    CHECK((K * tu::stackParams(params) - ref).cwiseAbs().maxCoeff() <=
          1e-10 * (1.0 + ref.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("rotations stay orthonormal along a trajectory") {
  auto g = tu::rng(22);
  auto chain = tu::randomChain(g, 5);
  auto st = tu::randomState(g, 5);
  for (int s = 0; s <= 50; ++s) {
    auto poses = posesAt(chain, st, 0.02 * s);
    for (const auto& R : poses.R)
      CHECK((R.transpose() * R - Mat3d::Identity()).norm() <= 1e-12);
  }
}

TEST_CASE("gravity superposition depends on configuration only") {
  auto g = tu::rng(23);
  auto chain = tu::randomChain(g, 4);
  Vec3d root_accel(0, 1.7, 9.81);
  for (int it = 0; it < 20; ++it) {
    auto st1 = tu::randomState(g, 4);
    auto st2 = st1;
    st2.qd = tu::randomState(g, 4).qd;
    st2.qdd = tu::randomState(g, 4).qdd;
    MatXd d1 = regressorRowsOpenChain(chain, st1, root_accel) -
               regressorRowsOpenChain(chain, st1, Vec3d::Zero());
    MatXd d2 = regressorRowsOpenChain(chain, st2, root_accel) -
               regressorRowsOpenChain(chain, st2, Vec3d::Zero());
    CHECK((d1 - d2).cwiseAbs().maxCoeff() <= 1e-11);
  }
}
