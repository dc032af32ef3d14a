#pragma once

#include <random>
#include <vector>

#include "paraid/kinmodel.hpp"
#include "paraid/types.hpp"

namespace paraid::testutil {

inline std::mt19937_64 rng(uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline Vec3d randomVec3(std::mt19937_64& g, double lim = 1.0) {
  return Vec3d(uniform(g, -lim, lim), uniform(g, -lim, lim), uniform(g, -lim, lim));
}

inline SerialChain<double> randomChain(std::mt19937_64& g, int n_links) {
  SerialChain<double> chain;
  for (int i = 0; i < n_links; ++i) {
    LinkFrame<double> lf;
    lf.a = uniform(g, -0.5, 0.5);
    lf.alpha = uniform(g, -3.0, 3.0);
    lf.d = uniform(g, -0.5, 0.5);
    lf.theta_offset = uniform(g, -3.0, 3.0);
    lf.kind = uniform(g, 0, 1) < 0.5 ? JointKind::Revolute : JointKind::Prismatic;
    chain.links.push_back(lf);
  }
  return chain;
}

inline ChainState<double> randomState(std::mt19937_64& g, int n, double lim = 2.0) {
  ChainState<double> st;
  st.q.resize(n);
  st.qd.resize(n);
  st.qdd.resize(n);
  for (int i = 0; i < n; ++i) {
    st.q[i] = uniform(g, -lim, lim);
    st.qd[i] = uniform(g, -lim, lim);
    st.qdd[i] = uniform(g, -lim, lim);
  }
  return st;
}

inline std::vector<RigidBodyParams<double>> randomParams(std::mt19937_64& g, int n) {
  std::vector<RigidBodyParams<double>> ps(n);
  for (auto& p : ps) {
    p.ixx = uniform(g, -1, 1);
    p.ixy = uniform(g, -1, 1);
    p.ixz = uniform(g, -1, 1);
    p.iyy = uniform(g, -1, 1);
    p.iyz = uniform(g, -1, 1);
    p.izz = uniform(g, -1, 1);
    p.m = uniform(g, -1, 1);
    p.mx = uniform(g, -1, 1);
    p.my = uniform(g, -1, 1);
    p.mz = uniform(g, -1, 1);
  }
  return ps;
}

inline VecXd stackParams(const std::vector<RigidBodyParams<double>>& ps) {
  VecXd phi(kParamsPerLink * ps.size());
  for (size_t i = 0; i < ps.size(); ++i)
    phi.segment<kParamsPerLink>(kParamsPerLink * i) = ps[i].vector();
  return phi;
}

}  // namespace paraid::testutil
