#include "paraid/robot_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace paraid {

using nlohmann::json;

namespace {

Vec3d vec3(const json& j) {
  if (!j.is_array() || j.size() != 3)
    throw InvalidInput("robot file: expected a 3-vector");
  return Vec3d(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Mat3d rpyMatrix(const Vec3d& rpy) {
  const double cr = std::cos(rpy[0]), sr = std::sin(rpy[0]);
  const double cp = std::cos(rpy[1]), sp = std::sin(rpy[1]);
  const double cy = std::cos(rpy[2]), sy = std::sin(rpy[2]);
  Mat3d Rz, Ry, Rx;
  Rz << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
  Ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
  Rx << 1, 0, 0, 0, cr, -sr, 0, sr, cr;
  return Rz * Ry * Rx;
}

RigidBodyParams<double> rigidBody(const json& j) {
  RigidBodyParams<double> p;
  p.ixx = j.value("ixx", 0.0);
  p.ixy = j.value("ixy", 0.0);
  p.ixz = j.value("ixz", 0.0);
  p.iyy = j.value("iyy", 0.0);
  p.iyz = j.value("iyz", 0.0);
  p.izz = j.value("izz", 0.0);
  p.m = j.value("m", 0.0);
  p.mx = j.value("mx", 0.0);
  p.my = j.value("my", 0.0);
  p.mz = j.value("mz", 0.0);
  return p;
}

ParamRef paramRef(const json& j, int n_links) {
  if (!j.is_array() || j.size() != 2)
    throw InvalidInput("robot file: parameter reference must be [component, link]");
  ParamRef ref;
  std::string comp = j[0].get<std::string>();
  if (!comp.empty() && comp[0] == 'i') comp[0] = 'I';  // accept "ixx" too
  ref.comp = paramComponentIndex(comp);
  ref.link = j[1].get<int>() - 1;  // files use 1-based link numbers
  if (ref.link < 0 || ref.link >= n_links)
    throw InvalidInput("robot file: parameter reference link out of range");
  return ref;
}

}  // namespace

ParallelRobotModel robotModelFromJsonText(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw InvalidInput(std::string("robot file: JSON parse error: ") + e.what());
  }

  ParallelRobotModel m;
  m.name = j.value("name", "robot");
  m.gravity = j.contains("gravity") ? vec3(j["gravity"]) : Vec3d(0, 0, -9.81);

  for (const auto& lj : j.at("links")) {
    PhysicalLink link;
    link.name = lj.value("name", "link");
    link.nominal = rigidBody(lj.at("params"));
    m.links.push_back(link);
  }
  const int n_links = m.linkCount();

  int coord = 0;
  for (const auto& cj : j.at("chains")) {
    Chain chain;
    if (cj.contains("mount")) {
      const auto& mj = cj["mount"];
      if (mj.contains("origin")) chain.mount_origin = vec3(mj["origin"]);
      if (mj.contains("rpy")) chain.mount_rotation = rpyMatrix(vec3(mj["rpy"]));
      if (mj.contains("axes")) {
        const auto& ax = mj["axes"];  // explicit column axes [x, y, z]
        chain.mount_rotation.col(0) = vec3(ax[0]);
        chain.mount_rotation.col(1) = vec3(ax[1]);
        chain.mount_rotation.col(2) = vec3(ax[2]);
      }
    }
    for (const auto& jj : cj.at("joints")) {
      ChainJoint joint;
      const std::string kind = jj.at("kind").get<std::string>();
      joint.frame.kind = kind == "P" ? JointKind::Prismatic : JointKind::Revolute;
      joint.frame.a = jj.value("a", 0.0);
      joint.frame.alpha = jj.value("alpha", 0.0);
      joint.frame.d = jj.value("d", 0.0);
      joint.frame.theta_offset = jj.value("theta", 0.0);
      joint.param_slot = jj.value("link", 0) - 1;  // 0 means massless
      if (joint.param_slot >= n_links)
        throw InvalidInput("robot file: joint link slot out of range");
      if (jj.contains("limits")) {
        const auto& lj = jj["limits"];
        joint.q_min = lj.value("q_min", -1e9);
        joint.q_max = lj.value("q_max", 1e9);
        joint.qd_max = lj.value("qd_max", 1e9);
        joint.qdd_max = lj.value("qdd_max", 1e9);
      }
      chain.coords.push_back(coord++);
      chain.joints.push_back(joint);
    }
    m.chains.push_back(chain);
  }
  const int nc = coord;

  const auto& pj = j.at("platform");
  m.platform_chain = pj.at("chain").get<int>();
  if (m.platform_chain < 0 ||
      m.platform_chain >= static_cast<int>(m.chains.size()))
    throw InvalidInput("robot file: platform chain out of range");
  for (const auto& cut_j : pj.at("cuts")) {
    CutConstraint cut;
    cut.chain = cut_j.at("chain").get<int>();
    cut.tip_point = vec3(cut_j.at("tip_point"));
    cut.platform_point = vec3(cut_j.at("platform_point"));
    if (cut.chain == m.platform_chain)
      throw InvalidInput("robot file: cut on the platform chain");
    m.cuts.push_back(cut);
  }

  const auto& part = j.at("partition");
  m.independent = part.at("independent").get<std::vector<int>>();
  m.dependent = part.at("dependent").get<std::vector<int>>();
  if (static_cast<int>(m.independent.size() + m.dependent.size()) != nc)
    throw InvalidInput("robot file: partition does not cover all coordinates");

  if (j.contains("friction")) {
    const auto& fj = j["friction"];
    m.friction_joints = fj.at("joints").get<std::vector<int>>();
    const bool symmetric = fj.value("symmetric", true);
    for (const auto& nj : fj.at("nominal")) {
      FrictionParams fp;
      fp.symmetric = symmetric;
      fp.fc_pos = nj.value("fc", nj.value("fc_pos", 0.0));
      fp.fc_neg = nj.value("fc_neg", fp.fc_pos);
      fp.fv_pos = nj.value("fv", nj.value("fv_pos", 0.0));
      fp.fv_neg = nj.value("fv_neg", fp.fv_pos);
      m.friction_nominal.push_back(fp);
    }
    if (m.friction_nominal.size() != m.friction_joints.size())
      throw InvalidInput("robot file: friction joints/nominals length mismatch");
  }

  if (j.contains("actuators")) {
    for (const auto& aj : j["actuators"]) {
      RotorParams rp;
      rp.j_rotor = aj.value("j_rotor", 0.0);
      rp.j_drive = aj.value("j_drive", 0.0);
      rp.gear_ratio = aj.value("gear_ratio", 1.0);
      if (!(rp.gear_ratio > 1.0))
        throw InvalidInput("robot file: gear_ratio must exceed 1");
      m.actuator_joints.push_back(aj.at("joint").get<int>());
      m.actuators.push_back(rp);
    }
  }

  if (j.contains("geometry"))
    for (auto it = j["geometry"].begin(); it != j["geometry"].end(); ++it)
      m.geometry[it.key()] = it.value().get<double>();

  if (j.contains("symmetry_groups"))
    for (const auto& gj : j["symmetry_groups"]) {
      std::vector<ParamRef> group;
      for (const auto& rj : gj) group.push_back(paramRef(rj, n_links));
      m.symmetry_groups.push_back(group);
    }
  if (j.contains("zero_params"))
    for (const auto& rj : j["zero_params"])
      m.zero_params.push_back(paramRef(rj, n_links));

  if (j.contains("home")) {
    const auto v = j["home"].get<std::vector<double>>();
    if (static_cast<int>(v.size()) != nc)
      throw InvalidInput("robot file: home pose length mismatch");
    m.home = Eigen::Map<const VecXd>(v.data(), v.size());
  } else {
    m.home = VecXd::Zero(nc);
  }

  m.q_min.resize(nc);
  m.q_max.resize(nc);
  m.qd_max.resize(nc);
  m.qdd_max.resize(nc);
  for (const auto& chain : m.chains)
    for (int k = 0; k < chain.size(); ++k) {
      m.q_min[chain.coords[k]] = chain.joints[k].q_min;
      m.q_max[chain.coords[k]] = chain.joints[k].q_max;
      m.qd_max[chain.coords[k]] = chain.joints[k].qd_max;
      m.qdd_max[chain.coords[k]] = chain.joints[k].qdd_max;
    }

  m.singularity_threshold = j.value("singularity_threshold", 1e8);

  if (j.contains("feasibility") && j["feasibility"].contains("bounds"))
    for (auto it = j["feasibility"]["bounds"].begin();
         it != j["feasibility"]["bounds"].end(); ++it)
      m.feasibility_bounds[it.key()] = {it.value()[0].get<double>(),
                                        it.value()[1].get<double>()};
  return m;
}

ParallelRobotModel loadRobotModel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open robot file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return robotModelFromJsonText(ss.str());
}

std::string bytesHashHex(const std::string& bytes) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fileHashHex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open file for hashing: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return bytesHashHex(ss.str());
}

}  // namespace paraid
