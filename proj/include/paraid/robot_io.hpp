#pragma once

#include <string>

#include "paraid/closure.hpp"

namespace paraid {

/// Load a robot description file (JSON). See data/3prs.json for the schema:
/// physical links with nominal parameters, per-chain modified-D-H tables and
/// mounts, cut-joint attachment points, coordinate partition, friction and
/// actuator data, symmetry groups, zeroed parameters, home pose and limits.
ParallelRobotModel loadRobotModel(const std::string& path);

ParallelRobotModel robotModelFromJsonText(const std::string& text);

/// Content hash of a file (FNV-1a over the raw bytes), for report provenance.
std::string fileHashHex(const std::string& path);
std::string bytesHashHex(const std::string& bytes);

}  // namespace paraid
