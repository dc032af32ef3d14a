#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "paraid/observation.hpp"

// Numeric determination of the identifiable base parameters: SVD rank of the
// observation matrix over random poses, column-pivoted selection of kept
// columns, and the linear relations Phi_base = Phi_1 + B * Phi_2 regrouping
// the dropped columns onto the kept ones.

namespace paraid {

struct RankResult {
  int rank{0};
  VecXd singular_values;
  double tol{0};
};

/// Rank by singular values above max(rows, cols) * sigma_max * eps * 10.
RankResult numericRank(const MatXd& W);

/// Dictionary of geometry-constant products used to give regrouping
/// coefficients symbolic form ("lr^2", "lx_p3*ly_p3", ...).
struct LabelDictionary {
  std::vector<std::pair<std::string, double>> entries;

  static LabelDictionary fromGeometry(
      const std::map<std::string, double>& geometry);
  /// Best match for |coef| within tol (relative); empty if none.
  std::optional<std::string> match(double coef, double tol) const;
};

struct BaseParameterSet {
  std::vector<int> kept;     // analyzed-layout column indices, ascending
  std::vector<int> dropped;  // complement, ascending
  MatXd B;                   // n_kept x n_dropped, Phi_base = Phi_kept + B Phi_drop
  std::vector<bool> dropped_contributing;  // false for numerically zero columns
  std::vector<std::string> labels;         // one per kept column
  std::vector<bool> symbolic;              // per kept: all coefficients matched
  VecXd singular_values;
  int rank{0};
  double achieved_kappa{0};  // filled by trajectory-based selection

  MatXd projectColumns(const MatXd& K) const;
  VecXd baseValuesFrom(const VecXd& phi_full) const;  // Phi_kept + B Phi_drop
};

struct GroupingOptions {
  std::vector<int> keep_first;  // prefer keeping these columns
  std::vector<int> keep_last;   // keep these only where rank demands
  uint64_t shuffle_seed = 0;    // 0 = natural column order for the neutral phase
  double snap_tol = 1e-8;
};

BaseParameterSet computeBaseGrouping(const MatXd& W,
                                     const GroupingOptions& opts = {},
                                     const LabelDictionary& dict = {},
                                     const std::vector<std::string>& names = {});

/// Up to k structurally distinct kept-column sets, each verified for
/// regrouping exactness; the first uses the given options unchanged.
std::vector<BaseParameterSet> enumerateCandidateSets(
    const MatXd& W, int k, const GroupingOptions& opts = {},
    const LabelDictionary& dict = {}, const std::vector<std::string>& names = {});

/// Evaluate each candidate with the supplied excitation-design objective
/// (achieved condition number) and return the argmin. Candidates are
/// annotated with their achieved kappa.
BaseParameterSet selectBaseSet(
    std::vector<BaseParameterSet> candidates,
    const std::function<double(const BaseParameterSet&)>& achieved_kappa);

/// Rank with the sample-doubling stability check; throws RankUnstable.
RankResult stableRank(const ParallelRobotModel& model,
                      const ParameterLayout& layout, int n_samples,
                      uint64_t seed, MatXd* W_out = nullptr);

}  // namespace paraid
