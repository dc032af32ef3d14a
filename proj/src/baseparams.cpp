#include "paraid/baseparams.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace paraid {

RankResult numericRank(const MatXd& W) {
  if (W.size() == 0) throw InvalidInput("numericRank: empty matrix");
  RankResult out;
  Eigen::BDCSVD<MatXd> svd(W);
  out.singular_values = svd.singularValues();
  const double smax = out.singular_values.size() ? out.singular_values(0) : 0.0;
  out.tol = std::max(W.rows(), W.cols()) * smax *
            std::numeric_limits<double>::epsilon() * 10.0;
  out.rank = 0;
  for (int i = 0; i < out.singular_values.size(); ++i)
    if (out.singular_values(i) > out.tol) ++out.rank;
  return out;
}

LabelDictionary LabelDictionary::fromGeometry(
    const std::map<std::string, double>& geometry) {
  LabelDictionary d;
  d.entries.push_back({"1", 1.0});
  d.entries.push_back({"2", 2.0});
  d.entries.push_back({"3", 3.0});
  d.entries.push_back({"1/2", 0.5});
  d.entries.push_back({"1/3", 1.0 / 3.0});
  std::vector<std::pair<std::string, double>> consts(geometry.begin(),
                                                     geometry.end());
  for (const auto& [n, c] : consts) {
    if (c == 0) continue;
    d.entries.push_back({n, c});
    d.entries.push_back({n + "^2", c * c});
    d.entries.push_back({"2*" + n, 2 * c});
    d.entries.push_back({"3*" + n, 3 * c});
    d.entries.push_back({"2*" + n + "^2", 2 * c * c});
    d.entries.push_back({"3*" + n + "^2", 3 * c * c});
    d.entries.push_back({"1/" + n, 1.0 / c});
  }
  for (size_t i = 0; i < consts.size(); ++i)
    for (size_t j = 0; j < consts.size(); ++j) {
      if (i == j || consts[i].second == 0 || consts[j].second == 0) continue;
      if (i < j)
        d.entries.push_back({consts[i].first + "*" + consts[j].first,
                             consts[i].second * consts[j].second});
      d.entries.push_back({consts[i].first + "/" + consts[j].first,
                           consts[i].second / consts[j].second});
    }
  return d;
}

std::optional<std::string> LabelDictionary::match(double coef, double tol) const {
  const double a = std::abs(coef);
  const std::string* best = nullptr;
  double best_err = tol;
  for (const auto& [name, value] : entries) {
    const double err = std::abs(a - value) / std::max(1.0, std::abs(value));
    if (err <= best_err) {
      best_err = err;
      best = &name;
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

MatXd BaseParameterSet::projectColumns(const MatXd& K) const {
  MatXd out(K.rows(), kept.size());
  for (size_t i = 0; i < kept.size(); ++i) out.col(i) = K.col(kept[i]);
  return out;
}

VecXd BaseParameterSet::baseValuesFrom(const VecXd& phi_full) const {
  VecXd phi1(kept.size()), phi2(dropped.size());
  for (size_t i = 0; i < kept.size(); ++i) phi1[i] = phi_full[kept[i]];
  for (size_t i = 0; i < dropped.size(); ++i) phi2[i] = phi_full[dropped[i]];
  if (dropped.empty()) return phi1;
  return phi1 + B * phi2;
}

namespace {

std::vector<std::string> defaultNames(int n) {
  std::vector<std::string> names(n);
  for (int i = 0; i < n; ++i) names[i] = "p" + std::to_string(i + 1);
  return names;
}

std::string formatCoef(double c) {
  std::ostringstream os;
  os.precision(6);
  os << c;
  return os.str();
}

}  // namespace

BaseParameterSet computeBaseGrouping(const MatXd& W, const GroupingOptions& opts,
                                     const LabelDictionary& dict,
                                     const std::vector<std::string>& names_in) {
  const int nc = static_cast<int>(W.cols());
  const RankResult rr = numericRank(W);
  const std::vector<std::string> names =
      names_in.empty() ? defaultNames(nc) : names_in;
  if (static_cast<int>(names.size()) != nc)
    throw InvalidInput("computeBaseGrouping: name count mismatch");

  // Phase order: preferred columns, then the neutral ones (optionally
  // shuffled), then the keep-last columns.
  std::vector<char> in_first(nc, 0), in_last(nc, 0);
  for (int c : opts.keep_first) in_first[c] = 1;
  for (int c : opts.keep_last) in_last[c] = 1;
  std::vector<int> neutral;
  for (int c = 0; c < nc; ++c)
    if (!in_first[c] && !in_last[c]) neutral.push_back(c);
  if (opts.shuffle_seed != 0) {
    std::mt19937_64 rng(opts.shuffle_seed);
    std::shuffle(neutral.begin(), neutral.end(), rng);
  }
  std::vector<std::vector<int>> phases = {opts.keep_first, neutral,
                                          opts.keep_last};

  // Greedy pivoting on residual norms against the already-kept columns.
  MatXd Q(W.rows(), rr.rank);
  int n_kept = 0;
  std::vector<char> kept_flag(nc, 0);
  auto residual = [&](int col) {
    VecXd v = W.col(col);
    if (n_kept > 0) v -= Q.leftCols(n_kept) * (Q.leftCols(n_kept).transpose() * v);
    return v;
  };
  for (const auto& phase : phases) {
    while (n_kept < rr.rank) {
      int best = -1;
      double best_norm = rr.tol;
      VecXd best_v;
      for (int col : phase) {
        if (kept_flag[col]) continue;
        VecXd v = residual(col);
        const double nv = v.norm();
        if (nv > best_norm) {
          best_norm = nv;
          best = col;
          best_v = v;
        }
      }
      if (best < 0) break;  // phase exhausted
      kept_flag[best] = 1;
      Q.col(n_kept) = best_v / best_norm;
      ++n_kept;
    }
  }
  if (n_kept != rr.rank)
    throw NumericalError("computeBaseGrouping: pivoting lost rank");

  BaseParameterSet set;
  set.rank = rr.rank;
  set.singular_values = rr.singular_values;
  for (int c = 0; c < nc; ++c)
    (kept_flag[c] ? set.kept : set.dropped).push_back(c);

  // Regression of every dropped column onto the kept ones.
  MatXd W_kept = set.projectColumns(W);
  Eigen::ColPivHouseholderQR<MatXd> qr(W_kept);
  set.B = MatXd::Zero(set.kept.size(), set.dropped.size());
  set.dropped_contributing.assign(set.dropped.size(), true);
  for (size_t dj = 0; dj < set.dropped.size(); ++dj) {
    const VecXd w = W.col(set.dropped[dj]);
    if (w.norm() <= rr.tol) {
      set.dropped_contributing[dj] = false;
      continue;
    }
    VecXd b = qr.solve(w);
    // Snap coefficients to geometry products where that loses nothing.
    VecXd snapped = b;
    const double small = 1e-10 * std::max(1.0, b.cwiseAbs().maxCoeff());
    for (int k = 0; k < snapped.size(); ++k) {
      if (std::abs(snapped[k]) < small) {
        snapped[k] = 0.0;
        continue;
      }
      if (auto m = dict.match(snapped[k], opts.snap_tol)) {
        double v = 0;
        for (const auto& [name, value] : dict.entries)
          if (name == *m) v = value;
        snapped[k] = snapped[k] < 0 ? -v : v;
      }
    }
    const double verify = std::max(1e-10 * w.norm(), 10 * rr.tol);
    if ((W_kept * snapped - w).norm() <= verify)
      b = snapped;
    set.B.col(dj) = b;
  }

  // Symbolic labels "kept +/- coef*dropped ...".
  set.labels.resize(set.kept.size());
  set.symbolic.assign(set.kept.size(), true);
  for (size_t ki = 0; ki < set.kept.size(); ++ki) {
    std::ostringstream os;
    os << names[set.kept[ki]];
    for (size_t dj = 0; dj < set.dropped.size(); ++dj) {
      const double c = set.B(ki, dj);
      if (c == 0.0) continue;
      auto m = dict.match(c, opts.snap_tol);
      std::string coef = m.value_or(formatCoef(std::abs(c)));
      if (!m) set.symbolic[ki] = false;
      os << (c > 0 ? " + " : " - ");
      if (coef != "1") os << coef << "*";
      os << names[set.dropped[dj]];
    }
    set.labels[ki] = os.str();
  }
  return set;
}

std::vector<BaseParameterSet> enumerateCandidateSets(
    const MatXd& W, int k, const GroupingOptions& opts,
    const LabelDictionary& dict, const std::vector<std::string>& names) {
  std::vector<BaseParameterSet> out;
  std::set<std::vector<int>> seen;

  auto verified = [&](const BaseParameterSet& s) {
    // Regrouping exactness on a handful of random parameter vectors.
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1, 1);
    MatXd W_kept(W.rows(), s.kept.size());
    for (size_t i = 0; i < s.kept.size(); ++i) W_kept.col(i) = W.col(s.kept[i]);
    for (int it = 0; it < 20; ++it) {
      VecXd phi(W.cols());
      for (int i = 0; i < phi.size(); ++i) phi[i] = u(rng);
      VecXd direct = W * phi;
      VecXd grouped = W_kept * s.baseValuesFrom(phi);
      if ((direct - grouped).norm() > 1e-10 * (1.0 + direct.norm())) return false;
    }
    return true;
  };

  auto add = [&](const BaseParameterSet& s) {
    if (seen.count(s.kept)) return;
    if (!verified(s)) return;
    seen.insert(s.kept);
    out.push_back(s);
  };

  add(computeBaseGrouping(W, opts, dict, names));
  for (uint64_t seed = 1; static_cast<int>(out.size()) < k && seed <= 40; ++seed) {
    GroupingOptions o = opts;
    o.shuffle_seed = seed;
    if (seed > 20) {  // widen the search: ignore preferences
      o.keep_first.clear();
      o.keep_last.clear();
    }
    add(computeBaseGrouping(W, o, dict, names));
  }
  return out;
}

BaseParameterSet selectBaseSet(
    std::vector<BaseParameterSet> candidates,
    const std::function<double(const BaseParameterSet&)>& achieved_kappa) {
  if (candidates.empty()) throw InvalidInput("selectBaseSet: no candidates");
  size_t best = 0;
  for (size_t i = 0; i < candidates.size(); ++i) {
    candidates[i].achieved_kappa = achieved_kappa(candidates[i]);
    if (candidates[i].achieved_kappa < candidates[best].achieved_kappa) best = i;
  }
  return candidates[best];
}

RankResult stableRank(const ParallelRobotModel& model,
                      const ParameterLayout& layout, int n_samples,
                      uint64_t seed, MatXd* W_out) {
  SampleOptions so;
  so.count = n_samples;
  so.seed = seed;
  auto states = sampleFeasibleStates(model, so);
  ObservationSystem obs = buildObservation(model, states, layout);
  RankResult r1 = numericRank(obs.W);

  so.count = 2 * n_samples;
  so.seed = seed + 7919;
  auto states2 = sampleFeasibleStates(model, so);
  RankResult r2 = numericRank(buildObservation(model, states2, layout).W);
  if (r1.rank != r2.rank)
    throw RankUnstable("rank changed when doubling the sample count: " +
                       std::to_string(r1.rank) + " vs " + std::to_string(r2.rank));
  if (W_out) *W_out = obs.W;
  return r1;
}

}  // namespace paraid
