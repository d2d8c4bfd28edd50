#include "fogcache/simplex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fogcache::solver {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDualTol = 1e-9;
constexpr double kPivTol = 1e-10;
constexpr double kRatioTol = 1e-9;
constexpr int kRefactorEvery = 64;
constexpr int kStallLimit = 600;

enum class VState : unsigned char { Basic, AtLower, AtUpper, FreeZero };

struct Core {
  // columns: [0, n_s) structural, [n_s, n_s+m) slack, [n_s+m, n_s+2m) artificial
  const LpInstance* lp = nullptr;
  int m = 0, n_s = 0, n_all = 0;
  Eigen::VectorXd lower, upper, x;
  std::vector<double> art_sigma;  // +-1 per row
  std::vector<VState> state;
  std::vector<int> basis;         // variable index per row
  Eigen::MatrixXd binv;
  long iterations = 0;
  int pivots_since_refactor = 0;

  int slack(int row) const { return n_s + row; }
  int artificial(int row) const { return n_s + m + row; }
  bool is_artificial(int j) const { return j >= n_s + m; }

  // Column access (structural sparse, slack/artificial single-entry).
  template <typename F>
  void for_col(int j, F&& f) const {
    if (j < n_s) {
      const auto& c = lp->cols[j];
      for (size_t k = 0; k < c.rows.size(); ++k) f(c.rows[k], c.vals[k]);
    } else if (j < n_s + m) {
      f(j - n_s, 1.0);
    } else {
      f(j - n_s - m, art_sigma[j - n_s - m]);
    }
  }

  void refactor() {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i)
      for_col(basis[i], [&](int r, double v) { B(r, i) = v; });
    binv = B.partialPivLu().inverse();
    if (!binv.allFinite())
      throw std::runtime_error("simplex: singular basis during refactor");
    recompute_basics();
    pivots_since_refactor = 0;
  }

  void recompute_basics() {
    Eigen::VectorXd r = lp->rhs;
    for (int j = 0; j < n_all; ++j) {
      if (state[j] == VState::Basic || x[j] == 0.0) continue;
      double xj = x[j];
      for_col(j, [&](int row, double v) { r[row] -= v * xj; });
    }
    Eigen::VectorXd xb = binv * r;
    for (int i = 0; i < m; ++i) x[basis[i]] = xb[i];
  }

  Eigen::VectorXd ftran(int j) const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
    for_col(j, [&](int row, double v) { w += v * binv.col(row); });
    return w;
  }
};

struct PhaseResult {
  enum { kOptimal, kUnbounded, kIterLimit } kind = kOptimal;
};

// Runs the pivot loop until the phase objective is optimal.
PhaseResult run_phase(Core& c, const Eigen::VectorXd& cost, long iter_limit) {
  bool bland = false;
  int no_progress = 0;
  double last_obj = kInf;

  auto phase_obj = [&]() {
    double o = 0.0;
    for (int j = 0; j < c.n_all; ++j)
      if (cost[j] != 0.0) o += cost[j] * c.x[j];
    return o;
  };

  while (true) {
    if (c.iterations >= iter_limit) return {PhaseResult::kIterLimit};
    if (c.pivots_since_refactor >= kRefactorEvery) c.refactor();

    // BTRAN: duals for the current basis.
    Eigen::VectorXd cb(c.m);
    for (int i = 0; i < c.m; ++i) cb[i] = cost[c.basis[i]];
    Eigen::VectorXd y = c.binv.transpose() * cb;

    // Pricing.
    int enter = -1, dir = 0;
    double best_score = kDualTol;
    for (int j = 0; j < c.n_all; ++j) {
      VState st = c.state[j];
      if (st == VState::Basic) continue;
      if (c.is_artificial(j) && c.lower[j] == c.upper[j]) continue;
      if (c.upper[j] - c.lower[j] <= 0 && st != VState::FreeZero) continue;
      double d = cost[j];
      c.for_col(j, [&](int row, double v) { d -= y[row] * v; });
      int cand_dir = 0;
      if (st == VState::AtLower && d < -kDualTol)
        cand_dir = +1;
      else if (st == VState::AtUpper && d > kDualTol)
        cand_dir = -1;
      else if (st == VState::FreeZero && std::fabs(d) > kDualTol)
        cand_dir = d < 0 ? +1 : -1;
      if (cand_dir == 0) continue;
      if (bland) {
        enter = j;
        dir = cand_dir;
        break;
      }
      double score = std::fabs(d);
      if (score > best_score + 1e-12 ||
          (score > best_score - 1e-12 && (enter < 0 || j < enter))) {
        if (score > best_score) best_score = score;
        enter = j;
        dir = cand_dir;
      }
    }
    if (enter < 0) return {PhaseResult::kOptimal};

    Eigen::VectorXd w = c.ftran(enter);

    // Ratio test: how far can the entering variable move.
    double t_best =
        (std::isinf(c.lower[enter]) || std::isinf(c.upper[enter]))
            ? kInf
            : c.upper[enter] - c.lower[enter];
    int leave = -1;      // -1 = bound flip
    bool leave_to_upper = false;
    double leave_pivot = 0.0;
    for (int i = 0; i < c.m; ++i) {
      double g = dir * w[i];
      int bv = c.basis[i];
      double t_i;
      bool to_upper;
      if (g > kPivTol) {
        if (std::isinf(c.lower[bv])) continue;
        t_i = (c.x[bv] - c.lower[bv]) / g;
        to_upper = false;
      } else if (g < -kPivTol) {
        if (std::isinf(c.upper[bv])) continue;
        t_i = (c.upper[bv] - c.x[bv]) / (-g);
        to_upper = true;
      } else {
        continue;
      }
      if (t_i < 0) t_i = 0;  // basic marginally past its bound
      bool take = false;
      if (t_i < t_best - kRatioTol) {
        take = true;
      } else if (t_i < t_best + kRatioTol && leave >= 0) {
        // tie: prefer the larger pivot for stability, then the smaller index
        if (!bland && std::fabs(w[i]) > std::fabs(leave_pivot) + 1e-12)
          take = true;
        else if (std::fabs(std::fabs(w[i]) - std::fabs(leave_pivot)) <= 1e-12 &&
                 bv < c.basis[leave])
          take = true;
        if (bland) take = bv < c.basis[leave];
      } else if (t_i < t_best + kRatioTol && leave < 0 && t_i <= t_best) {
        take = true;
      }
      if (take) {
        t_best = std::min(t_best, t_i);
        leave = i;
        leave_to_upper = to_upper;
        leave_pivot = w[i];
      }
    }

    if (std::isinf(t_best) && leave < 0) return {PhaseResult::kUnbounded};

    ++c.iterations;
    double t = t_best;
    if (t > 0) {
      c.x[enter] += dir * t;
      for (int i = 0; i < c.m; ++i) c.x[c.basis[i]] -= dir * w[i] * t;
    }
    if (leave < 0) {
      // bound flip, no basis change
      c.state[enter] = dir > 0 ? VState::AtUpper : VState::AtLower;
      c.x[enter] = dir > 0 ? c.upper[enter] : c.lower[enter];
    } else {
      int lv = c.basis[leave];
      c.state[lv] = leave_to_upper ? VState::AtUpper : VState::AtLower;
      c.x[lv] = leave_to_upper ? c.upper[lv] : c.lower[lv];
      c.basis[leave] = enter;
      c.state[enter] = VState::Basic;
      double piv = w[leave];
      c.binv.row(leave) /= piv;
      for (int i = 0; i < c.m; ++i) {
        if (i == leave) continue;
        double f = w[i];
        if (f != 0.0) c.binv.row(i) -= f * c.binv.row(leave);
      }
      ++c.pivots_since_refactor;
    }

    double obj = phase_obj();
    if (obj < last_obj - 1e-12 * (1.0 + std::fabs(last_obj))) {
      last_obj = obj;
      no_progress = 0;
    } else if (++no_progress > kStallLimit && !bland) {
      bland = true;  // anti-cycling fallback
      no_progress = 0;
    }
  }
}

}  // namespace

LpInstance make_instance(const milp::MilpProblem& p,
                         const std::vector<int>& vars,
                         const std::vector<int>& cons,
                         const Eigen::VectorXd* fold_lower,
                         const Eigen::VectorXd* fold_upper) {
  std::vector<int> v = vars, k = cons;
  if (v.empty() && vars.empty()) {
    v.resize(p.variables.size());
    for (size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
  }
  if (k.empty() && cons.empty()) {
    k.resize(p.constraints.size());
    for (size_t i = 0; i < k.size(); ++i) k[i] = static_cast<int>(i);
  }
  std::vector<int> local(p.variables.size(), -1);
  for (size_t i = 0; i < v.size(); ++i) local[v[i]] = static_cast<int>(i);

  LpInstance lp;
  lp.num_rows = static_cast<int>(k.size());
  lp.cols.resize(v.size());
  lp.cost = Eigen::VectorXd::Zero(v.size());
  lp.lower.resize(v.size());
  lp.upper.resize(v.size());
  lp.rel.resize(k.size());
  lp.rhs.resize(k.size());
  for (size_t i = 0; i < v.size(); ++i) {
    lp.lower[i] = fold_lower ? (*fold_lower)[v[i]] : p.variables[v[i]].lower;
    lp.upper[i] = fold_upper ? (*fold_upper)[v[i]] : p.variables[v[i]].upper;
  }
  for (const milp::Term& t : p.objective)
    if (local[t.var] >= 0) lp.cost[local[t.var]] += t.coeff;

  for (size_t r = 0; r < k.size(); ++r) {
    const milp::Constraint& cn = p.constraints[k[r]];
    double scale = 0.0;
    for (const milp::Term& t : cn.terms)
      scale = std::max(scale, std::fabs(t.coeff));
    if (scale == 0.0) scale = 1.0;
    double rhs = cn.rhs;
    for (const milp::Term& t : cn.terms) {
      int lj = local[t.var];
      if (lj >= 0) {
        lp.cols[lj].rows.push_back(static_cast<int>(r));
        lp.cols[lj].vals.push_back(t.coeff / scale);
        continue;
      }
      // excluded variable: must be fixed, fold it as a constant
      double lo = fold_lower ? (*fold_lower)[t.var] : p.variables[t.var].lower;
      double up = fold_upper ? (*fold_upper)[t.var] : p.variables[t.var].upper;
      if (lo != up)
        throw std::logic_error(
            "make_instance: row references an excluded non-fixed variable");
      rhs -= t.coeff * lo;
    }
    lp.rel[r] = cn.rel;
    lp.rhs[r] = rhs / scale;
  }
  // merge duplicate entries within a column (duplicate terms in one row)
  for (auto& col : lp.cols) {
    LpInstance::Col merged;
    for (size_t a = 0; a < col.rows.size(); ++a) {
      bool found = false;
      for (size_t b = 0; b < merged.rows.size(); ++b)
        if (merged.rows[b] == col.rows[a]) {
          merged.vals[b] += col.vals[a];
          found = true;
          break;
        }
      if (!found) {
        merged.rows.push_back(col.rows[a]);
        merged.vals.push_back(col.vals[a]);
      }
    }
    col = std::move(merged);
  }
  return lp;
}

LpOutcome solve_bounded_lp(const LpInstance& lp, const SolverOptions& opts,
                           const Eigen::VectorXd* lower_ov,
                           const Eigen::VectorXd* upper_ov) {
  const int m = lp.num_rows;
  const int n_s = static_cast<int>(lp.cols.size());

  Core c;
  c.lp = &lp;
  c.m = m;
  c.n_s = n_s;
  c.n_all = n_s + 2 * m;
  c.lower.resize(c.n_all);
  c.upper.resize(c.n_all);
  c.x = Eigen::VectorXd::Zero(c.n_all);
  c.art_sigma.assign(m, 1.0);
  c.state.assign(c.n_all, VState::AtLower);
  c.basis.resize(m);

  const Eigen::VectorXd& lo = lower_ov ? *lower_ov : lp.lower;
  const Eigen::VectorXd& up = upper_ov ? *upper_ov : lp.upper;
  LpOutcome out;
  for (int j = 0; j < n_s; ++j) {
    c.lower[j] = lo[j];
    c.upper[j] = up[j];
    if (c.lower[j] > c.upper[j]) {
      out.status = Status::Infeasible;
      return out;
    }
  }
  for (int i = 0; i < m; ++i) {
    int s = c.slack(i);
    switch (lp.rel[i]) {
      case milp::Relation::Le:
        c.lower[s] = 0;
        c.upper[s] = kInf;
        break;
      case milp::Relation::Eq:
        c.lower[s] = 0;
        c.upper[s] = 0;
        break;
      case milp::Relation::Ge:
        c.lower[s] = -kInf;
        c.upper[s] = 0;
        break;
    }
    int a = c.artificial(i);
    c.lower[a] = 0;
    c.upper[a] = 0;  // activated below when needed
  }

  // Nonbasic start for structurals: finite lower, else finite upper, else 0.
  for (int j = 0; j < n_s; ++j) {
    if (!std::isinf(c.lower[j])) {
      c.x[j] = c.lower[j];
      c.state[j] = VState::AtLower;
    } else if (!std::isinf(c.upper[j])) {
      c.x[j] = c.upper[j];
      c.state[j] = VState::AtUpper;
    } else {
      c.x[j] = 0;
      c.state[j] = VState::FreeZero;
    }
  }

  // Row residuals decide whether the slack can start basic or an artificial
  // is needed.
  Eigen::VectorXd r = lp.rhs;
  for (int j = 0; j < n_s; ++j) {
    if (c.x[j] == 0.0) continue;
    double xj = c.x[j];
    c.for_col(j, [&](int row, double v) { r[row] -= v * xj; });
  }
  bool any_artificial = false;
  for (int i = 0; i < m; ++i) {
    int s = c.slack(i);
    int a = c.artificial(i);
    if (r[i] >= c.lower[s] && r[i] <= c.upper[s]) {
      c.basis[i] = s;
      c.state[s] = VState::Basic;
      c.x[s] = r[i];
      c.state[a] = VState::AtLower;
    } else {
      double clamped = std::clamp(r[i], c.lower[s], c.upper[s]);
      c.x[s] = clamped;
      c.state[s] = clamped == c.lower[s] ? VState::AtLower : VState::AtUpper;
      double resid = r[i] - clamped;
      c.art_sigma[i] = resid >= 0 ? 1.0 : -1.0;
      c.lower[a] = 0;
      c.upper[a] = kInf;
      c.x[a] = std::fabs(resid);
      c.basis[i] = a;
      c.state[a] = VState::Basic;
      any_artificial = true;
    }
  }
  c.refactor();

  const long iter_limit = opts.lp_iteration_limit > 0
                              ? opts.lp_iteration_limit
                              : std::numeric_limits<long>::max();

  if (any_artificial) {
    Eigen::VectorXd cost1 = Eigen::VectorXd::Zero(c.n_all);
    for (int i = 0; i < m; ++i) cost1[c.artificial(i)] = 1.0;
    PhaseResult pr = run_phase(c, cost1, iter_limit);
    if (pr.kind == PhaseResult::kIterLimit) {
      out.status = Status::IterationLimit;
      out.iterations = c.iterations;
      return out;
    }
    if (pr.kind == PhaseResult::kUnbounded) {
      // cannot happen with a bounded-below phase objective; bail out honestly
      out.status = Status::IterationLimit;
      out.iterations = c.iterations;
      return out;
    }
    double infeas = 0.0;
    for (int i = 0; i < m; ++i) infeas += c.x[c.artificial(i)];
    if (infeas > opts.feas_tol * std::max(1.0, static_cast<double>(m))) {
      out.status = Status::Infeasible;
      out.iterations = c.iterations;
      return out;
    }
    // Pin the artificials at zero for phase 2.
    for (int i = 0; i < m; ++i) {
      int a = c.artificial(i);
      c.lower[a] = c.upper[a] = 0;
      if (c.state[a] != VState::Basic) c.x[a] = 0;
    }
  }

  Eigen::VectorXd cost2 = Eigen::VectorXd::Zero(c.n_all);
  cost2.head(n_s) = lp.cost;
  PhaseResult pr = run_phase(c, cost2, iter_limit);
  out.iterations = c.iterations;
  if (pr.kind == PhaseResult::kIterLimit) {
    out.status = Status::IterationLimit;
    return out;
  }
  if (pr.kind == PhaseResult::kUnbounded) {
    out.status = Status::Unbounded;
    return out;
  }

  // Final cleanup pass for accuracy: fresh factorization, recomputed basics,
  // values snapped to bounds where they all but touch them.
  c.refactor();
  for (int j = 0; j < n_s; ++j) {
    if (!std::isinf(c.lower[j]) && std::fabs(c.x[j] - c.lower[j]) <= 1e-11)
      c.x[j] = c.lower[j];
    else if (!std::isinf(c.upper[j]) && std::fabs(c.x[j] - c.upper[j]) <= 1e-11)
      c.x[j] = c.upper[j];
  }
  out.status = Status::Optimal;
  out.x = c.x.head(n_s);
  out.objective = lp.cost.dot(out.x);
  return out;
}

}  // namespace fogcache::solver
