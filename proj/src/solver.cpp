#include "fogcache/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <set>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "fogcache/simplex.hpp"

namespace fogcache::solver {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Rounds integer bounds inward. Returns false when a variable's range
// becomes empty.
bool round_integer_bounds(const milp::MilpProblem& p, Eigen::VectorXd& lower,
                          Eigen::VectorXd& upper, double int_tol) {
  for (size_t j = 0; j < p.variables.size(); ++j) {
    if (p.variables[j].kind != milp::VarKind::Integer) continue;
    if (!std::isinf(lower[j])) lower[j] = std::ceil(lower[j] - int_tol);
    if (!std::isinf(upper[j])) upper[j] = std::floor(upper[j] + int_tol);
    if (lower[j] > upper[j]) return false;
  }
  return true;
}

// Folds single-variable rows into the bound vectors (rows are kept; this
// only tightens). Integer bounds are re-rounded as they tighten, which fixes
// covering integers like the OLT counts at their exact values.
bool tighten_singleton_rows(const milp::MilpProblem& p,
                            Eigen::VectorXd& lower, Eigen::VectorXd& upper,
                            double int_tol) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& cn : p.constraints) {
      if (cn.terms.size() != 1) continue;
      int j = cn.terms[0].var;
      double a = cn.terms[0].coeff;
      if (a == 0.0) {
        bool ok = cn.rel == milp::Relation::Le   ? 0.0 <= cn.rhs
                  : cn.rel == milp::Relation::Ge ? 0.0 >= cn.rhs
                                                 : cn.rhs == 0.0;
        if (!ok) return false;
        continue;
      }
      double v = cn.rhs / a;
      bool upper_bound = (cn.rel == milp::Relation::Le) == (a > 0);
      if (cn.rel == milp::Relation::Eq) {
        lower[j] = std::max(lower[j], v);
        upper[j] = std::min(upper[j], v);
      } else if (upper_bound) {
        upper[j] = std::min(upper[j], v);
      } else {
        lower[j] = std::max(lower[j], v);
      }
      if (p.variables[j].kind == milp::VarKind::Integer) {
        if (!std::isinf(lower[j])) lower[j] = std::ceil(lower[j] - int_tol);
        if (!std::isinf(upper[j])) upper[j] = std::floor(upper[j] + int_tol);
      }
      if (lower[j] > upper[j] + 1e-12) return false;
    }
  }
  return true;
}

// Activity-based interval propagation: walks every row a few times and
// tightens variable bounds from the other terms' activity ranges. Integer
// bounds are rounded as they move. Returns false when a range empties.
bool propagate_bounds(const milp::MilpProblem& p, Eigen::VectorXd& lower,
                      Eigen::VectorXd& upper, double int_tol, int passes) {
  auto round_int = [&](int j) {
    if (p.variables[j].kind != milp::VarKind::Integer) return;
    if (!std::isinf(lower[j])) lower[j] = std::ceil(lower[j] - int_tol);
    if (!std::isinf(upper[j])) upper[j] = std::floor(upper[j] + int_tol);
  };
  for (int pass = 0; pass < passes; ++pass) {
    for (const auto& cn : p.constraints) {
      // activity range excluding each term, via totals with infinity counts
      double min_act = 0, max_act = 0;
      int min_inf = 0, max_inf = 0;
      for (const auto& t : cn.terms) {
        double lo_c = t.coeff > 0 ? t.coeff * lower[t.var] : t.coeff * upper[t.var];
        double hi_c = t.coeff > 0 ? t.coeff * upper[t.var] : t.coeff * lower[t.var];
        if (std::isinf(lo_c)) ++min_inf; else min_act += lo_c;
        if (std::isinf(hi_c)) ++max_inf; else max_act += hi_c;
      }
      for (const auto& t : cn.terms) {
        if (t.coeff == 0.0) continue;
        double lo_c = t.coeff > 0 ? t.coeff * lower[t.var] : t.coeff * upper[t.var];
        double hi_c = t.coeff > 0 ? t.coeff * upper[t.var] : t.coeff * lower[t.var];
        // min/max activity of the other terms
        double rest_min, rest_max;
        if (std::isinf(lo_c))
          rest_min = min_inf > 1 ? -kInf : min_act;
        else
          rest_min = min_inf > 0 ? -kInf : min_act - lo_c;
        if (std::isinf(hi_c))
          rest_max = max_inf > 1 ? kInf : max_act;
        else
          rest_max = max_inf > 0 ? kInf : max_act - hi_c;

        // a_k * x_k <= b - rest_min   (rows with an upper side)
        if (cn.rel != milp::Relation::Ge && !std::isinf(rest_min)) {
          double room = cn.rhs - rest_min;
          if (t.coeff > 0)
            upper[t.var] = std::min(upper[t.var], room / t.coeff);
          else
            lower[t.var] = std::max(lower[t.var], room / t.coeff);
        }
        // a_k * x_k >= b - rest_max   (rows with a lower side)
        if (cn.rel != milp::Relation::Le && !std::isinf(rest_max)) {
          double room = cn.rhs - rest_max;
          if (t.coeff > 0)
            lower[t.var] = std::max(lower[t.var], room / t.coeff);
          else
            upper[t.var] = std::min(upper[t.var], room / t.coeff);
        }
        round_int(t.var);
        if (lower[t.var] > upper[t.var] + 1e-9) return false;
        if (lower[t.var] > upper[t.var]) lower[t.var] = upper[t.var];
      }
    }
  }
  return true;
}

// Dominated parallel-pair elimination. Candidate pairs are (x, y) from
// two-term covering rows a*y >= g*x with y integer and y appearing in no
// other row. Two pairs are interchangeable when their x columns carry
// identical coefficients in every shared row, the same objective cost and
// the same (a, g); any feasible solution can then shift all of x2 onto x1
// and fold y2 into y1 without touching row activities, changing the cost by
// (c_y1 - c_y2) * y2. Keeping the cheapest y per group therefore preserves
// an optimum, and the rest are pinned to zero. This removes the
// near-equal-cost route shuffling that otherwise floods the search.
void eliminate_dominated_pairs(const milp::MilpProblem& p,
                               Eigen::VectorXd& lower,
                               Eigen::VectorXd& upper) {
  const size_t nv = p.variables.size();
  std::vector<std::vector<std::pair<int, double>>> memb(nv);
  for (size_t k = 0; k < p.constraints.size(); ++k)
    for (const auto& t : p.constraints[k].terms)
      memb[t.var].push_back({static_cast<int>(k), t.coeff});
  std::vector<double> obj(nv, 0.0);
  for (const auto& t : p.objective) obj[t.var] += t.coeff;

  struct Cand {
    int x, y, row;
    double ycost;
  };
  using Sig = std::tuple<std::vector<std::pair<int, double>>, double, double,
                         double>;
  std::map<Sig, std::vector<Cand>> groups;

  for (size_t k = 0; k < p.constraints.size(); ++k) {
    const auto& R = p.constraints[k];
    if (R.rel == milp::Relation::Eq || R.terms.size() != 2 || R.rhs != 0.0)
      continue;
    double sgn = R.rel == milp::Relation::Ge ? 1.0 : -1.0;
    for (int pick = 0; pick < 2; ++pick) {
      const auto& ty = R.terms[pick];
      const auto& tx = R.terms[1 - pick];
      double a = sgn * ty.coeff, g = -sgn * tx.coeff;
      if (a <= 0 || g <= 0) continue;
      if (p.variables[ty.var].kind != milp::VarKind::Integer) continue;
      if (memb[ty.var].size() != 1) continue;
      if (lower[ty.var] != 0.0 || lower[tx.var] != 0.0) continue;
      std::vector<std::pair<int, double>> sig;
      for (const auto& m : memb[tx.var])
        if (m.first != static_cast<int>(k)) sig.push_back(m);
      groups[{std::move(sig), obj[tx.var], a, g}].push_back(
          {tx.var, ty.var, static_cast<int>(k), obj[ty.var]});
      break;
    }
  }
  for (auto& [sig, cands] : groups) {
    if (cands.size() < 2) continue;
    int keep = 0;
    for (size_t i = 1; i < cands.size(); ++i)
      if (cands[i].ycost < cands[keep].ycost -
                               1e-12 * std::max(1.0, std::fabs(cands[keep].ycost)))
        keep = static_cast<int>(i);
    // keeper must be able to absorb the whole group
    if (!std::isinf(upper[cands[keep].x]) || !std::isinf(upper[cands[keep].y]))
      continue;
    for (size_t i = 0; i < cands.size(); ++i) {
      if (static_cast<int>(i) == keep) continue;
      upper[cands[i].x] = 0.0;
      upper[cands[i].y] = 0.0;
    }
  }
}

// Integer-hull lifting for covering rows. A row that can be written as
// a*y >= z with y integer and z bounded above by U satisfies
//   y >= (K-1) + (z - (K-1)a)/r,   K = ceil(U/a), r = U - (K-1)a,
// the lower envelope through the integer points of the hull. Plain LP
// bounds on these rows miss almost the whole rounding step, which makes the
// coupled day-sweep instances stall; one lifted row per (row, y) closes it.
// The rows go on the solver's internal copy only.
void add_hull_lifting_rows(milp::MilpProblem& p, const Eigen::VectorXd& lower,
                           const Eigen::VectorXd& upper, double int_tol) {
  const size_t n_rows = p.constraints.size();
  // var -> rows with an upper side (Le or Eq), for the subset bound below
  std::vector<std::vector<int>> upper_rows(p.variables.size());
  for (size_t k = 0; k < n_rows; ++k)
    if (p.constraints[k].rel != milp::Relation::Ge)
      for (const auto& t : p.constraints[k].terms)
        upper_rows[t.var].push_back(static_cast<int>(k));

  for (size_t k = 0; k < n_rows; ++k) {
    const milp::Constraint cn = p.constraints[k];  // copy: p grows below
    if (cn.rel == milp::Relation::Eq) continue;
    const double sign = cn.rel == milp::Relation::Ge ? 1.0 : -1.0;
    // normalized row: sum sign*a_j x_j >= sign*b
    for (const auto& ty : cn.terms) {
      double ay = sign * ty.coeff;
      if (ay <= 0 || p.variables[ty.var].kind != milp::VarKind::Integer)
        continue;
      if (lower[ty.var] >= upper[ty.var]) continue;
      // z = sign*b - sum_{j != y} sign*a_j x_j; need a finite upper bound.
      // Route 1: activity bound from the individual variable ranges.
      double zhi = sign * cn.rhs;
      bool ok = true;
      std::vector<milp::Term> zterms;  // z = sum c_j x_j (+ constant sign*b)
      for (const auto& t : cn.terms) {
        if (t.var == ty.var && t.coeff == ty.coeff) continue;
        double a = sign * t.coeff;
        zterms.push_back({t.var, -a});
        double hi = a > 0 ? -a * lower[t.var] : -a * upper[t.var];
        if (std::isinf(hi)) {
          ok = false;
          break;
        }
        zhi += hi;
      }
      // Route 2: a row S with an upper side whose terms cover the z support
      // proportionally bounds the aggregate much tighter than the individual
      // ranges (e.g. a flow sum capped by a demand balance).
      if (!zterms.empty() && !upper_rows[zterms[0].var].empty()) {
        for (int si : upper_rows[zterms[0].var]) {
          const auto& S = p.constraints[si];
          if (si == static_cast<int>(k)) continue;
          double ratio = 0.0;
          bool match = true;
          size_t found = 0;
          double rest_min = 0.0;
          for (const auto& st : S.terms) {
            const milp::Term* zt = nullptr;
            for (const auto& cand : zterms)
              if (cand.var == st.var) {
                zt = &cand;
                break;
              }
            if (zt) {
              if (zt->coeff == 0.0) { match = false; break; }
              double r = st.coeff / zt->coeff;
              if (r <= 0 || (ratio != 0.0 && std::fabs(r - ratio) > 1e-12)) {
                match = false;
                break;
              }
              ratio = r;
              ++found;
            } else {
              double lo_c = st.coeff > 0 ? st.coeff * lower[st.var]
                                         : st.coeff * upper[st.var];
              if (std::isinf(lo_c)) {
                match = false;
                break;
              }
              rest_min += lo_c;
            }
          }
          if (!match || found != zterms.size() || ratio <= 0) continue;
          double cand = sign * cn.rhs + (S.rhs - rest_min) / ratio;
          if (!ok || cand < zhi) {
            zhi = cand;
            ok = true;
          }
        }
      }
      if (!ok || !(zhi > 0) || std::isinf(zhi)) continue;
      double kd = std::ceil(zhi / ay - int_tol);
      if (kd < 1) continue;
      double r = zhi - (kd - 1.0) * ay;
      if (r < 1e-7 * ay || r > (1.0 - 1e-7) * ay) continue;
      // r*y - z >= (K-1)(r - a)  =>  r*y + sum_{j != y} sign*a_j x_j >=
      //                              (K-1)(r - a) + sign*b
      std::vector<milp::Term> terms{{ty.var, r}};
      for (const auto& t : cn.terms) {
        if (t.var == ty.var && t.coeff == ty.coeff) continue;
        terms.push_back({t.var, sign * t.coeff});
      }
      p.add_constraint("lift(" + cn.name + "," + p.variables[ty.var].name + ")",
                       std::move(terms), milp::Relation::Ge,
                       (kd - 1.0) * (r - ay) + sign * cn.rhs);
      break;  // one lifted row per original row
    }
  }

  // Aggregate lifting: families of two-term covering rows a*y_i >= g*x_i
  // (y_i integer) whose x_i all sit in one bounding row S. In S-activity
  // units w_i = s_i*x_i each y_i covers cap = a*s_i/g units, the family sum
  // is capped by S, and the sum of the y_i is still integer, so the same
  // hull argument applies to the aggregate. Per-row cuts cannot see this:
  // flow dodges them by splitting across the family.
  struct Cover {
    int y, x;
    double a, g;  // a*y >= g*x
  };
  std::vector<std::vector<Cover>> covers_by_x(p.variables.size());
  for (size_t k = 0; k < n_rows; ++k) {
    const milp::Constraint& R = p.constraints[k];
    if (R.rel == milp::Relation::Eq || R.terms.size() != 2 || R.rhs != 0.0)
      continue;
    double sgn = R.rel == milp::Relation::Ge ? 1.0 : -1.0;
    for (int pick = 0; pick < 2; ++pick) {
      const auto& ty = R.terms[pick];
      const auto& tx = R.terms[1 - pick];
      double a = sgn * ty.coeff, g = -sgn * tx.coeff;
      if (a <= 0 || g <= 0) continue;
      if (p.variables[ty.var].kind != milp::VarKind::Integer) continue;
      if (lower[ty.var] >= upper[ty.var]) continue;
      covers_by_x[tx.var].push_back({ty.var, tx.var, a, g});
      break;
    }
  }

  struct Fam {
    std::vector<int> ys, xs;
  };
  std::vector<milp::Constraint> pending;
  for (size_t si = 0; si < n_rows; ++si) {
    const milp::Constraint& S = p.constraints[si];
    if (S.rel == milp::Relation::Ge) continue;
    std::map<double, Fam> fams;  // cap -> members
    for (const auto& st : S.terms) {
      if (st.coeff <= 0) continue;
      for (const Cover& cv : covers_by_x[st.var]) {
        Fam& f = fams[cv.a * st.coeff / cv.g];
        f.ys.push_back(cv.y);
        f.xs.push_back(cv.x);
      }
    }
    std::map<int, double> s_coeff;
    for (const auto& t : S.terms) s_coeff[t.var] = t.coeff;
    for (auto& [cap, fam] : fams) {
      if (fam.ys.size() < 2) continue;  // singletons handled above
      std::set<int> in_fam(fam.xs.begin(), fam.xs.end());
      if (in_fam.size() != fam.xs.size()) continue;  // repeated x, skip
      double rest_min = 0.0;
      bool ok = true;
      for (const auto& t : S.terms) {
        if (in_fam.count(t.var)) continue;
        double lo_c =
            t.coeff > 0 ? t.coeff * lower[t.var] : t.coeff * upper[t.var];
        if (std::isinf(lo_c)) {
          ok = false;
          break;
        }
        rest_min += lo_c;
      }
      if (!ok) continue;
      double zhi = S.rhs - rest_min;  // bound on sum of w_i
      if (!(zhi > 0) || std::isinf(zhi) || !(cap > 0)) continue;
      double kd = std::ceil(zhi / cap - 1e-9);
      if (kd < 1) continue;
      double r = zhi - (kd - 1.0) * cap;
      if (r < 1e-7 * cap || r > (1.0 - 1e-7) * cap) continue;
      // r * sum y_i - sum w_i >= (K-1)(r - cap)
      std::vector<milp::Term> terms;
      for (int y : fam.ys) terms.push_back({y, r});
      for (int x : fam.xs) terms.push_back({x, -s_coeff[x]});
      pending.push_back({"liftsum(" + S.name + "," +
                             std::to_string(fam.ys.size()) + ")",
                         std::move(terms), milp::Relation::Ge,
                         (kd - 1.0) * (r - cap)});
    }
  }
  for (auto& c : pending)
    p.add_constraint(c.name, std::move(c.terms), c.rel, c.rhs);
}

struct Component {
  std::vector<int> vars;  // non-fixed variables only
  std::vector<int> cons;
};

struct Decomposition {
  std::vector<Component> comps;
  std::vector<int> const_rows;  // rows whose variables are all fixed
};

// Connected components of the variable/constraint incidence graph, treating
// fixed variables (lower == upper) as constants. Hours of the delivery model
// decouple this way whenever the storage chain is pinned at zero. Non-fixed
// variables outside every constraint become singleton components.
Decomposition decompose(const milp::MilpProblem& p,
                        const Eigen::VectorXd& lower,
                        const Eigen::VectorXd& upper) {
  const int n = static_cast<int>(p.variables.size());
  auto is_fixed = [&](int j) { return lower[j] >= upper[j]; };
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  Decomposition out;
  std::vector<int> row_anchor(p.constraints.size(), -1);
  for (size_t k = 0; k < p.constraints.size(); ++k) {
    const auto& cn = p.constraints[k];
    int first = -1;
    for (const auto& t : cn.terms) {
      if (is_fixed(t.var)) continue;
      if (first < 0) {
        first = t.var;
      } else {
        int a = find(first), b = find(t.var);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
    if (first < 0)
      out.const_rows.push_back(static_cast<int>(k));
    else
      row_anchor[k] = first;
  }
  std::map<int, Component> by_root;
  for (int j = 0; j < n; ++j)
    if (!is_fixed(j)) by_root[find(j)].vars.push_back(j);
  for (size_t k = 0; k < p.constraints.size(); ++k)
    if (row_anchor[k] >= 0)
      by_root[find(row_anchor[k])].cons.push_back(static_cast<int>(k));
  out.comps.reserve(by_root.size());
  for (auto& [root, comp] : by_root) out.comps.push_back(std::move(comp));
  return out;
}

// Evaluates rows whose variables are all fixed. Returns false when one is
// violated beyond the tolerance (measured on the scaled row).
bool const_rows_ok(const milp::MilpProblem& p, const std::vector<int>& rows,
                   const Eigen::VectorXd& lower, double feas_tol) {
  for (int k : rows) {
    const auto& cn = p.constraints[k];
    double lhs = 0.0, scale = 0.0;
    for (const auto& t : cn.terms) {
      lhs += t.coeff * lower[t.var];
      scale = std::max(scale, std::fabs(t.coeff));
    }
    if (scale == 0.0) scale = 1.0;
    double d = (lhs - cn.rhs) / scale;
    bool ok = cn.rel == milp::Relation::Le   ? d <= feas_tol
              : cn.rel == milp::Relation::Ge ? d >= -feas_tol
                                             : std::fabs(d) <= feas_tol;
    if (!ok) return false;
  }
  return true;
}

struct BnbResult {
  Status status = Status::Infeasible;
  double objective = 0.0;
  Eigen::VectorXd x;   // component-local values
  double abs_gap = 0.0;
  long nodes = 0;
  long lp_iterations = 0;
};

struct BnbNode {
  double bound;
  long id;
  Eigen::VectorXd lower, upper;
};
struct NodeOrder {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.id > b.id;
  }
};

struct PseudoCost {
  double up_sum = 0, dn_sum = 0;
  long up_n = 0, dn_n = 0;
};

// Best-first branch and bound for one component.
BnbResult branch_and_bound(const milp::MilpProblem& p, const Component& comp,
                           const Eigen::VectorXd& lower0,
                           const Eigen::VectorXd& upper0,
                           const SolverOptions& opts, Clock::time_point t0,
                           bool* hit_limit) {
  static const long bb_trace = [] {
    const char* e = std::getenv("FOGCACHE_BB_TRACE");
    return e ? std::atol(e) : 0L;
  }();
  BnbResult res;
  LpInstance inst = make_instance(p, comp.vars, comp.cons, &lower0, &upper0);
  const int nloc = static_cast<int>(comp.vars.size());
  Eigen::VectorXd lo(nloc), up(nloc);
  std::vector<int> int_vars;
  for (int i = 0; i < nloc; ++i) {
    lo[i] = lower0[comp.vars[i]];
    up[i] = upper0[comp.vars[i]];
    if (p.variables[comp.vars[i]].kind == milp::VarKind::Integer)
      int_vars.push_back(i);
  }

  std::priority_queue<BnbNode, std::vector<BnbNode>, NodeOrder> open;
  long next_id = 0;
  open.push({-kInf, next_id++, lo, up});

  double inc_obj = kInf;
  Eigen::VectorXd inc_x;
  double pruned_floor = kInf;  // lowest bound discarded by the gap rule
  std::vector<PseudoCost> pc(nloc);

  auto prune_eps = [&]() {
    return inc_obj == kInf ? 0.0
                           : opts.gap_limit * std::max(1.0, std::fabs(inc_obj));
  };
  auto try_incumbent = [&](double obj, const Eigen::VectorXd& x) {
    if (obj < inc_obj - 1e-12) {
      inc_obj = obj;
      inc_x = x;
    }
  };
  // Feasibility check on component-local data, same row scaling as the
  // global verifier.
  auto locally_feasible = [&](const Eigen::VectorXd& x) {
    for (int i = 0; i < nloc; ++i)
      if (x[i] < lo[i] - opts.feas_tol || x[i] > up[i] + opts.feas_tol)
        return false;
    Eigen::VectorXd act = Eigen::VectorXd::Zero(inst.num_rows);
    for (int j = 0; j < nloc; ++j)
      for (size_t k = 0; k < inst.cols[j].rows.size(); ++k)
        act[inst.cols[j].rows[k]] += inst.cols[j].vals[k] * x[j];
    for (int r = 0; r < inst.num_rows; ++r) {
      double d = act[r] - inst.rhs[r];
      if (inst.rel[r] == milp::Relation::Le && d > opts.feas_tol) return false;
      if (inst.rel[r] == milp::Relation::Ge && d < -opts.feas_tol) return false;
      if (inst.rel[r] == milp::Relation::Eq && std::fabs(d) > opts.feas_tol)
        return false;
    }
    return true;
  };

  while (!open.empty()) {
    if (opts.node_limit >= 0 && res.nodes >= opts.node_limit) {
      *hit_limit = true;
      break;
    }
    if (opts.time_limit_s > 0 && elapsed_ms(t0) > opts.time_limit_s * 1e3) {
      *hit_limit = true;
      break;
    }
    BnbNode node = open.top();
    open.pop();
    if (node.bound >= inc_obj - prune_eps()) {
      pruned_floor = std::min(pruned_floor, node.bound);
      continue;
    }
    ++res.nodes;
    LpOutcome lpr = solve_bounded_lp(inst, opts, &node.lower, &node.upper);
    res.lp_iterations += lpr.iterations;
    if (bb_trace && res.nodes % bb_trace == 0)
      std::fprintf(stderr, "[bb] node=%ld open=%zu bound=%.6f inc=%.6f\n",
                   res.nodes, open.size(), lpr.status == Status::Optimal
                       ? lpr.objective : -1.0, inc_obj);
    if (lpr.status == Status::Infeasible) continue;
    if (lpr.status == Status::Unbounded) {
      res.status = Status::Unbounded;
      return res;
    }
    if (lpr.status == Status::IterationLimit) {
      *hit_limit = true;
      continue;
    }
    if (lpr.objective >= inc_obj - prune_eps()) {
      pruned_floor = std::min(pruned_floor, lpr.objective);
      continue;
    }

    // fractional integer variables
    int branch_var = -1;
    double branch_frac = 0.0, best_score = -1.0;
    bool all_integral = true;
    for (int v : int_vars) {
      double xv = lpr.x[v];
      double frac = xv - std::floor(xv);
      double dist = std::min(frac, 1.0 - frac);
      if (dist <= opts.int_tol) continue;
      all_integral = false;
      double score;
      if (opts.branching == SolverOptions::Branching::PseudoCost) {
        const PseudoCost& q = pc[v];
        double up_est = q.up_n ? q.up_sum / q.up_n : 1.0;
        double dn_est = q.dn_n ? q.dn_sum / q.dn_n : 1.0;
        score = std::min(up_est * (1.0 - frac), dn_est * frac);
      } else {
        score = dist;  // most fractional
      }
      if (score > best_score + 1e-15) {
        best_score = score;
        branch_var = v;
        branch_frac = frac;
      }
    }

    if (all_integral) {
      try_incumbent(lpr.objective, lpr.x);
      continue;
    }

    // Rounding heuristic: integers up to their ceiling (covering rows only
    // get slacker), checked honestly before use.
    {
      Eigen::VectorXd xr = lpr.x;
      bool ok = true;
      for (int v : int_vars) {
        double r = std::ceil(xr[v] - opts.int_tol);
        if (r > node.upper[v]) {
          ok = false;
          break;
        }
        xr[v] = std::max(r, node.lower[v]);
      }
      if (ok && locally_feasible(xr)) {
        double obj = inst.cost.dot(xr);
        try_incumbent(obj, xr);
      }
    }

    double xv = lpr.x[branch_var];
    BnbNode dn{lpr.objective, next_id++, node.lower, node.upper};
    dn.upper[branch_var] = std::floor(xv);
    BnbNode upn{lpr.objective, next_id++, node.lower, node.upper};
    upn.lower[branch_var] = std::ceil(xv);
    if (opts.branching == SolverOptions::Branching::PseudoCost) {
      // update with the parent's own LP gain once children are solved is the
      // full scheme; the cheap surrogate below uses the objective coefficient
      double c = std::fabs(inst.cost[branch_var]);
      pc[branch_var].dn_sum += c * branch_frac + 1e-6;
      pc[branch_var].dn_n += 1;
      pc[branch_var].up_sum += c * (1.0 - branch_frac) + 1e-6;
      pc[branch_var].up_n += 1;
    }
    if (dn.upper[branch_var] >= dn.lower[branch_var]) open.push(std::move(dn));
    if (upn.lower[branch_var] <= upn.upper[branch_var])
      open.push(std::move(upn));
  }

  if (inc_obj == kInf) {
    res.status = *hit_limit ? Status::IterationLimit : Status::Infeasible;
    return res;
  }
  double open_floor = pruned_floor;
  while (!open.empty()) {
    open_floor = std::min(open_floor, open.top().bound);
    open.pop();
  }
  res.status = *hit_limit ? Status::IterationLimit : Status::Optimal;
  res.objective = inc_obj;
  res.x = inc_x;
  double lower_bound = std::min(open_floor, inc_obj);
  res.abs_gap = std::max(0.0, inc_obj - lower_bound);
  return res;
}

// Places a variable that appears in no constraint at the bound minimizing
// the objective. Returns false on an unbounded direction.
bool place_free_singleton(double cost, double lo, double up, double& out) {
  if (cost > 0) {
    if (std::isinf(lo)) return false;
    out = lo;
  } else if (cost < 0) {
    if (std::isinf(up)) return false;
    out = up;
  } else {
    out = !std::isinf(lo) ? lo : (!std::isinf(up) ? up : 0.0);
  }
  return true;
}

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    default: return "iteration-limit";
  }
}

double Solution::value_of(const milp::MilpProblem& p,
                          const std::string& name) const {
  int i = p.find_variable(name);
  if (i < 0 || i >= static_cast<int>(values.size()))
    throw std::out_of_range("no such variable: " + name);
  return values[i];
}

Solution solve_lp(const milp::MilpProblem& p, const SolverOptions& opts) {
  milp::validate(p);
  auto t0 = Clock::now();
  Solution sol;
  sol.values.assign(p.variables.size(), 0.0);
  Eigen::VectorXd lower(p.variables.size()), upper(p.variables.size());
  std::vector<double> cost(p.variables.size(), 0.0);
  for (size_t j = 0; j < p.variables.size(); ++j) {
    lower[j] = p.variables[j].lower;
    upper[j] = p.variables[j].upper;
    if (lower[j] >= upper[j]) sol.values[j] = lower[j];
  }
  for (const auto& t : p.objective) cost[t.var] += t.coeff;

  Decomposition dec = decompose(p, lower, upper);
  if (!const_rows_ok(p, dec.const_rows, lower, opts.feas_tol)) {
    sol.status = Status::Infeasible;
    sol.stats.wall_ms = elapsed_ms(t0);
    return sol;
  }
  double total = 0.0;
  for (size_t j = 0; j < p.variables.size(); ++j)
    if (lower[j] >= upper[j]) total += cost[j] * lower[j];

  Status status = Status::Optimal;
  for (const Component& comp : dec.comps) {
    if (comp.cons.empty()) {
      for (int v : comp.vars) {
        double xv;
        if (!place_free_singleton(cost[v], lower[v], upper[v], xv)) {
          status = Status::Unbounded;
          break;
        }
        sol.values[v] = xv;
        total += cost[v] * xv;
      }
      if (status == Status::Unbounded) break;
      continue;
    }
    LpInstance inst = make_instance(p, comp.vars, comp.cons, &lower, &upper);
    LpOutcome r = solve_bounded_lp(inst, opts);
    sol.stats.lp_iterations += r.iterations;
    if (r.status != Status::Optimal) {
      status = r.status;
      break;
    }
    for (int i = 0; i < static_cast<int>(comp.vars.size()); ++i)
      sol.values[comp.vars[i]] = r.x[i];
    total += r.objective;
  }
  sol.status = status;
  sol.objective = status == Status::Optimal ? total : 0.0;
  sol.stats.wall_ms = elapsed_ms(t0);
  return sol;
}

Solution solve_mip(const milp::MilpProblem& p, const SolverOptions& opts) {
  milp::validate(p);
  auto t0 = Clock::now();
  Solution sol;
  sol.values.assign(p.variables.size(), 0.0);

  Eigen::VectorXd lower(p.variables.size()), upper(p.variables.size());
  std::vector<double> cost(p.variables.size(), 0.0);
  for (size_t j = 0; j < p.variables.size(); ++j) {
    lower[j] = p.variables[j].lower;
    upper[j] = p.variables[j].upper;
  }
  for (const auto& t : p.objective) cost[t.var] += t.coeff;

  if (!round_integer_bounds(p, lower, upper, opts.int_tol)) {
    sol.status = Status::Infeasible;
    sol.stats.wall_ms = elapsed_ms(t0);
    return sol;
  }
  eliminate_dominated_pairs(p, lower, upper);
  if (!tighten_singleton_rows(p, lower, upper, opts.int_tol) ||
      !propagate_bounds(p, lower, upper, opts.int_tol, 3)) {
    sol.status = Status::Infeasible;
    sol.stats.wall_ms = elapsed_ms(t0);
    return sol;
  }

  // Internal copy with integer-hull lifting rows; the caller's problem and
  // the reported solution are untouched by them.
  milp::MilpProblem work = p;
  add_hull_lifting_rows(work, lower, upper, opts.int_tol);

  Decomposition dec = decompose(work, lower, upper);
  if (!const_rows_ok(work, dec.const_rows, lower, opts.feas_tol)) {
    sol.status = Status::Infeasible;
    sol.stats.wall_ms = elapsed_ms(t0);
    return sol;
  }
  double total = 0.0;
  for (size_t j = 0; j < p.variables.size(); ++j)
    if (lower[j] >= upper[j]) {
      sol.values[j] = lower[j];
      total += cost[j] * lower[j];
    }

  double abs_gap = 0.0;
  Status status = Status::Optimal;
  bool hit_limit = false;

  std::vector<const Component*> hard;
  for (const Component& comp : dec.comps) {
    if (!comp.cons.empty()) {
      hard.push_back(&comp);
      continue;
    }
    bool bad = false;
    for (int v : comp.vars) {
      double xv;
      if (!place_free_singleton(cost[v], lower[v], upper[v], xv)) {
        status = Status::Unbounded;
        bad = true;
        break;
      }
      sol.values[v] = xv;
      total += cost[v] * xv;
    }
    if (bad) break;
  }

  // Components are independent; solve them concurrently and merge in index
  // order so the result is identical to a serial run. Runs with explicit
  // node or time limits stay serial: an interrupt under concurrency would
  // make which components carry incumbents scheduling-dependent.
  std::vector<BnbResult> results(hard.size());
  std::vector<char> comp_hit(hard.size(), 0);
  if (status == Status::Optimal) {
    unsigned pool_size = 1;
    if (opts.node_limit < 0 && opts.time_limit_s <= 0 && hard.size() > 1)
      pool_size = std::min<unsigned>(
          {std::max(1u, std::thread::hardware_concurrency()),
           static_cast<unsigned>(hard.size()), 8u});
    if (pool_size <= 1) {
      for (size_t i = 0; i < hard.size(); ++i) {
        bool hl = false;
        results[i] =
            branch_and_bound(work, *hard[i], lower, upper, opts, t0, &hl);
        comp_hit[i] = hl;
      }
    } else {
      std::atomic<size_t> cursor{0};
      auto run = [&]() {
        for (;;) {
          size_t i = cursor.fetch_add(1);
          if (i >= hard.size()) return;
          bool hl = false;
          results[i] =
              branch_and_bound(work, *hard[i], lower, upper, opts, t0, &hl);
          comp_hit[i] = hl;
        }
      };
      std::vector<std::thread> pool;
      for (unsigned k = 0; k < pool_size; ++k) pool.emplace_back(run);
      for (auto& th : pool) th.join();
    }
  }

  for (size_t i = 0; i < hard.size() && status != Status::Infeasible &&
                     status != Status::Unbounded;
       ++i) {
    const BnbResult& r = results[i];
    hit_limit |= comp_hit[i] != 0;
    sol.stats.nodes += r.nodes;
    sol.stats.lp_iterations += r.lp_iterations;
    if (r.status == Status::Infeasible || r.status == Status::Unbounded) {
      status = r.status;
      break;
    }
    if (r.x.size() != static_cast<Eigen::Index>(hard[i]->vars.size())) {
      // limit hit before any incumbent in this component
      status = Status::IterationLimit;
      continue;
    }
    for (int k = 0; k < static_cast<int>(hard[i]->vars.size()); ++k)
      sol.values[hard[i]->vars[k]] = r.x[k];
    total += r.objective;
    abs_gap += r.abs_gap;
    if (r.status == Status::IterationLimit) status = Status::IterationLimit;
  }
  if (hit_limit && status == Status::Optimal) status = Status::IterationLimit;
  sol.status = status;
  if (status == Status::Optimal || status == Status::IterationLimit) {
    sol.objective = total;
    sol.gap = abs_gap / std::max(1.0, std::fabs(total));
  }
  sol.stats.wall_ms = elapsed_ms(t0);
  return sol;
}

Solution enumerate_oracle(const milp::MilpProblem& p, int max_integer_vars,
                          const SolverOptions& opts) {
  milp::validate(p);
  auto t0 = Clock::now();
  std::vector<int> ints;
  for (size_t j = 0; j < p.variables.size(); ++j)
    if (p.variables[j].kind == milp::VarKind::Integer)
      ints.push_back(static_cast<int>(j));
  if (static_cast<int>(ints.size()) > max_integer_vars)
    throw std::invalid_argument(
        "enumerate_oracle: too many integer variables (" +
        std::to_string(ints.size()) + " > " +
        std::to_string(max_integer_vars) + ")");
  std::vector<long> base(ints.size()), count(ints.size());
  double combos = 1;
  for (size_t k = 0; k < ints.size(); ++k) {
    const auto& v = p.variables[ints[k]];
    if (std::isinf(v.lower) || std::isinf(v.upper))
      throw std::invalid_argument(
          "enumerate_oracle: integer variable '" + v.name +
          "' needs finite bounds");
    long lo = static_cast<long>(std::ceil(v.lower - opts.int_tol));
    long hi = static_cast<long>(std::floor(v.upper + opts.int_tol));
    if (hi < lo)
      throw std::invalid_argument("enumerate_oracle: empty integer range on '" +
                                  v.name + "'");
    if (hi - lo + 1 > 8)
      throw std::invalid_argument("enumerate_oracle: integer variable '" +
                                  v.name + "' spans more than 8 values");
    base[k] = lo;
    count[k] = hi - lo + 1;
    combos *= static_cast<double>(count[k]);
  }
  if (combos > 1e6)
    throw std::invalid_argument(
        "enumerate_oracle: more than 1e6 integer combinations; refusing");

  Solution best;
  best.values.assign(p.variables.size(), 0.0);
  best.status = Status::Infeasible;
  best.objective = kInf;

  // All variables stay in the instance; each combination is applied through
  // bound overrides. Rows with no terms are handled by the simplex itself.
  LpInstance inst = make_instance(p);
  Eigen::VectorXd lo = inst.lower, up = inst.upper;
  std::vector<long> digit(ints.size(), 0);
  bool done = false;
  while (!done) {
    for (size_t k = 0; k < ints.size(); ++k) {
      double v = static_cast<double>(base[k] + digit[k]);
      lo[ints[k]] = v;
      up[ints[k]] = v;
    }
    LpOutcome r = solve_bounded_lp(inst, opts, &lo, &up);
    best.stats.nodes += 1;
    best.stats.lp_iterations += r.iterations;
    if (r.status == Status::Unbounded) {
      best.status = Status::Unbounded;
      best.objective = 0.0;
      best.stats.wall_ms = elapsed_ms(t0);
      return best;
    }
    if (r.status == Status::Optimal && r.objective < best.objective - 1e-12) {
      best.status = Status::Optimal;
      best.objective = r.objective;
      for (size_t j = 0; j < p.variables.size(); ++j) best.values[j] = r.x[j];
    }
    // odometer
    done = true;
    for (size_t k = 0; k < ints.size(); ++k) {
      if (++digit[k] < count[k]) {
        done = false;
        break;
      }
      digit[k] = 0;
    }
    if (ints.empty()) break;
  }
  if (best.status != Status::Optimal) {
    best.objective = 0.0;
    best.status = Status::Infeasible;
  }
  best.stats.wall_ms = elapsed_ms(t0);
  return best;
}

FeasReport check_solution(const milp::MilpProblem& p,
                          const std::vector<double>& x, double feas_tol,
                          double int_tol) {
  FeasReport rep;
  if (x.size() != p.variables.size()) {
    rep.worst = "assignment size mismatch";
    return rep;
  }
  rep.feasible = true;
  rep.integral = true;
  for (size_t j = 0; j < p.variables.size(); ++j) {
    const auto& v = p.variables[j];
    double lo_v = v.lower - feas_tol * std::max(1.0, std::fabs(v.lower));
    double up_v = v.upper + feas_tol * std::max(1.0, std::fabs(v.upper));
    double excess = std::max(v.lower - x[j], x[j] - v.upper);
    if (x[j] < lo_v || x[j] > up_v) {
      rep.feasible = false;
      if (excess > rep.max_violation) {
        rep.max_violation = excess;
        rep.worst = "bound " + v.name;
      }
    }
    if (v.kind == milp::VarKind::Integer &&
        std::fabs(x[j] - std::round(x[j])) > int_tol) {
      rep.integral = false;
      if (rep.worst.empty()) rep.worst = "integrality " + v.name;
    }
  }
  for (const auto& cn : p.constraints) {
    double scale = 0.0, lhs = 0.0;
    for (const auto& t : cn.terms) {
      scale = std::max(scale, std::fabs(t.coeff));
      lhs += t.coeff * x[t.var];
    }
    if (scale == 0.0) scale = 1.0;
    double d = (lhs - cn.rhs) / scale;
    double viol = cn.rel == milp::Relation::Le   ? d
                  : cn.rel == milp::Relation::Ge ? -d
                                                 : std::fabs(d);
    if (viol > feas_tol) {
      rep.feasible = false;
      if (viol > rep.max_violation) {
        rep.max_violation = viol;
        rep.worst = "row " + cn.name;
      }
    }
  }
  return rep;
}

}  // namespace fogcache::solver
