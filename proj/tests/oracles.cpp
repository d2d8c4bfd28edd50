#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace oracles {

using fogcache::milp::MilpProblem;
using fogcache::milp::Relation;
using fogcache::milp::Term;
using fogcache::milp::VarKind;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-9;

struct StdRow {
  std::vector<double> a;
  Relation rel;
  double rhs;
};

// Bland-rule tableau simplex on: min c.z s.t. rows, z >= 0.
LpResult tableau_solve(std::vector<StdRow> rows, std::vector<double> c,
                       int n_z) {
  const int m = static_cast<int>(rows.size());
  // columns: z (n_z) | slack/surplus (m at most) | artificials (m at most)
  int n_slack = 0, n_art = 0;
  for (auto& r : rows) {
    if (r.rhs < 0) {
      for (auto& v : r.a) v = -v;
      r.rhs = -r.rhs;
      r.rel = r.rel == Relation::Le   ? Relation::Ge
              : r.rel == Relation::Ge ? Relation::Le
                                      : Relation::Eq;
    }
    if (r.rel != Relation::Eq) ++n_slack;
  }
  for (auto& r : rows)
    if (r.rel != Relation::Le) ++n_art;
  int cols = n_z + n_slack + n_art + 1;  // + rhs
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, cols);
  std::vector<int> basis(m, -1);
  int s_at = n_z, a_at = n_z + n_slack;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n_z; ++j) T(i, j) = rows[i].a[j];
    T(i, cols - 1) = rows[i].rhs;
    if (rows[i].rel == Relation::Le) {
      T(i, s_at) = 1.0;
      basis[i] = s_at++;
    } else if (rows[i].rel == Relation::Ge) {
      T(i, s_at++) = -1.0;
      T(i, a_at) = 1.0;
      basis[i] = a_at++;
    } else {
      T(i, a_at) = 1.0;
      basis[i] = a_at++;
    }
  }

  auto pivot = [&](int pr, int pc) {
    T.row(pr) /= T(pr, pc);
    for (int i = 0; i <= m; ++i) {
      if (i == pr) continue;
      double f = T(i, pc);
      if (f != 0.0) T.row(i) -= f * T.row(pr);
    }
    basis[pr] = pc;
  };

  auto run = [&](int first_col, int last_col) -> bool {
    // returns false on unbounded
    for (;;) {
      int enter = -1;
      for (int j = first_col; j < last_col; ++j)
        if (T(m, j) < -kEps) {
          enter = j;
          break;  // Bland: lowest index
        }
      if (enter < 0) return true;
      int leave = -1;
      double best = kInf;
      for (int i = 0; i < m; ++i) {
        if (T(i, enter) > kEps) {
          double ratio = T(i, cols - 1) / T(i, enter);
          if (ratio < best - kEps ||
              (ratio < best + kEps && (leave < 0 || basis[i] < basis[leave]))) {
            best = std::min(best, ratio);
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  };

  // phase 1
  if (n_art > 0) {
    for (int j = 0; j < cols; ++j) T(m, j) = 0.0;
    for (int i = 0; i < m; ++i)
      if (basis[i] >= n_z + n_slack) T.row(m) -= T.row(i);
    for (int j = n_z + n_slack; j < cols - 1; ++j) T(m, j) = 0.0;
    run(0, n_z + n_slack);
    if (T(m, cols - 1) < -1e-7) return {LpStatus::Infeasible, 0.0, {}};
    // pivot out basic artificials where a pivot exists
    for (int i = 0; i < m; ++i) {
      if (basis[i] < n_z + n_slack) continue;
      for (int j = 0; j < n_z + n_slack; ++j)
        if (std::fabs(T(i, j)) > 1e-7) {
          pivot(i, j);
          break;
        }
    }
  }
  // phase 2
  for (int j = 0; j < cols; ++j) T(m, j) = j < n_z ? c[j] : 0.0;
  for (int i = 0; i < m; ++i)
    if (basis[i] < n_z && c[basis[i]] != 0.0)
      T.row(m) -= c[basis[i]] * T.row(i);
  for (int i = 0; i < m; ++i)  // basic artificials stay pinned at zero
    if (basis[i] >= n_z + n_slack) T(i, cols - 1) = std::max(T(i, cols - 1), 0.0);
  if (!run(0, n_z + n_slack)) return {LpStatus::Unbounded, 0.0, {}};

  LpResult r;
  r.status = LpStatus::Optimal;
  r.x.assign(n_z, 0.0);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n_z) r.x[basis[i]] = T(i, cols - 1);
  r.objective = 0.0;
  for (int j = 0; j < n_z; ++j) r.objective += c[j] * r.x[j];
  return r;
}

}  // namespace

LpResult naive_simplex(const MilpProblem& p) {
  const int n = static_cast<int>(p.variables.size());
  // per variable: z-columns and the affine map x = base + sign*z (+ z2 for
  // free splits)
  struct Map {
    int z1 = -1, z2 = -1;
    double base = 0.0, sign = 1.0;
  };
  std::vector<Map> map(n);
  int n_z = 0;
  std::vector<StdRow> rows;
  for (int j = 0; j < n; ++j) {
    double lo = p.variables[j].lower, up = p.variables[j].upper;
    Map& mp = map[j];
    if (!std::isinf(lo)) {
      mp = {n_z++, -1, lo, 1.0};
      if (!std::isinf(up)) {
        StdRow r;
        r.a.assign(n_z, 0.0);
        r.a[mp.z1] = 1.0;
        r.rel = Relation::Le;
        r.rhs = up - lo;
        rows.push_back(std::move(r));
      }
    } else if (!std::isinf(up)) {
      mp = {n_z++, -1, up, -1.0};
    } else {
      mp.z1 = n_z++;
      mp.z2 = n_z++;
      mp.base = 0.0;
    }
  }
  for (auto& r : rows) r.a.resize(n_z, 0.0);

  std::vector<double> c(n_z, 0.0);
  double c0 = 0.0;
  std::vector<double> cx(n, 0.0);
  for (const Term& t : p.objective) cx[t.var] += t.coeff;
  for (int j = 0; j < n; ++j) {
    const Map& mp = map[j];
    c0 += cx[j] * mp.base;
    if (mp.z2 < 0) {
      c[mp.z1] += cx[j] * mp.sign;
    } else {
      c[mp.z1] += cx[j];
      c[mp.z2] -= cx[j];
    }
  }
  for (const auto& cn : p.constraints) {
    StdRow r;
    r.a.assign(n_z, 0.0);
    r.rel = cn.rel;
    r.rhs = cn.rhs;
    for (const Term& t : cn.terms) {
      const Map& mp = map[t.var];
      r.rhs -= t.coeff * mp.base;
      if (mp.z2 < 0) {
        r.a[mp.z1] += t.coeff * mp.sign;
      } else {
        r.a[mp.z1] += t.coeff;
        r.a[mp.z2] -= t.coeff;
      }
    }
    rows.push_back(std::move(r));
  }

  LpResult res = tableau_solve(std::move(rows), std::move(c), n_z);
  if (res.status != LpStatus::Optimal) return res;
  res.objective += c0;
  std::vector<double> x(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const Map& mp = map[j];
    x[j] = mp.z2 < 0 ? mp.base + mp.sign * res.x[mp.z1]
                     : res.x[mp.z1] - res.x[mp.z2];
  }
  res.x = std::move(x);
  return res;
}

std::vector<double> dijkstra_km(const fogcache::netmodel::Topology& topo,
                                int src_id) {
  const int n = topo.node_count();
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& l : topo.links) {
    int a = topo.index_of(l.a), b = topo.index_of(l.b);
    adj[a].push_back({b, l.length_km});
    adj[b].push_back({a, l.length_km});
  }
  std::vector<double> dist(n, kInf);
  dist[topo.index_of(src_id)] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  q.push({0.0, topo.index_of(src_id)});
  while (!q.empty()) {
    auto [d, u] = q.top();
    q.pop();
    if (d > dist[u]) continue;
    for (auto [v, w] : adj[u])
      if (d + w < dist[v]) {
        dist[v] = d + w;
        q.push({dist[v], v});
      }
  }
  return dist;
}

MilpProblem random_lp(std::mt19937& rng) {
  std::uniform_int_distribution<int> nd(5, 20), md(3, 15), reld(0, 2);
  std::uniform_real_distribution<double> ud(1.0, 10.0), cd(-10.0, 10.0),
      ad(-5.0, 5.0), sd(0.0, 5.0), frac(0.0, 1.0);
  const int n = nd(rng), m = md(rng);
  MilpProblem p;
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) {
    double u = ud(rng);
    p.add_variable("x" + std::to_string(j), VarKind::Continuous, 0.0, u);
    x0[j] = frac(rng) * u;
  }
  for (int j = 0; j < n; ++j)
    if (frac(rng) < 0.8) p.objective.push_back({j, cd(rng)});
  for (int i = 0; i < m; ++i) {
    std::vector<Term> terms;
    double act = 0.0;
    for (int j = 0; j < n; ++j)
      if (frac(rng) < 0.4) {
        double a = ad(rng);
        if (a == 0.0) a = 1.0;
        terms.push_back({j, a});
        act += a * x0[j];
      }
    if (terms.empty()) continue;
    int rel = reld(rng);
    if (rel == 0)
      p.add_constraint("c" + std::to_string(i), terms, Relation::Le,
                       act + sd(rng));
    else if (rel == 1)
      p.add_constraint("c" + std::to_string(i), terms, Relation::Ge,
                       act - sd(rng));
    else
      p.add_constraint("c" + std::to_string(i), terms, Relation::Eq, act);
  }
  return p;
}

MilpProblem random_mip(std::mt19937& rng, int max_ints) {
  std::uniform_int_distribution<int> nd(4, 12), md(2, 10), kd(1, max_ints),
      range(2, 8), reld(0, 2);
  std::uniform_real_distribution<double> ud(1.0, 8.0), cd(-10.0, 10.0),
      ad(-5.0, 5.0), sd(0.0, 5.0), frac(0.0, 1.0);
  const int n = nd(rng), m = md(rng);
  const int k = std::min(kd(rng), n);
  MilpProblem p;
  std::vector<double> x0(n);
  double combos = 1;
  for (int j = 0; j < n; ++j) {
    if (j < k) {
      int values = range(rng);  // 2..8 values in [0, values-1]
      if (combos * values > 20000) values = 1;  // pinned, stays enumerable
      combos *= values;
      p.add_variable("y" + std::to_string(j), VarKind::Integer, 0.0,
                     values - 1.0);
      x0[j] = std::floor(frac(rng) * values);
      if (x0[j] > values - 1) x0[j] = values - 1;
    } else {
      double u = ud(rng);
      p.add_variable("x" + std::to_string(j), VarKind::Continuous, 0.0, u);
      x0[j] = frac(rng) * u;
    }
  }
  for (int j = 0; j < n; ++j)
    if (frac(rng) < 0.8) p.objective.push_back({j, cd(rng)});
  for (int i = 0; i < m; ++i) {
    std::vector<Term> terms;
    double act = 0.0;
    for (int j = 0; j < n; ++j)
      if (frac(rng) < 0.5) {
        double a = ad(rng);
        if (a == 0.0) a = 1.0;
        terms.push_back({j, a});
        act += a * x0[j];
      }
    if (terms.empty()) continue;
    int rel = reld(rng);
    if (rel == 0)
      p.add_constraint("c" + std::to_string(i), terms, Relation::Le,
                       act + sd(rng));
    else if (rel == 1)
      p.add_constraint("c" + std::to_string(i), terms, Relation::Ge,
                       act - sd(rng));
    else
      p.add_constraint("c" + std::to_string(i), terms, Relation::Eq, act);
  }
  return p;
}

}  // namespace oracles
