#pragma once

#include <string>
#include <vector>

#include "fogcache/milp.hpp"

namespace fogcache::solver {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(Status s);

struct SolverStats {
  long nodes = 0;          // branch-and-bound nodes processed
  long lp_iterations = 0;  // simplex pivots, all phases
  double wall_ms = 0.0;
};

struct Solution {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> values;  // aligned with MilpProblem::variables
  double gap = 0.0;            // relative MIP gap actually achieved
  SolverStats stats;

  double value_of(const milp::MilpProblem& p, const std::string& name) const;
};

struct SolverOptions {
  double feas_tol = 1e-7;   // absolute, on rows normalized to max |coeff| 1
  double int_tol = 1e-6;
  double gap_limit = 1e-6;  // relative
  long node_limit = -1;     // <0 = unlimited
  double time_limit_s = -1; // <0 = unlimited
  long lp_iteration_limit = 200000;  // per LP solve
  enum class Branching { MostFractional, PseudoCost };
  Branching branching = Branching::MostFractional;
  bool deterministic_order = true;  // lowest-index tie-breaks everywhere
};

// Optimal basic solution of the LP relaxation (integrality dropped, bounds
// kept). Infeasible/unbounded are reported through the status, never thrown.
Solution solve_lp(const milp::MilpProblem& p, const SolverOptions& opts = {});

// Proven optimum by best-first branch and bound over the integer variables.
// The search first splits the problem into independent components (variables
// never linked by a constraint), which the hour/node structure of the
// delivery model makes highly effective. Limits produce IterationLimit with
// the incumbent and the achieved gap.
Solution solve_mip(const milp::MilpProblem& p, const SolverOptions& opts = {});

// Exhaustive reference: fixes every combination of integer values and solves
// the continuous LP for each. Requires at most max_integer_vars integer
// variables, each with finite bounds spanning at most 8 values, and at most
// 1e6 combinations in total; throws std::invalid_argument otherwise rather
// than approximating.
Solution enumerate_oracle(const milp::MilpProblem& p,
                          int max_integer_vars = 16,
                          const SolverOptions& opts = {});

// Independent feasibility/integrality verifier: walks the constraints and
// bounds directly, knowing nothing about how the solution was produced.
// Violations are measured on rows scaled to max |coeff| = 1.
struct FeasReport {
  bool feasible = false;
  bool integral = false;
  double max_violation = 0.0;
  std::string worst;  // name of the worst row/bound, empty when clean
};
FeasReport check_solution(const milp::MilpProblem& p,
                          const std::vector<double>& x, double feas_tol = 1e-7,
                          double int_tol = 1e-6);

}  // namespace fogcache::solver
