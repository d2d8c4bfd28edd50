#pragma once

#include <Eigen/Core>
#include <vector>

#include "fogcache/milp.hpp"
#include "fogcache/solver.hpp"

namespace fogcache::solver {

// One LP in row form: minimize cost . x subject to A x (rel) rhs and
// lower <= x <= upper. Columns are stored sparsely; rows are pre-scaled to
// max |coeff| = 1 so feasibility tolerances are absolute. The structure is
// built once per branch-and-bound component and reused across nodes with
// per-node bound overrides.
struct LpInstance {
  struct Col {
    std::vector<int> rows;
    std::vector<double> vals;
  };
  int num_rows = 0;
  std::vector<Col> cols;
  Eigen::VectorXd cost;
  Eigen::VectorXd lower, upper;
  std::vector<milp::Relation> rel;
  Eigen::VectorXd rhs;
};

// Builds the scaled instance from a (sub)problem. `vars` and `cons` select a
// subset; pass empty vectors to take the whole problem. Row terms on
// variables outside `vars` must be fixed (lower == upper in `fold_lower` /
// `fold_upper`, defaulting to the problem bounds) and are folded into the
// right-hand side as constants.
LpInstance make_instance(const milp::MilpProblem& p,
                         const std::vector<int>& vars = {},
                         const std::vector<int>& cons = {},
                         const Eigen::VectorXd* fold_lower = nullptr,
                         const Eigen::VectorXd* fold_upper = nullptr);

struct LpOutcome {
  Status status = Status::Infeasible;
  Eigen::VectorXd x;  // structural variables only
  double objective = 0.0;
  long iterations = 0;
};

// Bounded-variable revised simplex, two phases with artificials, dense
// product-form inverse with periodic refactorization. Deterministic: Dantzig
// pricing with lowest-index tie-breaks and a Bland fallback against cycling.
// When `lower`/`upper` are non-null they override the instance bounds.
LpOutcome solve_bounded_lp(const LpInstance& lp, const SolverOptions& opts,
                           const Eigen::VectorXd* lower = nullptr,
                           const Eigen::VectorXd* upper = nullptr);

}  // namespace fogcache::solver
