#pragma once

// Test-only reference implementations, deliberately independent of the
// library's solver path: a dense full-tableau simplex, a plain Dijkstra,
// and random instance generators for the solver cross-checks.

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "fogcache/milp.hpp"
#include "fogcache/topology.hpp"

namespace oracles {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

// Two-phase dense tableau simplex with Bland's rule over the bounded-variable
// problem: minimize c.x s.t. A x (rel) b, l <= x <= u. Bounds are compiled
// away into shifts, splits and extra rows before the tableau runs.
LpResult naive_simplex(const fogcache::milp::MilpProblem& p);

// Textbook Dijkstra distances (km) from src to every node; no tie-breaking.
std::vector<double> dijkstra_km(const fogcache::netmodel::Topology& topo,
                                int src_id);

// Random bounded LP, feasible by construction (a random interior point
// defines the right-hand sides). Never unbounded: all bounds finite.
fogcache::milp::MilpProblem random_lp(std::mt19937& rng);

// Random bounded MIP for the oracle cross-check: a handful of integer
// variables with small finite ranges. May be integer-infeasible.
fogcache::milp::MilpProblem random_mip(std::mt19937& rng, int max_ints = 12);

}  // namespace oracles
