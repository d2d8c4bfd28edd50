#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "fogcache/config.hpp"
#include "fogcache/power.hpp"
#include "fogcache/topology.hpp"
#include "fogcache/traces.hpp"

namespace fogcache::milp {

enum class VarKind { Continuous, Integer };
enum class Relation { Le, Eq, Ge };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = 0.0;
};

struct Term {
  int var = 0;
  double coeff = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Relation rel = Relation::Le;
  double rhs = 0.0;
};

// A minimize-sense mixed-integer linear program. Immutable once built;
// sharing across threads is safe.
struct MilpProblem {
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  std::vector<Term> objective;

  int add_variable(const std::string& name, VarKind kind, double lower,
                   double upper);
  void add_constraint(std::string name, std::vector<Term> terms, Relation rel,
                      double rhs);
  // Index of a variable by name, -1 when absent.
  int find_variable(const std::string& name) const;
  int num_integer() const;

 private:
  std::unordered_map<std::string, int> index_;
};

// Structural lint: unique names, every term references a declared variable,
// finite coefficients, lower <= upper. Throws std::invalid_argument.
void validate(const MilpProblem& p);

// Equality up to variable order and term order; zero coefficients are
// ignored. This is the round-trip notion used by the LP reader tests.
bool structurally_equal(const MilpProblem& a, const MilpProblem& b);

// Experiment toggles.
struct ScenarioFlags {
  bool cdc_renewable = false;     // drop CDC power from the brown objective
  bool esd_enabled = false;       // requires e_max > 0
  bool exact_edfa_fibers = false; // per-link fiber integers instead of
                                  // amortized EDFA power in the pair cost
  bool cyclic_soc = false;        // soc(0) = soc(horizon)
};

// Variable and constraint name builders (shared with reports and tests).
namespace names {
std::string f_fog(int node, int hour);
std::string f_cld(int node, int cloud, int hour);
std::string wavelengths(int node, int cloud, int hour);  // lam(n,c,t)
std::string metro_units(int node, int hour);             // m(n,t)
std::string olt_units(int node, int hour);               // o(n,t)
std::string solar_direct(int node, int hour);            // g_dir(n,t)
std::string solar_charge(int node, int hour);            // g_chg(n,t)
std::string discharge(int node, int hour);               // dis(n,t)
std::string soc(int node, int hour);                     // soc(n,t), t=0..H
std::string fog_brown(int node, int hour);               // b_fog(n,t)
std::string fibers(int link_a, int link_b, int hour);    // fib(a,b,t)
}  // namespace names

// Assembles the daily brown-energy minimization problem. All power terms are
// in kW and the hour step is 1 h, so the objective is kWh per day.
//
// Per node n, hour t (clouds c range over the CDC set):
//   f_fog(n,t), f_cld(n,c,t)             Gbps served by fog / by cloud c
//   lam(n,c,t)  integer                  wavelengths on the c->n lightpath
//   m(n,t), o(n,t)  integer              metro port pairs / active OLTs
//   g_dir, g_chg, dis  kW                solar direct use / into ESD / out
//   soc(n,t), t = 0..H  kWh              ESD state at hour boundaries
//   b_fog(n,t)  kW                       FDC brown power draw
// Constraints: demand split, FDC capacity, wavelength/metro/OLT covering,
// solar budget, ESD recurrence, FDC brown-power definition and the green
// supply cap (solar + discharge may not exceed the FDC facility demand).
// With the ESD disabled the storage variables are fixed to zero via bounds;
// the optional hourly rate limit is also applied through bounds.
MilpProblem build_problem(const netmodel::Topology& topo,
                          const netmodel::PathTable& paths,
                          const netmodel::PowerConfig& power,
                          const timeseries::HourlyTraces& traces,
                          const energy::PvConfig& pv,
                          const energy::EsdConfig& esd,
                          const ScenarioFlags& flags,
                          double soc_init_kwh = 0.0);

}  // namespace fogcache::milp
