#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "fogcache/config.hpp"
#include "fogcache/solver.hpp"
#include "fogcache/topology.hpp"
#include "fogcache/traces.hpp"

namespace fogcache::scenarios {

enum class ScenarioKind { A, B, C };

ScenarioKind kind_from_string(const std::string& s);
std::string to_string(ScenarioKind k);

// Sweep definition. A sweeps the fog PUE with everything brown-powered;
// B sweeps the solar array size with renewable CDCs and PUE_f = 1.1;
// C fixes the array at 250 m2 and sweeps the battery capacity.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::A;
  std::vector<double> sweep;

  static ScenarioSpec defaults(ScenarioKind k);
};

// How delivery may be forced for baseline runs.
enum class ForceDelivery { None, AllFog, AllCloud };

// One solved sweep point with its per-subsystem energy split (kWh/day).
struct SweepPoint {
  double sweep_value = 0.0;
  solver::Status status = solver::Status::Infeasible;
  double total_brown_kwh = 0.0;
  double core_kwh = 0.0, metro_kwh = 0.0, olt_kwh = 0.0;
  double fdc_brown_kwh = 0.0, cdc_brown_kwh = 0.0;
  double cdc_green_kwh = 0.0;  // reported but unbilled in scenarios B/C
  double solar_direct_kwh = 0.0, solar_charged_kwh = 0.0,
         solar_delivered_kwh = 0.0;
  double fog_fraction = 0.0;
  double saving_vs_baseline = 0.0;  // NaN when not applicable
  solver::SolverStats stats;

  // node x hour energy split for breakdown.csv; rows follow node_ids
  std::vector<int> node_ids;
  Eigen::MatrixXd core_nh, metro_nh, olt_nh, fdc_brown_nh, cdc_brown_nh,
      cdc_green_nh;
  // sorted (name, value) pairs for solution.csv
  std::vector<std::pair<std::string, double>> assignment;

  double transport_kwh() const { return core_kwh + metro_kwh + olt_kwh; }
};

struct ScenarioReport {
  ScenarioKind kind = ScenarioKind::A;
  double baseline_kwh = 0.0;
  std::string baseline_desc;
  std::vector<SweepPoint> points;
};

// Solves one instance under the scenario toggles and assembles the energy
// split. `force` clamps the fog (or cloud) flows to zero for baseline runs.
SweepPoint solve_point(const netmodel::Topology& topo,
                       const netmodel::PathTable& paths, const Config& cfg,
                       const timeseries::HourlyTraces& traces,
                       const milp::ScenarioFlags& flags,
                       ForceDelivery force = ForceDelivery::None,
                       const solver::SolverOptions& opts = {},
                       double sweep_value = 0.0);

// Runs a full sweep. Baselines: A compares against the forced all-cloud
// solution; B against the all-cloud transport of the brown-powered case;
// C against the no-battery optimum at the same array size. Solver failures
// on a point are recorded without aborting the sweep.
ScenarioReport run_scenario(const ScenarioSpec& spec,
                            const netmodel::Topology& topo, const Config& cfg,
                            const timeseries::HourlyTraces& traces,
                            const solver::SolverOptions& opts = {});

// Fraction of transport energy (core + metro + OLT) avoided by fog delivery.
// Empty when the baseline transport is zero.
std::optional<double> transport_saving_fraction(const SweepPoint& full_fog,
                                                const SweepPoint& full_cdc);

// Fog PUE below which serving from the fog beats every cloud route on
// marginal (per-Gbps) cost alone, maximized over nodes and their nearest
// clouds. Above this value full cloud delivery is optimal for demands at
// integral wavelength multiples.
double fog_breakeven_pue(const netmodel::PowerConfig& power,
                         const netmodel::Topology& topo,
                         const netmodel::PathTable& paths);

// Writes summary.csv, breakdown.csv, solution.csv and a bar chart
// scenario_<kind>.svg into out_dir (created if missing). Byte-stable across
// reruns on identical inputs.
void emit_report(const ScenarioReport& report, const std::string& out_dir);

}  // namespace fogcache::scenarios
