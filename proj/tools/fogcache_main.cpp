#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "fogcache/config.hpp"
#include "fogcache/lp_format.hpp"
#include "fogcache/milp.hpp"
#include "fogcache/numeric.hpp"
#include "fogcache/scenarios.hpp"
#include "fogcache/solver.hpp"
#include "fogcache/topology.hpp"
#include "fogcache/traces.hpp"

namespace {

using namespace fogcache;

struct CommonArgs {
  std::string config_path;
  std::string topology_path;
  std::string demand_path;
  std::string irradiance_path;
  std::string synthetic_demand = "80:flat";  // peak:profile
  double synthetic_irradiance = 1000.0;      // peak W/m2
  std::string out_dir = "out";
  double pue_fog = -1;
  double ssc = -1;
  double emax = -1;
  bool exact_fibers = false;
  bool cdc_renewable = false;
  bool cyclic_soc = false;
  int hours = 24;
  long seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path,
                  "config file (built-in desk defaults when omitted)");
  cmd->add_option("--topology", a.topology_path,
                  "topology file (built-in NSFNET when omitted)");
  cmd->add_option("--demand", a.demand_path, "demand CSV (node,hour,value)");
  cmd->add_option("--irradiance", a.irradiance_path,
                  "irradiance CSV (node,hour,value)");
  cmd->add_option("--synthetic-demand", a.synthetic_demand,
                  "peak:profile used when --demand is omitted "
                  "(profile: flat|diurnal)");
  cmd->add_option("--synthetic-irradiance", a.synthetic_irradiance,
                  "half-sine peak W/m2 used when --irradiance is omitted");
  cmd->add_option("--out", a.out_dir, "output directory");
  cmd->add_option("--pue-fog", a.pue_fog, "override fog PUE");
  cmd->add_option("--ssc", a.ssc, "override solar cell area per OLT (m2)");
  cmd->add_option("--emax", a.emax, "override battery capacity (kWh)");
  cmd->add_flag("--exact-fibers", a.exact_fibers,
                "per-link fiber integers instead of amortized EDFA power");
  cmd->add_flag("--cdc-renewable", a.cdc_renewable,
                "treat cloud data centres as fully renewable");
  cmd->add_flag("--cyclic-soc", a.cyclic_soc,
                "require the battery state to close the day where it started");
  cmd->add_option("--hours", a.hours, "trace horizon (default 24)");
  cmd->add_option("--seed", a.seed,
                  "randomize per-node irradiance scale factors (testing aid);"
                  " synthetic inputs are otherwise deterministic");
}

netmodel::Topology load_topo(const CommonArgs& a) {
  return a.topology_path.empty() ? netmodel::build_nsfnet()
                                 : netmodel::load_topology(a.topology_path);
}

Config load_cfg(const CommonArgs& a) {
  Config cfg = a.config_path.empty() ? Config{} : load_config(a.config_path);
  if (a.pue_fog > 0) cfg.power.pue_fog = a.pue_fog;
  if (a.ssc >= 0) cfg.pv.area_m2 = a.ssc;
  if (a.emax >= 0) cfg.esd.e_max_kwh = a.emax;
  validate(cfg);
  return cfg;
}

timeseries::HourlyTraces load_tr(const CommonArgs& a,
                                 const netmodel::Topology& topo,
                                 const Config& cfg) {
  timeseries::HourlyTraces tr;
  tr.horizon_hours = a.hours;
  if (!a.demand_path.empty() || !a.irradiance_path.empty()) {
    if (a.demand_path.empty() || a.irradiance_path.empty())
      throw std::runtime_error("--demand and --irradiance go together");
    return timeseries::load_traces(a.demand_path, a.irradiance_path, topo,
                                   a.hours, cfg.power.olt_capacity_gbps);
  }
  auto colon = a.synthetic_demand.find(':');
  if (colon == std::string::npos)
    throw std::runtime_error("--synthetic-demand expects peak:profile");
  double peak;
  if (!parse_double(a.synthetic_demand.substr(0, colon), peak))
    throw std::runtime_error("bad synthetic demand peak");
  if (a.hours != 24)
    throw std::runtime_error("synthetic traces are fixed to a 24 h horizon");
  tr.demand_gbps =
      timeseries::synth_demand(topo, peak, a.synthetic_demand.substr(colon + 1));
  std::vector<double> scales;
  if (a.seed >= 0) {
    std::mt19937 rng(static_cast<unsigned>(a.seed));
    std::uniform_real_distribution<double> d(0.8, 1.2);
    scales.resize(topo.node_count());
    for (auto& s : scales) s = d(rng);
  }
  tr.irradiance_w_m2 =
      timeseries::synth_irradiance(topo, a.synthetic_irradiance, scales);
  return tr;
}

milp::ScenarioFlags flags_of(const CommonArgs& a, const Config& cfg) {
  milp::ScenarioFlags f;
  f.cdc_renewable = a.cdc_renewable;
  f.esd_enabled = cfg.esd.e_max_kwh > 0 && (a.emax != 0);
  f.exact_edfa_fibers = a.exact_fibers;
  f.cyclic_soc = a.cyclic_soc;
  return f;
}

milp::MilpProblem build(const CommonArgs& a, const netmodel::Topology& topo,
                        const Config& cfg, const timeseries::HourlyTraces& tr) {
  auto paths = netmodel::shortest_paths(topo);
  return milp::build_problem(topo, paths, cfg.power, tr, cfg.pv, cfg.esd,
                             flags_of(a, cfg), cfg.soc_init_kwh);
}

int exit_code(solver::Status s) {
  switch (s) {
    case solver::Status::Optimal: return 0;
    case solver::Status::Infeasible: return 2;
    default: return 1;
  }
}

int cmd_solve(const CommonArgs& a, const std::string& lp_in) {
  milp::MilpProblem problem;
  if (!lp_in.empty()) {
    problem = milp::parse_lp(lp_in);
  } else {
    auto topo = load_topo(a);
    auto cfg = load_cfg(a);
    auto tr = load_tr(a, topo, cfg);
    problem = build(a, topo, cfg, tr);
  }
  auto sol = solver::solve_mip(problem);
  std::filesystem::create_directories(a.out_dir);
  {
    std::ofstream f(std::filesystem::path(a.out_dir) / "solution.csv",
                    std::ios::binary);
    f << "variable,value\n";
    std::vector<std::pair<std::string, double>> rows;
    for (size_t j = 0; j < problem.variables.size(); ++j)
      rows.push_back({problem.variables[j].name, sol.values[j]});
    std::sort(rows.begin(), rows.end());
    for (const auto& [name, value] : rows)
      f << name << ',' << format_double(value) << '\n';
  }
  std::printf(
      "status=%s objective_kwh=%s gap=%s nodes=%ld lp_iterations=%ld "
      "wall_ms=%s\n",
      solver::to_string(sol.status).c_str(),
      format_double(sol.objective).c_str(), format_double(sol.gap).c_str(),
      sol.stats.nodes, sol.stats.lp_iterations,
      format_double(sol.stats.wall_ms).c_str());
  return exit_code(sol.status);
}

int cmd_scenario(const CommonArgs& a, const std::string& kind_str,
                 const std::vector<double>& sweep) {
  auto topo = load_topo(a);
  auto cfg = load_cfg(a);
  auto tr = load_tr(a, topo, cfg);
  auto spec =
      scenarios::ScenarioSpec::defaults(scenarios::kind_from_string(kind_str));
  if (!sweep.empty()) spec.sweep = sweep;
  auto rep = scenarios::run_scenario(spec, topo, cfg, tr);
  scenarios::emit_report(rep, a.out_dir);
  std::printf("scenario %s: baseline %s kWh/day (%s)\n",
              scenarios::to_string(rep.kind).c_str(),
              format_double(rep.baseline_kwh).c_str(),
              rep.baseline_desc.c_str());
  int rc = 0;
  for (const auto& pt : rep.points) {
    std::printf("  %s=%s: %s brown=%s kWh/day saving=%s fog_fraction=%s\n",
                rep.kind == scenarios::ScenarioKind::A   ? "pue_fog"
                : rep.kind == scenarios::ScenarioKind::B ? "ssc_m2"
                                                         : "emax_kwh",
                format_double(pt.sweep_value).c_str(),
                solver::to_string(pt.status).c_str(),
                format_double(pt.total_brown_kwh).c_str(),
                format_double(pt.saving_vs_baseline).c_str(),
                format_double(pt.fog_fraction).c_str());
    rc = std::max(rc, exit_code(pt.status));
  }
  std::printf("report written to %s\n", a.out_dir.c_str());
  return rc;
}

int cmd_export_lp(const CommonArgs& a, const std::string& out_file) {
  auto topo = load_topo(a);
  auto cfg = load_cfg(a);
  auto tr = load_tr(a, topo, cfg);
  auto problem = build(a, topo, cfg, tr);
  milp::export_lp(problem, out_file);
  std::printf("wrote %s (%zu variables, %zu constraints)\n", out_file.c_str(),
              problem.variables.size(), problem.constraints.size());
  return 0;
}

int cmd_simulate_esd(const CommonArgs& a, int node_id,
                     const std::string& out_file) {
  auto topo = load_topo(a);
  auto cfg = load_cfg(a);
  auto tr = load_tr(a, topo, cfg);
  int ni = topo.index_of(node_id);
  if (ni < 0) throw std::runtime_error("unknown node id");
  // facility load of an all-fog delivery at this node
  double kw_per_gbps = cfg.power.pue_fog * cfg.power.net_overhead_ratio *
                       cfg.power.p_server_w_per_gbps / 1000.0;
  Eigen::VectorXd load = tr.demand_gbps.row(ni).transpose() * kw_per_gbps;
  Eigen::VectorXd irr = tr.irradiance_w_m2.row(ni).transpose();
  auto trace =
      energy::simulate_dispatch(irr, cfg.pv, cfg.esd, load, cfg.soc_init_kwh);
  std::ostream* out = &std::cout;
  std::ofstream f;
  if (!out_file.empty()) {
    f.open(out_file, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out_file);
    out = &f;
  }
  *out << "hour,direct,charged,delivered,soc\n";
  for (int h = 0; h < load.size(); ++h)
    *out << h << ',' << format_double(trace.direct_kwh[h]) << ','
         << format_double(trace.charged_kwh[h]) << ','
         << format_double(trace.delivered_kwh[h]) << ','
         << format_double(trace.soc_kwh[h + 1]) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "fogcache: daily brown-energy optimization of video-on-demand delivery "
      "from cloud or solar/battery-assisted fog data centres"};
  app.require_subcommand(1);

  CommonArgs a;
  std::string scenario_kind;
  std::vector<double> sweep;
  std::string lp_out = "problem.lp";
  std::string esd_out;
  int esd_node = 1;

  std::string lp_in;
  auto* solve = app.add_subcommand("solve", "solve one instance");
  add_common(solve, a);
  solve->add_option("--lp", lp_in,
                    "solve this LP file instead of building an instance");

  auto* scen = app.add_subcommand("scenario", "run a sweep (A, B or C)");
  add_common(scen, a);
  scen->add_option("kind", scenario_kind, "A | B | C")->required();
  scen->add_option("--sweep", sweep, "override the sweep values");

  auto* exp =
      app.add_subcommand("export-lp", "write the instance in LP format");
  add_common(exp, a);
  exp->add_option("--lp-out", lp_out, "output LP file");

  auto* sim = app.add_subcommand("simulate-esd",
                                 "greedy solar/battery dispatch for one node");
  add_common(sim, a);
  sim->add_option("--node", esd_node, "node id (default 1)");
  sim->add_option("--csv-out", esd_out, "write CSV here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(a, lp_in);
    if (scen->parsed()) return cmd_scenario(a, scenario_kind, sweep);
    if (exp->parsed()) return cmd_export_lp(a, lp_out);
    if (sim->parsed()) return cmd_simulate_esd(a, esd_node, esd_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
