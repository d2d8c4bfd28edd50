#include "fogcache/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include "fogcache/milp.hpp"
#include "fogcache/numeric.hpp"

namespace fogcache::scenarios {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

ScenarioKind kind_from_string(const std::string& s) {
  if (s == "A" || s == "a") return ScenarioKind::A;
  if (s == "B" || s == "b") return ScenarioKind::B;
  if (s == "C" || s == "c") return ScenarioKind::C;
  throw std::invalid_argument("unknown scenario '" + s + "' (expected A, B or C)");
}

std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::A: return "A";
    case ScenarioKind::B: return "B";
    default: return "C";
  }
}

ScenarioSpec ScenarioSpec::defaults(ScenarioKind k) {
  ScenarioSpec s;
  s.kind = k;
  switch (k) {
    case ScenarioKind::A: s.sweep = {1.25, 1.20, 1.15, 1.10}; break;
    case ScenarioKind::B: s.sweep = {50, 100, 150, 200, 250}; break;
    case ScenarioKind::C: s.sweep = {20, 30, 40, 50}; break;
  }
  return s;
}

namespace {

// Clamps a family of flow variables to zero by upper bound, for the forced
// baseline runs.
void clamp_prefix_to_zero(milp::MilpProblem& p, const std::string& prefix) {
  for (auto& v : p.variables)
    if (v.name.rfind(prefix, 0) == 0) v.upper = 0.0;
}

}  // namespace

SweepPoint solve_point(const netmodel::Topology& topo,
                       const netmodel::PathTable& paths, const Config& cfg,
                       const timeseries::HourlyTraces& traces,
                       const milp::ScenarioFlags& flags, ForceDelivery force,
                       const solver::SolverOptions& opts, double sweep_value) {
  milp::MilpProblem p = milp::build_problem(topo, paths, cfg.power, traces,
                                            cfg.pv, cfg.esd, flags,
                                            cfg.soc_init_kwh);
  if (force == ForceDelivery::AllCloud) clamp_prefix_to_zero(p, "f_fog(");
  if (force == ForceDelivery::AllFog) clamp_prefix_to_zero(p, "f_cld(");

  solver::Solution sol = solver::solve_mip(p, opts);

  SweepPoint pt;
  pt.sweep_value = sweep_value;
  pt.status = sol.status;
  pt.stats = sol.stats;
  pt.saving_vs_baseline = kNaN;

  const int n_nodes = topo.node_count();
  const int horizon = traces.horizon_hours;
  pt.node_ids = topo.nodes;
  pt.core_nh = Eigen::MatrixXd::Zero(n_nodes, horizon);
  pt.metro_nh = Eigen::MatrixXd::Zero(n_nodes, horizon);
  pt.olt_nh = Eigen::MatrixXd::Zero(n_nodes, horizon);
  pt.fdc_brown_nh = Eigen::MatrixXd::Zero(n_nodes, horizon);
  pt.cdc_brown_nh = Eigen::MatrixXd::Zero(n_nodes, horizon);
  pt.cdc_green_nh = Eigen::MatrixXd::Zero(n_nodes, horizon);

  if (sol.status != solver::Status::Optimal &&
      sol.status != solver::Status::IterationLimit)
    return pt;

  const auto& power = cfg.power;
  const double p_srv_kw = power.p_server_w_per_gbps / 1000.0;
  const double cld_kw_per_gbps =
      power.pue_cloud * power.net_overhead_ratio * p_srv_kw;
  const double metro_pair_kw =
      power.p_metro_port_w * power.metro_redundancy / 1000.0;
  const double olt_kw = power.p_olt_w / 1000.0;

  std::map<std::pair<int, int>, double> kappa_kw;
  for (int c : topo.cdc_nodes)
    for (int n : topo.nodes)
      kappa_kw[{c, n}] = netmodel::core_pair_power_per_wavelength_w(
                             power, paths.path(c, n),
                             !flags.exact_edfa_fibers) /
                         1000.0;

  double fog_gbps = 0.0, demand_gbps = 0.0;
  for (int ni = 0; ni < n_nodes; ++ni) {
    const int n = topo.nodes[ni];
    for (int t = 0; t < horizon; ++t) {
      double f_fog = sol.value_of(p, milp::names::f_fog(n, t));
      fog_gbps += f_fog;
      demand_gbps += traces.demand_gbps(ni, t);
      double cld = 0.0;
      for (int c : topo.cdc_nodes) {
        double f = sol.value_of(p, milp::names::f_cld(n, c, t));
        cld += f;
        pt.core_nh(ni, t) += kappa_kw[{c, n}] *
                             sol.value_of(p, milp::names::wavelengths(n, c, t));
      }
      pt.metro_nh(ni, t) =
          metro_pair_kw * sol.value_of(p, milp::names::metro_units(n, t));
      pt.olt_nh(ni, t) = olt_kw * sol.value_of(p, milp::names::olt_units(n, t));
      pt.fdc_brown_nh(ni, t) = sol.value_of(p, milp::names::fog_brown(n, t));
      double cdc_kwh = cld_kw_per_gbps * cld;
      if (flags.cdc_renewable)
        pt.cdc_green_nh(ni, t) = cdc_kwh;
      else
        pt.cdc_brown_nh(ni, t) = cdc_kwh;
      pt.solar_direct_kwh += sol.value_of(p, milp::names::solar_direct(n, t));
      pt.solar_charged_kwh += sol.value_of(p, milp::names::solar_charge(n, t));
      pt.solar_delivered_kwh +=
          cfg.esd.eta_discharge * sol.value_of(p, milp::names::discharge(n, t));
    }
  }
  if (flags.exact_edfa_fibers) {
    for (const auto& l : topo.links) {
      double edfa_kw = power.p_edfa_w *
                       netmodel::edfas_on_link(l.length_km, power.span_km) /
                       1000.0;
      int ni = topo.index_of(l.a);  // link power booked at the lower endpoint
      for (int t = 0; t < horizon; ++t)
        pt.core_nh(ni, t) +=
            edfa_kw * sol.value_of(p, milp::names::fibers(l.a, l.b, t));
    }
  }

  pt.core_kwh = pt.core_nh.sum();
  pt.metro_kwh = pt.metro_nh.sum();
  pt.olt_kwh = pt.olt_nh.sum();
  pt.fdc_brown_kwh = pt.fdc_brown_nh.sum();
  pt.cdc_brown_kwh = pt.cdc_brown_nh.sum();
  pt.cdc_green_kwh = pt.cdc_green_nh.sum();
  pt.total_brown_kwh = pt.core_kwh + pt.metro_kwh + pt.olt_kwh +
                       pt.fdc_brown_kwh + pt.cdc_brown_kwh;
  pt.fog_fraction = demand_gbps > 0 ? fog_gbps / demand_gbps : kNaN;

  pt.assignment.reserve(p.variables.size());
  for (size_t j = 0; j < p.variables.size(); ++j)
    pt.assignment.push_back({p.variables[j].name, sol.values[j]});
  std::sort(pt.assignment.begin(), pt.assignment.end());
  return pt;
}

ScenarioReport run_scenario(const ScenarioSpec& spec,
                            const netmodel::Topology& topo, const Config& cfg,
                            const timeseries::HourlyTraces& traces,
                            const solver::SolverOptions& opts) {
  if (spec.sweep.empty())
    return {spec.kind, 0.0, "empty sweep", {}};
  netmodel::PathTable paths = netmodel::shortest_paths(topo);

  ScenarioReport rep;
  rep.kind = spec.kind;

  auto brown_case = [&](double pue_fog, double area, double e_max,
                        bool renewable_cdc, ForceDelivery force,
                        double sweep_value) {
    Config c = cfg;
    c.power.pue_fog = pue_fog;
    c.pv.area_m2 = area;
    c.esd.e_max_kwh = e_max;
    milp::ScenarioFlags flags;
    flags.cdc_renewable = renewable_cdc;
    flags.esd_enabled = e_max > 0;
    return solve_point(topo, paths, c, traces, flags, force, opts,
                       sweep_value);
  };

  switch (spec.kind) {
    case ScenarioKind::A: {
      SweepPoint base = brown_case(cfg.power.pue_fog, 0, 0, false,
                                   ForceDelivery::AllCloud, 0);
      rep.baseline_kwh = base.total_brown_kwh;
      rep.baseline_desc = "forced all-cloud delivery, brown-powered CDCs";
      for (double pue : spec.sweep)
        rep.points.push_back(
            brown_case(pue, 0, 0, false, ForceDelivery::None, pue));
      break;
    }
    case ScenarioKind::B: {
      SweepPoint base =
          brown_case(1.1, 0, 0, false, ForceDelivery::AllCloud, 0);
      rep.baseline_kwh = base.transport_kwh();
      rep.baseline_desc = "all-cloud transport energy, brown-powered case";
      for (double area : spec.sweep)
        rep.points.push_back(
            brown_case(1.1, area, 0, true, ForceDelivery::None, area));
      break;
    }
    case ScenarioKind::C: {
      SweepPoint base =
          brown_case(1.1, 250, 0, true, ForceDelivery::None, 0);
      rep.baseline_kwh = base.total_brown_kwh;
      rep.baseline_desc = "no-battery optimum at 250 m2";
      for (double emax : spec.sweep)
        rep.points.push_back(
            brown_case(1.1, 250, emax, true, ForceDelivery::None, emax));
      break;
    }
  }
  for (SweepPoint& pt : rep.points) {
    if (pt.status == solver::Status::Optimal && rep.baseline_kwh > 0)
      pt.saving_vs_baseline =
          (rep.baseline_kwh - pt.total_brown_kwh) / rep.baseline_kwh;
  }
  return rep;
}

std::optional<double> transport_saving_fraction(const SweepPoint& full_fog,
                                                const SweepPoint& full_cdc) {
  double base = full_cdc.transport_kwh();
  if (!(base > 0)) return std::nullopt;
  return 1.0 - full_fog.transport_kwh() / base;
}

double fog_breakeven_pue(const netmodel::PowerConfig& power,
                         const netmodel::Topology& topo,
                         const netmodel::PathTable& paths) {
  const double p_srv_kw = power.p_server_w_per_gbps / 1000.0;
  const double it_rate = power.net_overhead_ratio * p_srv_kw;  // kW per Gbps
  const double metro_marginal = power.p_metro_port_w * power.metro_redundancy /
                                1000.0 / power.metro_port_gbps;
  double worst = 0.0;
  for (int n : topo.nodes) {
    double best_cloud = std::numeric_limits<double>::infinity();
    for (int c : topo.cdc_nodes) {
      double kappa_kw = netmodel::core_pair_power_per_wavelength_w(
                            power, paths.path(c, n), true) /
                        1000.0;
      best_cloud =
          std::min(best_cloud, kappa_kw / power.line_rate_gbps + metro_marginal);
    }
    worst = std::max(worst, best_cloud);
  }
  return power.pue_cloud + worst / it_rate;
}

namespace {

const char* kSubsystems[] = {"core",      "metro",     "olt",
                             "fdc_brown", "cdc_brown", "cdc_green"};

const Eigen::MatrixXd& subsystem_matrix(const SweepPoint& pt, int s) {
  switch (s) {
    case 0: return pt.core_nh;
    case 1: return pt.metro_nh;
    case 2: return pt.olt_nh;
    case 3: return pt.fdc_brown_nh;
    case 4: return pt.cdc_brown_nh;
    default: return pt.cdc_green_nh;
  }
}

std::string svg_chart(const ScenarioReport& rep) {
  const double width = 640, height = 420;
  const double left = 80, right = 610, top = 50, bottom = 370;
  double ymax = 0;
  for (const auto& pt : rep.points)
    if (pt.status == solver::Status::Optimal)
      ymax = std::max(ymax, pt.total_brown_kwh);
  if (!(ymax > 0)) ymax = 1.0;

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
       format_double(width) + "\" height=\"" + format_double(height) +
       "\" viewBox=\"0 0 " + format_double(width) + " " +
       format_double(height) + "\">\n";
  s += "<rect width=\"" + format_double(width) + "\" height=\"" +
       format_double(height) + "\" fill=\"white\"/>\n";
  s += "<text x=\"320\" y=\"28\" text-anchor=\"middle\" "
       "font-family=\"sans-serif\" font-size=\"16\">Scenario " +
       to_string(rep.kind) + ": brown energy per day (kWh)</text>\n";
  // axes
  s += "<line x1=\"" + format_double(left) + "\" y1=\"" +
       format_double(bottom) + "\" x2=\"" + format_double(right) +
       "\" y2=\"" + format_double(bottom) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + format_double(left) + "\" y1=\"" +
       format_double(bottom) + "\" x2=\"" + format_double(left) + "\" y2=\"" +
       format_double(top) + "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    double v = ymax * k / 4.0;
    double y = bottom - (bottom - top) * k / 4.0;
    s += "<line x1=\"" + format_double(left - 4) + "\" y1=\"" +
         format_double(y) + "\" x2=\"" + format_double(left) + "\" y2=\"" +
         format_double(y) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + format_double(left - 8) + "\" y=\"" +
         format_double(y + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" "
         "font-size=\"11\">" +
         format_double(v) + "</text>\n";
  }
  const size_t k = rep.points.size();
  if (k > 0) {
    double slot = (right - left) / static_cast<double>(k);
    double bar_w = slot * 0.6;
    for (size_t i = 0; i < k; ++i) {
      const SweepPoint& pt = rep.points[i];
      double x = left + slot * i + (slot - bar_w) / 2.0;
      if (pt.status == solver::Status::Optimal) {
        double h = (bottom - top) * pt.total_brown_kwh / ymax;
        s += "<rect x=\"" + format_double(x) + "\" y=\"" +
             format_double(bottom - h) + "\" width=\"" + format_double(bar_w) +
             "\" height=\"" + format_double(h) +
             "\" fill=\"#4878a8\" stroke=\"black\"/>\n";
        s += "<text x=\"" + format_double(x + bar_w / 2.0) + "\" y=\"" +
             format_double(bottom - h - 6) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"10\">" +
             format_double(pt.total_brown_kwh) + "</text>\n";
      } else {
        s += "<text x=\"" + format_double(x + bar_w / 2.0) + "\" y=\"" +
             format_double(bottom - 10) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"10\">" +
             solver::to_string(pt.status) + "</text>\n";
      }
      s += "<text x=\"" + format_double(x + bar_w / 2.0) + "\" y=\"" +
           format_double(bottom + 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" +
           format_double(pt.sweep_value) + "</text>\n";
    }
  }
  s += "<text x=\"345\" y=\"404\" text-anchor=\"middle\" "
       "font-family=\"sans-serif\" font-size=\"12\">" +
       std::string(rep.kind == ScenarioKind::A   ? "fog PUE"
                   : rep.kind == ScenarioKind::B ? "solar cell size (m2)"
                                                 : "battery capacity (kWh)") +
       "</text>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace

void emit_report(const ScenarioReport& rep, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
    if (!f)
      throw std::runtime_error("cannot write report file: " + name);
    return f;
  };

  {
    auto f = open("summary.csv");
    f << "sweep_value,status,total_brown_kwh,core_kwh,metro_kwh,olt_kwh,"
         "fdc_brown_kwh,cdc_brown_kwh,cdc_green_kwh,solar_direct_kwh,"
         "solar_charged_kwh,solar_delivered_kwh,fog_fraction,"
         "saving_vs_baseline\n";
    for (const auto& pt : rep.points) {
      f << format_double(pt.sweep_value) << ',' << solver::to_string(pt.status)
        << ',' << format_double(pt.total_brown_kwh) << ','
        << format_double(pt.core_kwh) << ',' << format_double(pt.metro_kwh)
        << ',' << format_double(pt.olt_kwh) << ','
        << format_double(pt.fdc_brown_kwh) << ','
        << format_double(pt.cdc_brown_kwh) << ','
        << format_double(pt.cdc_green_kwh) << ','
        << format_double(pt.solar_direct_kwh) << ','
        << format_double(pt.solar_charged_kwh) << ','
        << format_double(pt.solar_delivered_kwh) << ','
        << format_double(pt.fog_fraction) << ','
        << format_double(pt.saving_vs_baseline) << '\n';
    }
  }
  {
    auto f = open("breakdown.csv");
    f << "sweep_value,node,hour,subsystem,kwh\n";
    for (const auto& pt : rep.points) {
      if (pt.core_nh.size() == 0) continue;
      for (int ni = 0; ni < pt.core_nh.rows(); ++ni)
        for (int t = 0; t < pt.core_nh.cols(); ++t)
          for (int s = 0; s < 6; ++s)
            f << format_double(pt.sweep_value) << ',' << pt.node_ids[ni] << ','
              << t << ',' << kSubsystems[s] << ','
              << format_double(subsystem_matrix(pt, s)(ni, t)) << '\n';
    }
  }
  {
    auto f = open("solution.csv");
    f << "sweep_value,variable,value\n";
    for (const auto& pt : rep.points)
      for (const auto& [name, value] : pt.assignment)
        f << format_double(pt.sweep_value) << ',' << name << ','
          << format_double(value) << '\n';
  }
  {
    auto f = open("scenario_" + to_string(rep.kind) + ".svg");
    f << svg_chart(rep);
  }
}

}  // namespace fogcache::scenarios
