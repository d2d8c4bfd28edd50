// Acceptance suite: one check per release criterion, each printed as a
// single PASS/FAIL line. Returns a nonzero exit code when any check fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fogcache/energy.hpp"
#include "fogcache/lp_format.hpp"
#include "fogcache/milp.hpp"
#include "fogcache/power.hpp"
#include "fogcache/scenarios.hpp"
#include "fogcache/solver.hpp"
#include "fogcache/topology.hpp"
#include "fogcache/traces.hpp"
#include "oracles.hpp"

using namespace fogcache;
using Clock = std::chrono::steady_clock;

namespace {

struct Harness {
  int failures = 0;

  void report(int id, const std::string& name, bool pass,
              const std::string& detail) {
    std::printf("[%s] %d. %s — %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    if (!pass) ++failures;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

solver::SolverOptions sweep_options() {
  solver::SolverOptions opts;
  // pseudo-cost branching keeps the day-coupled battery sweeps fast
  opts.branching = solver::SolverOptions::Branching::PseudoCost;
  return opts;
}

struct World {
  netmodel::Topology topo = netmodel::build_nsfnet();
  netmodel::PathTable paths = netmodel::shortest_paths(topo);
  Config cfg;  // desk defaults
};

// ---------------------------------------------------------------- 1
void regime_reproduction(Harness& h, World& w) {
  timeseries::HourlyTraces tr;
  tr.horizon_hours = 24;
  tr.demand_gbps = timeseries::synth_demand(w.topo, 80, "flat");
  tr.irradiance_w_m2 = Eigen::MatrixXd::Zero(14, 24);

  auto fog_cells = [&](double pue) {
    Config c = w.cfg;
    c.power.pue_fog = pue;
    c.pv.area_m2 = 0;
    auto t0 = Clock::now();
    auto pt = scenarios::solve_point(w.topo, w.paths, c, tr, {},
                                     scenarios::ForceDelivery::None,
                                     sweep_options(), pue);
    double secs = seconds_since(t0);
    std::map<std::string, double> val(pt.assignment.begin(),
                                      pt.assignment.end());
    int full = 0, empty = 0;
    for (int ni = 0; ni < 14; ++ni)
      for (int t = 0; t < 24; ++t) {
        double f = val[milp::names::f_fog(w.topo.nodes[ni], t)];
        double d = tr.demand_gbps(ni, t);
        if (std::fabs(f - d) <= 1e-6) ++full;
        if (std::fabs(f) <= 1e-6) ++empty;
      }
    return std::tuple<int, int, double, solver::Status>(full, empty, secs,
                                                        pt.status);
  };

  auto [full_lo, empty_lo, secs_lo, st_lo] = fog_cells(1.10);
  auto [full_hi, empty_hi, secs_hi, st_hi] = fog_cells(1.25);
  bool pass = st_lo == solver::Status::Optimal &&
              st_hi == solver::Status::Optimal && full_lo == 336 &&
              empty_hi == 336 && secs_lo <= 60.0 && secs_hi <= 60.0;
  h.report(1, "delivery regimes at PUE 1.10 / 1.25", pass,
           fmt("fog-served cells %d/336 at 1.10, cloud-served %d/336 at 1.25, "
               "%.1fs + %.1fs (limit 60s each)",
               full_lo, empty_hi, secs_lo, secs_hi));
}

// ---------------------------------------------------------------- 2
void transport_saving(Harness& h, World& w) {
  timeseries::HourlyTraces tr;
  tr.horizon_hours = 24;
  tr.demand_gbps = timeseries::synth_demand(w.topo, 80, "flat");
  tr.irradiance_w_m2 = Eigen::MatrixXd::Zero(14, 24);
  auto fog = scenarios::solve_point(w.topo, w.paths, w.cfg, tr, {},
                                    scenarios::ForceDelivery::AllFog,
                                    sweep_options());
  auto cdc = scenarios::solve_point(w.topo, w.paths, w.cfg, tr, {},
                                    scenarios::ForceDelivery::AllCloud,
                                    sweep_options());
  auto ts = scenarios::transport_saving_fraction(fog, cdc);
  bool pass = fog.status == solver::Status::Optimal &&
              cdc.status == solver::Status::Optimal && ts.has_value();
  double identity_err = 1.0, value = 0.0;
  if (pass) {
    value = *ts;
    identity_err = std::fabs(*ts - (1.0 - cdc.olt_kwh / cdc.transport_kwh()));
    pass = identity_err <= 1e-9 && value > 0.0 && value < 1.0;
  }
  h.report(2, "transport-saving identity", pass,
           fmt("fog delivery avoids %.2f%% of the all-cloud transport energy; "
               "identity error %.2e (tol 1e-9)",
               value * 100.0, identity_err));
}

// ---------------------------------------------------------------- 3
void solar_monotonicity(Harness& h, World& w) {
  timeseries::HourlyTraces tr;
  tr.horizon_hours = 24;
  tr.demand_gbps = timeseries::synth_demand(w.topo, 80, "flat");
  tr.irradiance_w_m2 = timeseries::synth_irradiance(w.topo, 1000);
  scenarios::ScenarioSpec spec;
  spec.kind = scenarios::ScenarioKind::B;
  spec.sweep = {0, 50, 100, 150, 200, 250};
  auto rep = scenarios::run_scenario(spec, w.topo, w.cfg, tr, sweep_options());
  bool pass = rep.points.size() == 6;
  std::string curve;
  bool saturated = false;
  double sav50 = 0, sav250 = 0;
  for (size_t i = 0; i < rep.points.size() && pass; ++i) {
    const auto& pt = rep.points[i];
    pass = pt.status == solver::Status::Optimal;
    curve += fmt("%s%.1f", i ? " " : "", pt.total_brown_kwh);
    if (pt.sweep_value == 50) sav50 = pt.saving_vs_baseline;
    if (pt.sweep_value == 250) sav250 = pt.saving_vs_baseline;
    if (i == 0 || !pass) continue;
    double drop = rep.points[i - 1].total_brown_kwh - pt.total_brown_kwh;
    if (!saturated) {
      if (std::fabs(drop) <= 1e-6)
        saturated = true;  // flat from here on
      else
        pass = drop > 1e-6;  // strictly decreasing until saturation
    } else {
      pass = std::fabs(drop) <= 1e-6;  // constant once saturated
    }
  }
  if (pass) pass = sav250 > sav50 + 1e-6;
  h.report(3, "solar-size sweep decreases then saturates", pass,
           fmt("brown kWh/day: %s; saving %.1f%% at 50 m2 vs %.1f%% at 250 m2",
               curve.c_str(), sav50 * 100.0, sav250 * 100.0));
}

// ---------------------------------------------------------------- 4
void storage_incrementality(Harness& h, World& w) {
  timeseries::HourlyTraces tr;
  tr.horizon_hours = 24;
  tr.demand_gbps = timeseries::synth_demand(w.topo, 80, "diurnal");
  tr.irradiance_w_m2 = timeseries::synth_irradiance(w.topo, 1000);
  scenarios::ScenarioSpec spec;
  spec.kind = scenarios::ScenarioKind::C;
  spec.sweep = {0, 20, 50};
  auto t0 = Clock::now();
  auto rep = scenarios::run_scenario(spec, w.topo, w.cfg, tr, sweep_options());
  double secs = seconds_since(t0);
  bool pass = rep.points.size() == 3 && secs <= 120.0;
  for (const auto& pt : rep.points)
    pass = pass && pt.status == solver::Status::Optimal;
  double b0 = 0, b20 = 0, b50 = 0;
  if (pass) {
    b0 = rep.points[0].total_brown_kwh;
    b20 = rep.points[1].total_brown_kwh;
    b50 = rep.points[2].total_brown_kwh;
    pass = b20 <= b0 + 1e-6 && b50 <= b20 + 1e-6 && b50 < b0 - 1e-6;
  }
  h.report(4, "battery capacity never hurts and 50 kWh strictly helps", pass,
           fmt("brown kWh/day: %.2f (none) %.2f (20 kWh) %.2f (50 kWh), "
               "sweep %.1fs (limit 120s)",
               b0, b20, b50, secs));
}

// ---------------------------------------------------------------- 5
void solver_cross_check(Harness& h) {
  auto t0 = Clock::now();
  std::mt19937 rng(160914);
  int agreed = 0, feasible = 0, verified = 0, duality_ok = 0;
  const int total = 200;
  bool pass = true;
  for (int rep = 0; rep < total && pass; ++rep) {
    milp::MilpProblem p = oracles::random_mip(rng, 12);
    auto mip = solver::solve_mip(p);
    auto oracle = solver::enumerate_oracle(p, 16);
    if (mip.status != oracle.status) {
      pass = false;
      break;
    }
    ++agreed;
    if (mip.status != solver::Status::Optimal) continue;
    ++feasible;
    if (std::fabs(mip.objective - oracle.objective) >
        1e-6 * std::max(1.0, std::fabs(oracle.objective))) {
      pass = false;
      break;
    }
    auto lp = solver::solve_lp(p);
    if (lp.status == solver::Status::Optimal &&
        lp.objective <= mip.objective + 1e-7)
      ++duality_ok;
    else
      pass = false;
    auto chk = solver::check_solution(p, mip.values);
    if (chk.feasible && chk.integral)
      ++verified;
    else
      pass = false;
  }
  double secs = seconds_since(t0);
  pass = pass && agreed == total && secs <= 300.0;
  h.report(5, "branch-and-bound matches exhaustive enumeration", pass,
           fmt("%d/%d statuses agreed, %d optima matched within 1e-6, "
               "%d verified, %d duality checks, %.1fs (limit 300s)",
               agreed, total, feasible, verified, duality_ok, secs));
}

// ---------------------------------------------------------------- 6
void storage_dynamics(Harness& h) {
  std::mt19937 rng(60914);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool bounds_ok = true, rebuild_ok = true;
  const int sequences = 10000;
  for (int rep = 0; rep < sequences; ++rep) {
    energy::EsdConfig cfg;
    cfg.e_max_kwh = 1.0 + 49.0 * u(rng);
    cfg.eta_charge = 0.5 + 0.5 * u(rng);
    cfg.eta_discharge = 0.5 + 0.5 * u(rng);
    cfg.self_discharge_per_day = 0.05 * u(rng);
    double decay = energy::hourly_decay(cfg.self_discharge_per_day);
    energy::EsdState s{u(rng) * cfg.e_max_kwh};
    double soc0 = s.soc_kwh;
    std::vector<double> cs, ds;
    for (int hstep = 0; hstep < 24; ++hstep) {
      double carried = decay * s.soc_kwh;
      double c = u(rng) * (cfg.e_max_kwh - carried) / cfg.eta_charge;
      double d = u(rng) * (carried + cfg.eta_charge * c);
      auto r = energy::esd_step(s, cfg, c, d);
      if (r.state.soc_kwh < 0 || r.state.soc_kwh > cfg.e_max_kwh)
        bounds_ok = false;
      cs.push_back(c);
      ds.push_back(d);
      s = r.state;
    }
    double soc = soc0;
    for (size_t k = 0; k < cs.size(); ++k)
      soc = decay * soc + cfg.eta_charge * cs[k] - ds[k];
    if (std::fabs(soc - s.soc_kwh) > 1e-9) rebuild_ok = false;
  }
  double decay_err = std::fabs(energy::hourly_decay(0.03) - 0.998731);

  // lossless conservation with unit efficiencies
  energy::EsdConfig unit;
  unit.eta_charge = 1.0;
  unit.eta_discharge = 1.0;
  unit.self_discharge_per_day = 0.0;
  unit.e_max_kwh = 40;
  energy::EsdState s{5.0};
  double charged = 0, delivered = 0;
  for (int k = 0; k < 500; ++k) {
    double c = u(rng) * (unit.e_max_kwh - s.soc_kwh);
    double d = u(rng) * (s.soc_kwh + c);
    auto r = energy::esd_step(s, unit, c, d);
    charged += c;
    delivered += r.delivered_kwh;
    s = r.state;
  }
  double conservation_err =
      std::fabs(delivered + s.soc_kwh - (5.0 + charged)) /
      std::max(1.0, charged);

  bool pass = bounds_ok && rebuild_ok && decay_err <= 1e-6 &&
              conservation_err <= 1e-9;
  h.report(6, "storage dynamics over 10000 random sequences", pass,
           fmt("bounds %s, rebuild %s (tol 1e-9), decay error %.1e (tol 1e-6), "
               "unit-efficiency conservation error %.1e",
               bounds_ok ? "held" : "violated",
               rebuild_ok ? "exact" : "drifted", decay_err, conservation_err));
}

// ---------------------------------------------------------------- 7
void serialization(Harness& h, World& w) {
  timeseries::HourlyTraces tr;
  tr.horizon_hours = 24;
  tr.demand_gbps = timeseries::synth_demand(w.topo, 80, "diurnal");
  tr.irradiance_w_m2 = timeseries::synth_irradiance(w.topo, 1000);
  Config c = w.cfg;
  c.pv.area_m2 = 250;
  c.esd.e_max_kwh = 50;
  milp::ScenarioFlags flags;
  flags.cdc_renewable = true;
  flags.esd_enabled = true;
  auto p = milp::build_problem(w.topo, w.paths, c.power, tr, c.pv, c.esd,
                               flags, 0);
  std::string one = milp::write_lp_string(p);
  std::string two = milp::write_lp_string(p);
  bool stable = one == two;
  bool round = false;
  std::string detail;
  try {
    auto q = milp::parse_lp_string(one);
    round = milp::structurally_equal(p, q);
    detail = fmt("%zu variables, %zu rows, %zu bytes; byte-stable %s, "
                 "round-trip %s",
                 p.variables.size(), p.constraints.size(), one.size(),
                 stable ? "yes" : "no", round ? "exact" : "mismatch");
  } catch (const std::exception& e) {
    detail = e.what();
  }
  h.report(7, "LP text export/parse round-trip", stable && round, detail);
}

// ---------------------------------------------------------------- 8
void power_formulas(Harness& h) {
  netmodel::PowerConfig cfg;
  double dc = netmodel::dc_it_power_w(cfg, 1.8, 1.1);
  // Direct product of the configured values is 1.1*1.3*221.1*1.8 = 569.1114 W;
  // the 875.93 reference figure cannot be reproduced from them, so this
  // sub-check is expected to fail and is kept as stated.
  bool dc_ok = std::fabs(dc - 875.93) <= 0.01;
  bool olt_ok = netmodel::olt_power_w(cfg, 160) == 904.0;
  bool metro_ok = netmodel::metro_power_w(cfg, 40) == 100.0 &&
                  netmodel::metro_power_w(cfg, 41) == 200.0;
  bool servers_ok = netmodel::fdc_server_count(cfg, 160) == 89;
  bool pass = dc_ok && olt_ok && metro_ok && servers_ok;
  h.report(8, "device power formulas", pass,
           fmt("dc_it_power(1.8,1.1)=%.4f vs 875.93+/-0.01 %s; olt(160)=%s; "
               "metro 40/41 Gbps=%s; servers(160)=%s",
               dc, dc_ok ? "ok" : "FAILED", olt_ok ? "904" : "wrong",
               metro_ok ? "100/200" : "wrong", servers_ok ? "89" : "wrong"));
}

}  // namespace

int main() {
  Harness h;
  World w;
  std::printf("fogcache acceptance suite\n");
  regime_reproduction(h, w);
  transport_saving(h, w);
  solar_monotonicity(h, w);
  storage_incrementality(h, w);
  solver_cross_check(h);
  storage_dynamics(h);
  serialization(h, w);
  power_formulas(h);
  std::printf("%d of 8 criteria passed\n", 8 - h.failures);
  return h.failures == 0 ? 0 : 1;
}
