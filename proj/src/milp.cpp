#include "fogcache/milp.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "fogcache/energy.hpp"

namespace fogcache::milp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int MilpProblem::add_variable(const std::string& name, VarKind kind,
                              double lower, double upper) {
  int idx = static_cast<int>(variables.size());
  if (!index_.emplace(name, idx).second)
    throw std::invalid_argument("duplicate variable name: " + name);
  variables.push_back({name, kind, lower, upper});
  return idx;
}

void MilpProblem::add_constraint(std::string name, std::vector<Term> terms,
                                 Relation rel, double rhs) {
  constraints.push_back({std::move(name), std::move(terms), rel, rhs});
}

int MilpProblem::find_variable(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

int MilpProblem::num_integer() const {
  int k = 0;
  for (const auto& v : variables)
    if (v.kind == VarKind::Integer) ++k;
  return k;
}

void validate(const MilpProblem& p) {
  std::set<std::string> names;
  for (const auto& v : p.variables) {
    if (v.name.empty())
      throw std::invalid_argument("problem: empty variable name");
    if (!names.insert(v.name).second)
      throw std::invalid_argument("problem: duplicate variable '" + v.name +
                                  "'");
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper)
      throw std::invalid_argument("problem: bad bounds on '" + v.name + "'");
  }
  auto check_terms = [&](const std::vector<Term>& ts, const std::string& where) {
    for (const Term& t : ts) {
      if (t.var < 0 || t.var >= static_cast<int>(p.variables.size()))
        throw std::invalid_argument("problem: " + where +
                                    " references an undeclared variable");
      if (!std::isfinite(t.coeff))
        throw std::invalid_argument("problem: non-finite coefficient in " +
                                    where);
    }
  };
  check_terms(p.objective, "objective");
  for (const auto& c : p.constraints) {
    check_terms(c.terms, "constraint '" + c.name + "'");
    if (!std::isfinite(c.rhs))
      throw std::invalid_argument("problem: non-finite rhs in '" + c.name +
                                  "'");
  }
}

namespace {

std::map<std::string, double> term_map(const MilpProblem& p,
                                       const std::vector<Term>& ts) {
  std::map<std::string, double> m;
  for (const Term& t : ts) {
    double& v = m[p.variables[t.var].name];
    v += t.coeff;
    if (v == 0.0) m.erase(p.variables[t.var].name);
  }
  return m;
}

}  // namespace

bool structurally_equal(const MilpProblem& a, const MilpProblem& b) {
  if (a.variables.size() != b.variables.size()) return false;
  std::map<std::string, const Variable*> bv;
  for (const auto& v : b.variables) bv[v.name] = &v;
  for (const auto& v : a.variables) {
    auto it = bv.find(v.name);
    if (it == bv.end()) return false;
    const Variable& w = *it->second;
    if (v.kind != w.kind || v.lower != w.lower || v.upper != w.upper)
      return false;
  }
  if (a.constraints.size() != b.constraints.size()) return false;
  for (size_t i = 0; i < a.constraints.size(); ++i) {
    const auto& ca = a.constraints[i];
    const auto& cb = b.constraints[i];
    if (ca.name != cb.name || ca.rel != cb.rel || ca.rhs != cb.rhs)
      return false;
    if (term_map(a, ca.terms) != term_map(b, cb.terms)) return false;
  }
  return term_map(a, a.objective) == term_map(b, b.objective);
}

namespace names {

namespace {
std::string idx2(const char* base, int i, int j) {
  return std::string(base) + "(" + std::to_string(i) + "," +
         std::to_string(j) + ")";
}
std::string idx3(const char* base, int i, int j, int k) {
  return std::string(base) + "(" + std::to_string(i) + "," +
         std::to_string(j) + "," + std::to_string(k) + ")";
}
}  // namespace

std::string f_fog(int n, int t) { return idx2("f_fog", n, t); }
std::string f_cld(int n, int c, int t) { return idx3("f_cld", n, c, t); }
std::string wavelengths(int n, int c, int t) { return idx3("lam", n, c, t); }
std::string metro_units(int n, int t) { return idx2("m", n, t); }
std::string olt_units(int n, int t) { return idx2("o", n, t); }
std::string solar_direct(int n, int t) { return idx2("g_dir", n, t); }
std::string solar_charge(int n, int t) { return idx2("g_chg", n, t); }
std::string discharge(int n, int t) { return idx2("dis", n, t); }
std::string soc(int n, int t) { return idx2("soc", n, t); }
std::string fog_brown(int n, int t) { return idx2("b_fog", n, t); }
std::string fibers(int a, int b, int t) { return idx3("fib", a, b, t); }

}  // namespace names

MilpProblem build_problem(const netmodel::Topology& topo,
                          const netmodel::PathTable& paths,
                          const netmodel::PowerConfig& power,
                          const timeseries::HourlyTraces& traces,
                          const energy::PvConfig& pv,
                          const energy::EsdConfig& esd,
                          const ScenarioFlags& flags, double soc_init_kwh) {
  netmodel::validate(topo);
  netmodel::validate(power);
  energy::validate(pv);
  energy::validate(esd);
  if (flags.esd_enabled && !(esd.e_max_kwh > 0))
    throw std::invalid_argument("build_problem: ESD enabled with e_max = 0");
  if (soc_init_kwh < 0 ||
      (flags.esd_enabled && soc_init_kwh > esd.e_max_kwh))
    throw std::invalid_argument("build_problem: soc_init outside [0, e_max]");

  const int n_nodes = topo.node_count();
  const int horizon = traces.horizon_hours;
  if (traces.demand_gbps.rows() != n_nodes ||
      traces.demand_gbps.cols() != horizon ||
      traces.irradiance_w_m2.rows() != n_nodes ||
      traces.irradiance_w_m2.cols() != horizon)
    throw std::invalid_argument(
        "build_problem: trace dimensions do not match topology/horizon");
  if (traces.demand_gbps.minCoeff() < 0 ||
      traces.irradiance_w_m2.minCoeff() < 0)
    throw std::invalid_argument("build_problem: negative trace entries");

  const auto& clouds = topo.cdc_nodes;
  const double p_srv_kw = power.p_server_w_per_gbps / 1000.0;
  const double fog_kw_per_gbps =
      power.pue_fog * power.net_overhead_ratio * p_srv_kw;
  const double cld_kw_per_gbps =
      power.pue_cloud * power.net_overhead_ratio * p_srv_kw;
  const double metro_pair_kw =
      power.p_metro_port_w * power.metro_redundancy / 1000.0;
  const double olt_kw = power.p_olt_w / 1000.0;
  const double decay = energy::hourly_decay(esd.self_discharge_per_day);

  // Per (cloud, node) transport power per wavelength, kW.
  std::map<std::pair<int, int>, double> kappa_kw;
  for (int c : clouds)
    for (int n : topo.nodes)
      kappa_kw[{c, n}] = netmodel::core_pair_power_per_wavelength_w(
                             power, paths.path(c, n),
                             /*amortized_edfa=*/!flags.exact_edfa_fibers) /
                         1000.0;

  const bool esd_on = flags.esd_enabled;
  const double soc_cap = esd_on ? esd.e_max_kwh : 0.0;
  const double flow_cap = esd_on ? kInf : 0.0;
  double rate_cap = kInf;
  if (esd_on && esd.rate_limit_fraction_per_hour > 0)
    rate_cap = esd.rate_limit_fraction_per_hour * esd.e_max_kwh;

  MilpProblem p;
  // Variables, node-major. soc has horizon+1 entries per node.
  for (int n : topo.nodes) {
    for (int t = 0; t < horizon; ++t)
      p.add_variable(names::f_fog(n, t), VarKind::Continuous, 0, kInf);
    for (int c : clouds)
      for (int t = 0; t < horizon; ++t)
        p.add_variable(names::f_cld(n, c, t), VarKind::Continuous, 0, kInf);
    for (int c : clouds)
      for (int t = 0; t < horizon; ++t)
        p.add_variable(names::wavelengths(n, c, t), VarKind::Integer, 0, kInf);
    for (int t = 0; t < horizon; ++t)
      p.add_variable(names::metro_units(n, t), VarKind::Integer, 0, kInf);
    for (int t = 0; t < horizon; ++t)
      p.add_variable(names::olt_units(n, t), VarKind::Integer, 0, kInf);
    for (int t = 0; t < horizon; ++t)
      p.add_variable(names::solar_direct(n, t), VarKind::Continuous, 0, kInf);
    for (int t = 0; t < horizon; ++t)
      p.add_variable(names::solar_charge(n, t), VarKind::Continuous, 0,
                     std::min(flow_cap, rate_cap));
    for (int t = 0; t < horizon; ++t)
      p.add_variable(names::discharge(n, t), VarKind::Continuous, 0,
                     std::min(flow_cap, rate_cap));
    for (int t = 0; t <= horizon; ++t)
      p.add_variable(names::soc(n, t), VarKind::Continuous, 0, soc_cap);
    for (int t = 0; t < horizon; ++t)
      p.add_variable(names::fog_brown(n, t), VarKind::Continuous, 0, kInf);
  }
  if (flags.exact_edfa_fibers)
    for (const auto& l : topo.links)
      for (int t = 0; t < horizon; ++t)
        p.add_variable(names::fibers(l.a, l.b, t), VarKind::Integer, 0, kInf);

  auto var = [&](const std::string& s) {
    int i = p.find_variable(s);
    if (i < 0) throw std::logic_error("internal: missing variable " + s);
    return i;
  };

  std::vector<Term> objective;
  for (int ni = 0; ni < n_nodes; ++ni) {
    const int n = topo.nodes[ni];
    for (int t = 0; t < horizon; ++t) {
      const double demand = traces.demand_gbps(ni, t);
      const double pv_kw =
          energy::pv_output_w(pv, traces.irradiance_w_m2(ni, t)) / 1000.0;

      // Demand split across fog and the clouds.
      std::vector<Term> split{{var(names::f_fog(n, t)), 1.0}};
      for (int c : clouds) split.push_back({var(names::f_cld(n, c, t)), 1.0});
      p.add_constraint("demand(" + std::to_string(n) + "," +
                           std::to_string(t) + ")",
                       split, Relation::Eq, demand);

      p.add_constraint(
          "fdc_cap(" + std::to_string(n) + "," + std::to_string(t) + ")",
          {{var(names::f_fog(n, t)), 1.0}}, Relation::Le,
          power.fdc_capacity_gbps);

      for (int c : clouds)
        p.add_constraint("wave(" + std::to_string(n) + "," +
                             std::to_string(c) + "," + std::to_string(t) + ")",
                         {{var(names::wavelengths(n, c, t)),
                           power.line_rate_gbps},
                          {var(names::f_cld(n, c, t)), -1.0}},
                         Relation::Ge, 0.0);

      std::vector<Term> metro{{var(names::metro_units(n, t)),
                               power.metro_port_gbps}};
      for (int c : clouds) metro.push_back({var(names::f_cld(n, c, t)), -1.0});
      p.add_constraint("metro_cap(" + std::to_string(n) + "," +
                           std::to_string(t) + ")",
                       metro, Relation::Ge, 0.0);

      p.add_constraint(
          "olt_cap(" + std::to_string(n) + "," + std::to_string(t) + ")",
          {{var(names::olt_units(n, t)), power.olt_capacity_gbps}},
          Relation::Ge, demand);

      p.add_constraint(
          "solar_budget(" + std::to_string(n) + "," + std::to_string(t) + ")",
          {{var(names::solar_direct(n, t)), 1.0},
           {var(names::solar_charge(n, t)), 1.0}},
          Relation::Le, pv_kw);

      // soc(t+1) = decay soc(t) + eta_c g_chg(t) - dis(t)
      p.add_constraint(
          "soc_dyn(" + std::to_string(n) + "," + std::to_string(t) + ")",
          {{var(names::soc(n, t + 1)), 1.0},
           {var(names::soc(n, t)), -decay},
           {var(names::solar_charge(n, t)), -esd.eta_charge},
           {var(names::discharge(n, t)), 1.0}},
          Relation::Eq, 0.0);

      // Brown power covers what solar and the ESD do not.
      p.add_constraint(
          "fog_brown_def(" + std::to_string(n) + "," + std::to_string(t) + ")",
          {{var(names::fog_brown(n, t)), 1.0},
           {var(names::f_fog(n, t)), -fog_kw_per_gbps},
           {var(names::solar_direct(n, t)), 1.0},
           {var(names::discharge(n, t)), esd.eta_discharge}},
          Relation::Ge, 0.0);

      // Green supply may not exceed the FDC facility demand.
      p.add_constraint(
          "green_cap(" + std::to_string(n) + "," + std::to_string(t) + ")",
          {{var(names::solar_direct(n, t)), 1.0},
           {var(names::discharge(n, t)), esd.eta_discharge},
           {var(names::f_fog(n, t)), -fog_kw_per_gbps}},
          Relation::Le, 0.0);

      objective.push_back({var(names::fog_brown(n, t)), 1.0});
      if (!flags.cdc_renewable)
        for (int c : clouds)
          objective.push_back({var(names::f_cld(n, c, t)), cld_kw_per_gbps});
      for (int c : clouds) {
        double k = kappa_kw[{c, n}];
        if (k != 0.0)
          objective.push_back({var(names::wavelengths(n, c, t)), k});
      }
      objective.push_back({var(names::metro_units(n, t)), metro_pair_kw});
      objective.push_back({var(names::olt_units(n, t)), olt_kw});
    }

    if (flags.cyclic_soc)
      p.add_constraint("soc_cyc(" + std::to_string(n) + ")",
                       {{var(names::soc(n, 0)), 1.0},
                        {var(names::soc(n, horizon)), -1.0}},
                       Relation::Eq, 0.0);
    else
      p.add_constraint("soc_init(" + std::to_string(n) + ")",
                       {{var(names::soc(n, 0)), 1.0}}, Relation::Eq,
                       esd_on ? soc_init_kwh : 0.0);
  }

  if (flags.exact_edfa_fibers) {
    for (size_t li = 0; li < topo.links.size(); ++li) {
      const auto& l = topo.links[li];
      const double edfa_kw =
          power.p_edfa_w *
          netmodel::edfas_on_link(l.length_km, power.span_km) / 1000.0;
      for (int t = 0; t < horizon; ++t) {
        std::vector<Term> terms{{var(names::fibers(l.a, l.b, t)),
                                 power.wavelengths_per_fiber}};
        for (int c : clouds)
          for (int n : topo.nodes) {
            const auto& path = paths.path(c, n);
            for (int id : path.link_ids)
              if (id == static_cast<int>(li)) {
                terms.push_back({var(names::wavelengths(n, c, t)), -1.0});
                break;
              }
          }
        p.add_constraint("fiber_cap(" + std::to_string(l.a) + "," +
                             std::to_string(l.b) + "," + std::to_string(t) +
                             ")",
                         terms, Relation::Ge, 0.0);
        objective.push_back({var(names::fibers(l.a, l.b, t)), edfa_kw});
      }
    }
  }

  p.objective = std::move(objective);
  validate(p);
  return p;
}

}  // namespace fogcache::milp
