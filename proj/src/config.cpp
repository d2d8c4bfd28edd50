#include "fogcache/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "fogcache/numeric.hpp"

namespace fogcache {

void validate(const Config& cfg) {
  netmodel::validate(cfg.power);
  energy::validate(cfg.pv);
  energy::validate(cfg.esd);
  if (cfg.soc_init_kwh < 0 || cfg.soc_init_kwh > cfg.esd.e_max_kwh)
    throw std::invalid_argument("config: soc_init_kwh outside [0, e_max]");
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);

  Config cfg;
  std::map<std::string, std::function<void(double)>> setters;
  auto bind = [&](const std::string& key, double& field) {
    setters[key] = [&field](double v) { field = v; };
  };
  auto& p = cfg.power;
  bind("p_router_port_w", p.p_router_port_w);
  bind("p_transponder_w", p.p_transponder_w);
  bind("p_edfa_w", p.p_edfa_w);
  bind("p_regen_w", p.p_regen_w);
  bind("line_rate_gbps", p.line_rate_gbps);
  bind("span_km", p.span_km);
  bind("reach_km", p.reach_km);
  bind("p_metro_port_w", p.p_metro_port_w);
  bind("metro_port_gbps", p.metro_port_gbps);
  setters["metro_redundancy"] = [&p](double v) {
    if (v != std::floor(v))
      throw std::runtime_error("metro_redundancy must be an integer");
    p.metro_redundancy = static_cast<int>(v);
  };
  bind("p_olt_w", p.p_olt_w);
  bind("olt_capacity_gbps", p.olt_capacity_gbps);
  bind("p_server_w_per_gbps", p.p_server_w_per_gbps);
  bind("server_capacity_gbps", p.server_capacity_gbps);
  bind("net_overhead_ratio", p.net_overhead_ratio);
  bind("pue_cloud", p.pue_cloud);
  bind("pue_fog", p.pue_fog);
  bind("fdc_capacity_gbps", p.fdc_capacity_gbps);
  bind("wavelengths_per_fiber", p.wavelengths_per_fiber);
  bind("pv_area_m2", cfg.pv.area_m2);
  bind("pv_efficiency", cfg.pv.efficiency);
  bind("esd_e_max_kwh", cfg.esd.e_max_kwh);
  bind("esd_eta_charge", cfg.esd.eta_charge);
  bind("esd_eta_discharge", cfg.esd.eta_discharge);
  bind("esd_self_discharge_per_day", cfg.esd.self_discharge_per_day);
  bind("esd_rate_limit_fraction_per_hour",
       cfg.esd.rate_limit_fraction_per_hour);
  bind("soc_init_kwh", cfg.soc_init_kwh);

  std::set<std::string> assigned;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto fail = [&](const std::string& msg) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " +
                               msg);
    };
    auto trim = [](std::string s) {
      size_t b = s.find_first_not_of(" \t\r");
      size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) fail("unknown key '" + key + "'");
    if (!assigned.insert(key).second) fail("duplicate key '" + key + "'");
    double v;
    if (!parse_double(val, v)) fail("bad value '" + val + "'");
    try {
      it->second(v);
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }
  validate(cfg);
  return cfg;
}

}  // namespace fogcache
