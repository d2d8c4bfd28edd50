#include "fogcache/power.hpp"

#include <cmath>
#include <stdexcept>

namespace fogcache::netmodel {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

}  // namespace

void validate(const PowerConfig& cfg) {
  auto bad = [](const char* msg) { throw std::invalid_argument(msg); };
  if (cfg.p_router_port_w < 0 || cfg.p_transponder_w < 0 ||
      cfg.p_edfa_w < 0 || cfg.p_regen_w < 0 || cfg.p_metro_port_w < 0 ||
      cfg.p_olt_w < 0 || cfg.p_server_w_per_gbps < 0)
    bad("power config: power coefficients must be >= 0");
  if (!(cfg.line_rate_gbps > 0) || !(cfg.span_km > 0) ||
      !(cfg.reach_km > 0) || !(cfg.metro_port_gbps > 0) ||
      !(cfg.olt_capacity_gbps > 0) || !(cfg.server_capacity_gbps > 0) ||
      !(cfg.fdc_capacity_gbps > 0) || !(cfg.wavelengths_per_fiber > 0))
    bad("power config: capacities and distances must be > 0");
  if (cfg.metro_redundancy < 1)
    bad("power config: metro_redundancy must be >= 1");
  if (cfg.net_overhead_ratio < 1.0)
    bad("power config: net_overhead_ratio must be >= 1");
  if (cfg.pue_cloud < 1.0 || cfg.pue_fog < 1.0)
    bad("power config: PUE values must be >= 1");
}

int edfas_on_link(double length_km, double span_km) {
  require(length_km > 0, "edfas_on_link: length_km must be > 0");
  require(span_km > 0, "edfas_on_link: span_km must be > 0");
  double inline_amps = std::ceil(length_km / span_km - 1.0);
  if (inline_amps < 0) inline_amps = 0;
  return static_cast<int>(inline_amps) + 2;
}

int regens_per_wavelength(double length_km, double reach_km) {
  require(length_km > 0, "regens_per_wavelength: length_km must be > 0");
  require(reach_km > 0, "regens_per_wavelength: reach_km must be > 0");
  return static_cast<int>(std::floor(length_km / reach_km));
}

double core_pair_power_per_wavelength_w(const PowerConfig& cfg,
                                        const PathInfo& path,
                                        bool amortized_edfa) {
  if (path.empty()) return 0.0;  // co-located cloud, no core traversal
  double w = 2.0 * cfg.p_router_port_w + 2.0 * cfg.p_transponder_w;
  w += cfg.p_regen_w * regens_per_wavelength(path.total_km, cfg.reach_km);
  if (amortized_edfa) {
    double edfa = 0.0;
    for (double len : path.link_lengths_km)
      edfa += cfg.p_edfa_w * edfas_on_link(len, cfg.span_km);
    w += edfa / cfg.wavelengths_per_fiber;
  }
  return w;
}

double metro_power_w(const PowerConfig& cfg, double traffic_gbps) {
  require(traffic_gbps >= 0, "metro_power: traffic must be >= 0");
  double units = std::ceil(traffic_gbps / cfg.metro_port_gbps);
  return units * cfg.p_metro_port_w * cfg.metro_redundancy;
}

double olt_power_w(const PowerConfig& cfg, double served_gbps) {
  require(served_gbps >= 0, "olt_power: traffic must be >= 0");
  return std::ceil(served_gbps / cfg.olt_capacity_gbps) * cfg.p_olt_w;
}

double dc_it_power_w(const PowerConfig& cfg, double served_gbps, double pue) {
  require(served_gbps >= 0, "dc_it_power: traffic must be >= 0");
  require(pue >= 1.0, "dc_it_power: pue must be >= 1");
  return pue * cfg.net_overhead_ratio * cfg.p_server_w_per_gbps * served_gbps;
}

int fdc_server_count(const PowerConfig& cfg, double served_gbps) {
  require(served_gbps >= 0, "fdc_server_count: traffic must be >= 0");
  if (served_gbps > cfg.fdc_capacity_gbps)
    throw std::domain_error(
        "fdc_server_count: requested rate exceeds the FDC capacity");
  return static_cast<int>(std::ceil(served_gbps / cfg.server_capacity_gbps));
}

}  // namespace fogcache::netmodel
