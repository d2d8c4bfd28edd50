#pragma once

#include "fogcache/topology.hpp"

namespace fogcache::netmodel {

// Device and facility power parameters. The metro, OLT and server rows are
// vendor figures; the core rows (router port, transponder, EDFA,
// regenerator) are desk defaults and should be overridden with measured
// values where available.
struct PowerConfig {
  double p_router_port_w = 300.0;  // per port at line rate (desk default)
  double p_transponder_w = 100.0;  // desk default
  double p_edfa_w = 8.0;           // per amplifier (desk default)
  double p_regen_w = 150.0;        // per regenerator (desk default)
  double line_rate_gbps = 40.0;    // single per-wavelength line rate
  double span_km = 80.0;           // EDFA spacing on a physical link
  double reach_km = 2500.0;        // optical reach before regeneration
  double p_metro_port_w = 50.0;    // 40 Gbps Ethernet switch port
  double metro_port_gbps = 40.0;
  int metro_redundancy = 2;        // ports per flow unit (ingress + egress)
  double p_olt_w = 904.0;
  double olt_capacity_gbps = 160.0;
  double p_server_w_per_gbps = 221.1;
  double server_capacity_gbps = 1.8;
  double net_overhead_ratio = 1.3;  // networking on top of server power
  double pue_cloud = 1.1;
  double pue_fog = 1.1;
  double fdc_capacity_gbps = 160.0;
  double wavelengths_per_fiber = 40.0;  // EDFA amortization divisor
};

// Throws std::invalid_argument when a field is out of range.
void validate(const PowerConfig& cfg);

// Amplifier count on one physical link: one inline EDFA per started span
// beyond the first, plus pre and post amplifiers.
int edfas_on_link(double length_km, double span_km);

// Regenerators needed by a lightpath of the given end-to-end length.
int regens_per_wavelength(double length_km, double reach_km);

// Power of one wavelength on the cloud->node lightpath under optical
// bypass: router and transponder ports at both ends, regenerators along the
// total length, and (when amortized_edfa) the per-link EDFA power divided by
// wavelengths_per_fiber. With amortized_edfa = false the EDFA power is
// omitted here and must be charged per active fiber by the caller.
double core_pair_power_per_wavelength_w(const PowerConfig& cfg,
                                        const PathInfo& path,
                                        bool amortized_edfa = true);

// Metro switch power for the traffic crossing the metro layer at one node.
double metro_power_w(const PowerConfig& cfg, double traffic_gbps);

// OLT power at one node; charged on the node's total demand since cloud and
// fog deliveries both traverse the OLT.
double olt_power_w(const PowerConfig& cfg, double served_gbps);

// Facility power of a data centre serving the given rate: load-proportional
// server power scaled by the networking overhead ratio and the facility PUE.
double dc_it_power_w(const PowerConfig& cfg, double served_gbps, double pue);

// Servers needed in a fog data centre for the given rate. Throws when the
// rate exceeds fdc_capacity_gbps.
int fdc_server_count(const PowerConfig& cfg, double served_gbps);

}  // namespace fogcache::netmodel
