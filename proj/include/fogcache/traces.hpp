#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "fogcache/topology.hpp"

namespace fogcache::timeseries {

// Per-node hourly demand and irradiance, row = node (in Topology::nodes
// order), column = hour.
struct HourlyTraces {
  int horizon_hours = 24;
  Eigen::MatrixXd demand_gbps;
  Eigen::MatrixXd irradiance_w_m2;
};

// Loads and validates the pair of CSV files (schema: `node,hour,value`, one
// row per cell, any order). Every (node, hour) cell must be present exactly
// once; errors carry the file name and row number. A non-zero
// max_demand_gbps additionally caps every demand cell (checked, not
// clamped); pass 0 to skip the cap.
HourlyTraces load_traces(const std::string& demand_path,
                         const std::string& irradiance_path,
                         const netmodel::Topology& topo,
                         int expected_hours = 24,
                         double max_demand_gbps = 0.0);

// Canonical CSV writer: header `node,hour,value`, rows sorted by (node,
// hour), shortest round-trip decimals. load_traces followed by save_traces
// is byte-stable.
void save_traces(const HourlyTraces& traces, const netmodel::Topology& topo,
                 const std::string& demand_path,
                 const std::string& irradiance_path);

// Single-file versions used by the pair functions above.
Eigen::MatrixXd load_trace_csv(const std::string& path,
                               const netmodel::Topology& topo,
                               int expected_hours);
void save_trace_csv(const Eigen::MatrixXd& values,
                    const netmodel::Topology& topo, const std::string& path);

// The documented diurnal demand shape: piecewise-linear through the minimum
// 0.2 at 04:00 and the maximum 1.0 at 21:00, wrapping around midnight.
double diurnal_shape(int hour);

// Synthetic demand: profile "flat" fills every cell with peak_gbps;
// "diurnal" scales the peak by diurnal_shape(hour). Unknown profile names
// are errors.
Eigen::MatrixXd synth_demand(const netmodel::Topology& topo, double peak_gbps,
                             const std::string& profile);

// Synthetic irradiance: clipped half-sine, peak at 12:00, zero outside
// [06:00, 18:00]. Identical across nodes unless node_scale supplies one
// factor per node.
Eigen::MatrixXd synth_irradiance(const netmodel::Topology& topo,
                                 double peak_w_m2,
                                 const std::vector<double>& node_scale = {});

}  // namespace fogcache::timeseries
