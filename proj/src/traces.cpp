#include "fogcache/traces.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fogcache/numeric.hpp"

namespace fogcache::timeseries {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

Eigen::MatrixXd load_trace_csv(const std::string& path,
                               const netmodel::Topology& topo,
                               int expected_hours) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  const int n = topo.node_count();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, expected_hours);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> seen(n, expected_hours);
  seen.setConstant(false);

  std::string line;
  int row = 0;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error(path + ": row " + std::to_string(row) + ": " +
                             msg);
  };
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": empty file");
  ++row;
  if (split_csv(line) != std::vector<std::string>{"node", "hour", "value"})
    fail("expected header 'node,hour,value'");
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto f = split_csv(line);
    if (f.size() != 3) fail("expected 3 fields");
    int node = 0, hour = 0;
    try {
      node = std::stoi(f[0]);
      hour = std::stoi(f[1]);
    } catch (const std::exception&) {
      fail("bad node or hour field");
    }
    double value;
    if (!parse_double(f[2], value)) fail("bad value '" + f[2] + "'");
    int idx = topo.index_of(node);
    if (idx < 0) fail("node " + std::to_string(node) + " is not in the topology");
    if (hour < 0 || hour >= expected_hours)
      fail("hour " + std::to_string(hour) + " outside 0.." +
           std::to_string(expected_hours - 1) +
           " (pass an explicit horizon to change it)");
    if (value < 0) fail("negative value");
    if (seen(idx, hour))
      fail("duplicate cell for node " + std::to_string(node) + ", hour " +
           std::to_string(hour));
    seen(idx, hour) = true;
    m(idx, hour) = value;
  }
  for (int i = 0; i < n; ++i)
    for (int h = 0; h < expected_hours; ++h)
      if (!seen(i, h))
        throw std::runtime_error(path + ": missing cell for node " +
                                 std::to_string(topo.nodes[i]) + ", hour " +
                                 std::to_string(h));
  return m;
}

HourlyTraces load_traces(const std::string& demand_path,
                         const std::string& irradiance_path,
                         const netmodel::Topology& topo, int expected_hours,
                         double max_demand_gbps) {
  HourlyTraces t;
  t.horizon_hours = expected_hours;
  t.demand_gbps = load_trace_csv(demand_path, topo, expected_hours);
  t.irradiance_w_m2 = load_trace_csv(irradiance_path, topo, expected_hours);
  if (max_demand_gbps > 0) {
    for (int i = 0; i < t.demand_gbps.rows(); ++i)
      for (int h = 0; h < t.demand_gbps.cols(); ++h)
        if (t.demand_gbps(i, h) > max_demand_gbps)
          throw std::runtime_error(
              demand_path + ": demand at node " +
              std::to_string(topo.nodes[i]) + ", hour " + std::to_string(h) +
              " exceeds the per-node cap of " + format_double(max_demand_gbps) +
              " Gbps");
  }
  return t;
}

void save_trace_csv(const Eigen::MatrixXd& values,
                    const netmodel::Topology& topo, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  out << "node,hour,value\n";
  for (int i = 0; i < values.rows(); ++i)
    for (int h = 0; h < values.cols(); ++h)
      out << topo.nodes[i] << ',' << h << ',' << format_double(values(i, h))
          << '\n';
}

void save_traces(const HourlyTraces& traces, const netmodel::Topology& topo,
                 const std::string& demand_path,
                 const std::string& irradiance_path) {
  save_trace_csv(traces.demand_gbps, topo, demand_path);
  save_trace_csv(traces.irradiance_w_m2, topo, irradiance_path);
}

double diurnal_shape(int hour) {
  if (hour < 0 || hour > 23)
    throw std::domain_error("diurnal_shape: hour outside 0..23");
  // Linear ramp 04:00 (0.2) -> 21:00 (1.0), then back down across midnight.
  if (hour >= 4 && hour <= 21) return 0.2 + 0.8 * (hour - 4) / 17.0;
  int since_peak = hour > 21 ? hour - 21 : hour + 3;  // hours past 21:00
  return 1.0 - 0.8 * since_peak / 7.0;
}

Eigen::MatrixXd synth_demand(const netmodel::Topology& topo, double peak_gbps,
                             const std::string& profile) {
  if (!(peak_gbps > 0))
    throw std::domain_error("synth_demand: peak must be > 0");
  const int n = topo.node_count();
  Eigen::MatrixXd m(n, 24);
  if (profile == "flat") {
    m.setConstant(peak_gbps);
  } else if (profile == "diurnal") {
    for (int h = 0; h < 24; ++h)
      m.col(h).setConstant(peak_gbps * diurnal_shape(h));
  } else {
    throw std::invalid_argument("synth_demand: unknown profile '" + profile +
                                "' (expected flat or diurnal)");
  }
  return m;
}

Eigen::MatrixXd synth_irradiance(const netmodel::Topology& topo,
                                 double peak_w_m2,
                                 const std::vector<double>& node_scale) {
  if (peak_w_m2 < 0)
    throw std::domain_error("synth_irradiance: peak must be >= 0");
  const int n = topo.node_count();
  if (!node_scale.empty() && static_cast<int>(node_scale.size()) != n)
    throw std::invalid_argument(
        "synth_irradiance: node_scale size does not match the topology");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, 24);
  for (int h = 0; h < 24; ++h) {
    double s = std::sin(std::numbers::pi * (h - 6) / 12.0);
    double v = (h >= 6 && h <= 18 && s > 0) ? peak_w_m2 * s : 0.0;
    for (int i = 0; i < n; ++i)
      m(i, h) = v * (node_scale.empty() ? 1.0 : node_scale[i]);
  }
  return m;
}

}  // namespace fogcache::timeseries
