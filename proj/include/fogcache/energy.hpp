#pragma once

#include <Eigen/Core>

namespace fogcache::energy {

// Solar array attached to one OLT/FDC site.
struct PvConfig {
  double area_m2 = 250.0;    // 0 disables solar
  double efficiency = 0.263;
};

// Li-ion energy storage device.
struct EsdConfig {
  double e_max_kwh = 50.0;
  double eta_charge = 0.7225;     // energy efficiency into the store
  double eta_discharge = 0.9025;  // energy efficiency out of the store
  double self_discharge_per_day = 0.03;
  // Optional cap on the energy moved in or out per hour, as a fraction of
  // e_max_kwh. 0 disables the limit.
  double rate_limit_fraction_per_hour = 0.0;
};

struct EsdState {
  double soc_kwh = 0.0;
};

void validate(const PvConfig& pv);
void validate(const EsdConfig& esd);

// PV electrical output for a given irradiance.
double pv_output_w(const PvConfig& pv, double irradiance_w_m2);

// Hourly retention factor equivalent to the daily self-discharge fraction.
double hourly_decay(double self_discharge_per_day);

struct EsdStepResult {
  EsdState state;
  double delivered_kwh = 0.0;
};

// One hour of battery dynamics:
//   soc' = decay * soc + eta_charge * charge_in - discharge_out
//   delivered = eta_discharge * discharge_out
// Throws std::domain_error instead of clipping when soc' would leave
// [0, e_max] (beyond a 1e-9 numerical slack) or when a rate limit is
// exceeded.
EsdStepResult esd_step(const EsdState& state, const EsdConfig& cfg,
                       double charge_in_kwh, double discharge_out_kwh);

struct DispatchTrace {
  Eigen::VectorXd direct_kwh;     // solar consumed by the load, per hour
  Eigen::VectorXd charged_kwh;    // solar sent into the ESD, per hour
  Eigen::VectorXd delivered_kwh;  // ESD output consumed by the load, per hour
  Eigen::VectorXd soc_kwh;        // length horizon+1, soc at hour boundaries
};

// Greedy dispatch for one site: use solar directly first, charge the surplus
// up to the available headroom, discharge to cover any remaining deficit.
// Always feasible; serves as a heuristic baseline, not the optimum.
DispatchTrace simulate_dispatch(const Eigen::VectorXd& irradiance_w_m2,
                                const PvConfig& pv, const EsdConfig& esd,
                                const Eigen::VectorXd& load_kwh,
                                double soc0_kwh = 0.0);

}  // namespace fogcache::energy
