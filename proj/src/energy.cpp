#include "fogcache/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fogcache::energy {

void validate(const PvConfig& pv) {
  if (pv.area_m2 < 0)
    throw std::invalid_argument("pv config: area must be >= 0");
  if (!(pv.efficiency > 0) || !(pv.efficiency < 1))
    throw std::invalid_argument("pv config: efficiency must be in (0, 1)");
}

void validate(const EsdConfig& esd) {
  if (esd.e_max_kwh < 0)
    throw std::invalid_argument("esd config: e_max must be >= 0");
  if (!(esd.eta_charge > 0) || esd.eta_charge > 1)
    throw std::invalid_argument("esd config: eta_charge must be in (0, 1]");
  if (!(esd.eta_discharge > 0) || esd.eta_discharge > 1)
    throw std::invalid_argument("esd config: eta_discharge must be in (0, 1]");
  if (esd.self_discharge_per_day < 0 || esd.self_discharge_per_day >= 1)
    throw std::invalid_argument(
        "esd config: self_discharge_per_day must be in [0, 1)");
  if (esd.rate_limit_fraction_per_hour < 0)
    throw std::invalid_argument("esd config: rate limit must be >= 0");
}

double pv_output_w(const PvConfig& pv, double irradiance_w_m2) {
  if (irradiance_w_m2 < 0)
    throw std::domain_error("pv_output: irradiance must be >= 0");
  return irradiance_w_m2 * pv.area_m2 * pv.efficiency;
}

double hourly_decay(double self_discharge_per_day) {
  if (self_discharge_per_day < 0 || self_discharge_per_day >= 1)
    throw std::domain_error("hourly_decay: input must be in [0, 1)");
  return std::pow(1.0 - self_discharge_per_day, 1.0 / 24.0);
}

EsdStepResult esd_step(const EsdState& state, const EsdConfig& cfg,
                       double charge_in_kwh, double discharge_out_kwh) {
  if (charge_in_kwh < 0 || discharge_out_kwh < 0)
    throw std::domain_error("esd_step: charge and discharge must be >= 0");
  const double slack = 1e-9 * std::max(1.0, cfg.e_max_kwh);
  if (cfg.rate_limit_fraction_per_hour > 0) {
    double cap = cfg.rate_limit_fraction_per_hour * cfg.e_max_kwh;
    if (charge_in_kwh > cap + slack || discharge_out_kwh > cap + slack)
      throw std::domain_error("esd_step: hourly rate limit exceeded");
  }
  double soc = hourly_decay(cfg.self_discharge_per_day) * state.soc_kwh +
               cfg.eta_charge * charge_in_kwh - discharge_out_kwh;
  if (soc < -slack || soc > cfg.e_max_kwh + slack)
    throw std::domain_error("esd_step: state of charge would leave [0, e_max]");
  EsdStepResult r;
  r.state.soc_kwh = std::clamp(soc, 0.0, cfg.e_max_kwh);
  r.delivered_kwh = cfg.eta_discharge * discharge_out_kwh;
  return r;
}

DispatchTrace simulate_dispatch(const Eigen::VectorXd& irradiance_w_m2,
                                const PvConfig& pv, const EsdConfig& esd,
                                const Eigen::VectorXd& load_kwh,
                                double soc0_kwh) {
  if (irradiance_w_m2.size() != load_kwh.size())
    throw std::invalid_argument("simulate_dispatch: horizon mismatch");
  validate(pv);
  validate(esd);
  const int horizon = static_cast<int>(load_kwh.size());
  const double decay = hourly_decay(esd.self_discharge_per_day);
  const double rate_cap = esd.rate_limit_fraction_per_hour > 0
                              ? esd.rate_limit_fraction_per_hour * esd.e_max_kwh
                              : std::numeric_limits<double>::infinity();

  DispatchTrace out;
  out.direct_kwh = Eigen::VectorXd::Zero(horizon);
  out.charged_kwh = Eigen::VectorXd::Zero(horizon);
  out.delivered_kwh = Eigen::VectorXd::Zero(horizon);
  out.soc_kwh = Eigen::VectorXd::Zero(horizon + 1);
  out.soc_kwh[0] = std::clamp(soc0_kwh, 0.0, esd.e_max_kwh);

  for (int h = 0; h < horizon; ++h) {
    double gen = pv_output_w(pv, irradiance_w_m2[h]) / 1000.0;  // kWh over 1 h
    double carried = decay * out.soc_kwh[h];
    double direct = std::min(gen, load_kwh[h]);
    double surplus = gen - direct;
    double deficit = load_kwh[h] - direct;

    double headroom = esd.e_max_kwh - carried;
    double charge = std::min({surplus, headroom / esd.eta_charge, rate_cap});
    double avail = carried + esd.eta_charge * charge;
    double discharge =
        std::min({deficit / esd.eta_discharge, avail, rate_cap});

    out.direct_kwh[h] = direct;
    out.charged_kwh[h] = charge;
    out.delivered_kwh[h] = esd.eta_discharge * discharge;
    out.soc_kwh[h + 1] =
        std::clamp(carried + esd.eta_charge * charge - discharge, 0.0,
                   esd.e_max_kwh);
  }
  return out;
}

}  // namespace fogcache::energy
