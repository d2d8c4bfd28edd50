#pragma once

#include <string>

#include "fogcache/energy.hpp"
#include "fogcache/power.hpp"

namespace fogcache {

// Everything the solver needs besides the topology and the traces.
struct Config {
  netmodel::PowerConfig power;
  energy::PvConfig pv;
  energy::EsdConfig esd;
  double soc_init_kwh = 0.0;
};

// Reads a `key = value` config file ('#' comments, blank lines ignored).
// Unknown and duplicate keys are errors so typos fail fast. Keys mirror the
// struct fields; PV and ESD fields use pv_/esd_ prefixes (see data/desk.cfg
// for the full list). The result is validated.
Config load_config(const std::string& path);

void validate(const Config& cfg);

}  // namespace fogcache
