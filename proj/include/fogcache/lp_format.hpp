#pragma once

#include <string>

#include "fogcache/milp.hpp"

namespace fogcache::milp {

// Writes the problem in CPLEX LP text format. The writer is byte-stable:
// fixed section order (Minimize, Subject To, Bounds, Generals, End), terms
// and bounds sorted by variable name, constraints in declaration order,
// shortest round-trip decimals. Every variable gets a Bounds line so the
// reader recovers the full variable set. Characters illegal in LP names are
// escaped deterministically (see sanitize_lp_name).
std::string write_lp_string(const MilpProblem& p);
void export_lp(const MilpProblem& p, const std::string& path);

// Reads the subset of the LP format that export_lp emits (plus whitespace
// and case variations). Errors carry the 1-based line number; unsupported
// features (Maximize, ranges, quadratic sections, ...) are named explicitly.
// Variables are ordered by name in the result, so
// structurally_equal(parse_lp(export_lp(p)), p) holds for any valid p.
MilpProblem parse_lp_string(const std::string& text);
MilpProblem parse_lp(const std::string& path);

// LP-legal version of a name: keeps [A-Za-z0-9_().,], escapes anything else
// as _xHH_, and prefixes v_ when the first character may not start a name.
std::string sanitize_lp_name(const std::string& name);

}  // namespace fogcache::milp
