#pragma once

#include <string>
#include <string_view>

namespace fogcache {

// Shortest decimal representation that round-trips to the same double.
// Every file writer goes through this so repeated runs emit byte-identical
// output.
std::string format_double(double v);

// Parses a complete token as a double; rejects trailing garbage and empty
// input. Accepts "inf", "+inf" and "-inf".
bool parse_double(std::string_view s, double& out);

}  // namespace fogcache
