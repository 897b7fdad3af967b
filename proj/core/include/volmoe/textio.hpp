#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace volmoe::textio {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double x);

/// Strict parse of the whole field; false on trailing garbage or empty input.
bool parse_double(std::string_view text, double& out);
bool parse_int(std::string_view text, long long& out);

std::vector<std::string_view> split(std::string_view line, char sep);

} // namespace volmoe::textio
