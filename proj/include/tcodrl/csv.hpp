#pragma once

#include <string>
#include <vector>

namespace tcodrl::csv {

/// Shortest decimal that parses back to the same double.
std::string format(double v);

std::vector<std::string> split(const std::string& line, char sep = ',');
double parse_double(const std::string& s);

}  // namespace tcodrl::csv
