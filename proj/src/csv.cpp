#include "tcodrl/csv.hpp"

#include <charconv>
#include <system_error>

#include "tcodrl/domain.hpp"

namespace tcodrl::csv {

std::string format(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error("cannot format number");
  return std::string(buf, end);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw Error("malformed number '" + s + "'");
  return v;
}

}  // namespace tcodrl::csv
