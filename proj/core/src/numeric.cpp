#include "evodyn/numeric.hpp"

#include <charconv>
#include <cmath>

namespace evodyn {

double kahan_sum(std::span<const double> v) {
  KahanSum s;
  for (double x : v) s.add(x);
  return s.value();
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace evodyn
