#include "offshell/quadrature.hpp"

#include "offshell/error.hpp"

namespace offshell {

std::vector<double> graded_breakpoints(double start, double first_width, double length, double ratio) {
  if (!(first_width > 0) || !(ratio > 1) || !std::isfinite(length)) {
    throw Error(Errc::InvalidArgument, "graded_breakpoints needs first_width > 0, ratio > 1, finite length");
  }
  const double sign = length < 0 ? -1.0 : 1.0;
  const double extent = std::abs(length);
  std::vector<double> offsets{0.0};
  for (double w = first_width; w < extent; w *= ratio) offsets.push_back(w);
  offsets.push_back(extent);
  std::vector<double> out;
  out.reserve(offsets.size());
  for (double o : offsets) out.push_back(start + sign * o);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace offshell
