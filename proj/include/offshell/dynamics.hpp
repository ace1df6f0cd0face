#pragma once

// Test-event propagation under the 5D Lorentz force of a smooth
// uniformly-moving-source field. The fifth coordinate of the test event is
// slaved to the evolution parameter (dz^5/dtau = 1).

#include <cstddef>
#include <vector>

#include "offshell/fields.hpp"

namespace offshell {

struct EventState {
  FourVector<double> x = FourVector<double>::Zero();
  /// dx/dtau.
  FourVector<double> u = FourVector<double>::Zero();
  double tau = 0.0;
};

/// m^2 / M^2 = -u.u.
inline double msq_ratio(const EventState& s) { return -contract4(s.u, s.u); }

/// (e0 / M) [u^nu f^mu_nu + f^mu_5], indices lowered with the 5D metric.
FourVector<double> lorentz_accel(const EventState& state, const FieldTensor<double>& f, double e0, double M,
                                 Signature sig = Signature::four_one());

struct IntegratorOptions {
  /// A step whose end point has |D| / |X|^2 below this is treated as touching the pole.
  double pole_tolerance = 1e-9;
};

/// Fixed-step classical Runge-Kutta in tau. h may be negative (backward propagation).
/// Returns n_steps + 1 states starting with `init`.
std::vector<EventState> integrate(const UniformSource<double>& src, Signature sig, const EventState& init,
                                  double e0, double M, double h, std::size_t n_steps,
                                  const IntegratorOptions& opts = {});

}  // namespace offshell
