#pragma once

// Finite-difference and distributional checks of fields, kernels and currents.

#include <functional>

#include <Eigen/Core>

#include "offshell/fields.hpp"

namespace offshell {

/// Field sampler (x, tau) -> components. Throws Error(OnSingularSupport) on the support.
using FieldSampler = std::function<Eigen::VectorXd(const FourVector<double>&, double)>;

struct ResidualReport {
  /// Max-norm of the residual at spacing h.
  double residual = 0.0;
  /// residual / sum of |second-difference terms|.
  double normalized_residual = 0.0;
  /// log2 of the residual ratio between spacings h and h/2; NaN when either level is zero or nonfinite.
  double order_estimate = 0.0;
};

/// Default stencil spacing 1e-3 max(|x|, |tau|, 1).
double default_stencil_spacing(const FourVector<double>& x, double tau);

/// (-d_t^2 + laplacian + sigma5 d_tau^2) f by the 11-point central stencil.
ResidualReport dalembert_residual(const FieldSampler& field, Signature sig, const FourVector<double>& x, double tau,
                                  double h);

/// d_mu j^mu + d_tau j^5 of the Gaussian-mollified point current (width w) by central differences.
ResidualReport continuity_residual(const UniformSource<double>& src, const FourVector<double>& x, double tau,
                                   double h, double w);

/// Max |f_analytic - f_numeric| / max |f_analytic| (absolute when the analytic tensor vanishes),
/// with f^{ab} = eta^{aa} d_a a^b - eta^{bb} d_b a^a from central differences of `field`.
double gradient_check(const FieldTensor<double>& analytic, const FieldSampler& field, Signature sig,
                      const FourVector<double>& x, double tau, double h);

/// Per-unit-b pairing integral of phi against the surface, with delta(q) replaced by a Gaussian of width w.
double mollified_pairing(const SingularSurface<double>& surface, const FourVector<double>& x,
                         const std::function<double(double)>& phi, double w);

/// |closed-form root pairing - mollified pairing| after the width Richardson step
/// (4 P(w/2) - P(w)) / 3.
double pairing_check(const SingularSurface<double>& surface, const FourVector<double>& x,
                     const std::function<double(double)>& phi, double w);

/// Integral over R^4 of the mollified density at parameter tau (one for any w > 0), by radial
/// quadrature about the event.
double mollified_mass(const UniformSource<double>& src, double tau, double w);

}  // namespace offshell
