#pragma once

// Numerical reconstruction of the uniformly-moving-source fields by
// convolving the (eps, rho)-regularized unified kernel along the worldline.
//
// The eps-derivative of theta(p)/sqrt(p) is taken analytically on the
// integrand: a boundary (delta) term sum 1/(|p'| rho) = 1/(R rho), plus a bulk
// (theta) term -1/2 theta(p) (p + rho^2)^{-3/2} integrated by adaptive
// quadrature. Both carry a 1/rho divergence that cancels in the sum.

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "offshell/fields.hpp"
#include "offshell/greens.hpp"
#include "offshell/quadrature.hpp"

namespace offshell {

using Vec4 = FourVector<double>;
using Vec5 = FiveVector<double>;
using Source = UniformSource<double>;

/// p(tau') = quad tau'^2 + lin tau' + constant, the kernel argument -sigma5 (X - b tau')^2 + eps
/// along the worldline, with X the observation point relative to the worldline origin.
/// Equivalently p = (sigma5 / b.b) R^2 - zeta A^2 (tau' - B)^2.
struct PTauCoefficients {
  double quad = 0.0;
  double lin = 0.0;
  double constant = 0.0;
  double R2 = 0.0;
  /// sqrt|b.b|.
  double A = 0.0;
  /// Vertex b.X / b.b.
  double B = 0.0;
  int zeta = 0;

  double operator()(double tau_prime) const { return (quad * tau_prime + lin) * tau_prime + constant; }

  /// Real zeros of p (ascending), present iff R^2 > 0.
  std::optional<std::array<double, 2>> roots() const;
};

PTauCoefficients p_tau(const Source& src, Signature sig, const Vec4& x, double tau_obs, double eps);

struct ConvolutionOptions {
  double rel_tol = 1e-12;
  /// Outer tau_obs integral of the pairing oracle; the delta/theta cancellation leaves the
  /// pointwise kernel with relative noise ~ rel_tol (kappa / rho)^2.
  double pairing_rel_tol = 1e-7;
  std::size_t max_intervals = 20000;
  PrefactorConvention convention = PrefactorConvention::GEpsilon;
};

struct QuadratureResult {
  Vec5 value = Vec5::Zero();
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
  /// Amplitude of the 1/rho_hat term (rho_hat = rho / kappa0) fitted over {rho, rho/2, rho/4},
  /// in the units of `value` per unit b.
  double divergent_coefficient = 0.0;
  /// Kernel-level pieces at the requested rho (before the e c b^a prefactor).
  double delta_term = 0.0;
  double theta_term = 0.0;
};

/// Natural length of the regulators at the point: kappa0 = sqrt|R^2| / A at eps = 0.
double regulator_scale(const Source& src, Signature sig, const Vec4& x, double tau_obs);

/// Boundary term 1/(R rho) when p has real zeros, else 0.
double delta_term(const PTauCoefficients& p, double rho);

/// Bulk term -1/2 integral theta(p) (p + rho^2)^{-3/2} d tau' by adaptive quadrature, with the
/// |tau'|^{-3} tails beyond the truncation added in closed form.
IntegralEstimate theta_term(const PTauCoefficients& p, double rho, const ConvolutionOptions& opts = {});

/// a^a(x, tau) = e c b^a [delta term + theta term] at finite (eps, rho).
QuadratureResult convolve_ums(const Source& src, Signature sig, const Vec4& x, double tau_obs, double eps,
                              double rho, const ConvolutionOptions& opts = {});

/// Closed-form counterpart for zeta = -1: delta term 1/(R rho) plus
/// theta term -2 theta(R^2) [coth(beta0) - 1] / (2 A C^2), C = sqrt(R^2/A^2 - rho^2),
/// coth(beta0) = sqrt(C^2 + rho^2) / rho. Zero when R^2 < 0.
Vec5 semi_analytic_ums(const Source& src, Signature sig, const Vec4& x, double tau_obs, double eps, double rho,
                       PrefactorConvention convention = PrefactorConvention::GEpsilon);

/// value(rho_hat) = c0 + c1 / rho_hat + c2 rho_hat + c3 rho_hat^2, least squares (three points: drop c3).
struct RegulatorFit {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
};

RegulatorFit fit_regulator_series(std::span<const double> rho_hat, std::span<const double> values);

/// rho_k = rho0_factor kappa0 2^{-k}, k < count; eps0 = eps0_factor kappa0^2 with a
/// two-point Richardson step eps0 -> eps0/2.
struct RegulatorSchedule {
  double rho0_factor = 1e-2;
  int count = 6;
  double eps0_factor = 1e-4;
};

struct ExtrapolatedConvolution {
  Vec5 value = Vec5::Zero();
  /// Regular part c0 after the eps step (kernel units, per unit e c b).
  double regular_coefficient = 0.0;
  /// The larger |c1| of the two eps levels, same units as c0.
  double divergent_coefficient = 0.0;
  double kappa0 = 0.0;
  std::vector<double> rhos;
  /// Kernel-level sums at eps0 for each rho.
  std::vector<double> samples;
  std::size_t evaluations = 0;
};

/// Limit eps, rho -> 0 of convolve_ums for a zeta = -1 source.
ExtrapolatedConvolution extrapolate_ums(const Source& src, Signature sig, const Vec4& x, double tau_obs,
                                        const RegulatorSchedule& schedule = {},
                                        const ConvolutionOptions& opts = {});

struct PairingResult {
  /// integral d tau_obs phi(tau_obs) a^a / b^a.
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// Pairing of the zeta = +1 convolution at finite (eps, rho) with a test function supported
/// in [window_lo, window_hi]; `pair_ums_extrapolated` adds the rho -> rho/2 Richardson step.
PairingResult pair_ums(const Source& src, Signature sig, const Vec4& x, const std::function<double(double)>& phi,
                       double window_lo, double window_hi, double eps, double rho,
                       const ConvolutionOptions& opts = {});

PairingResult pair_ums_extrapolated(const Source& src, Signature sig, const Vec4& x,
                                    const std::function<double(double)>& phi, double window_lo,
                                    double window_hi, double eps, double rho,
                                    const ConvolutionOptions& opts = {});

/// A^mu(x) = integral of a^mu over tau, numerically: adaptive quadrature over [-T, T] plus the
/// 1/tau^2 tails for zeta = -1 (principal value across real poles); summed 1/|q'| over the zeros
/// of the quadric for zeta = +1.
Vec4 concatenate_numeric(const Source& src, Signature sig, const Vec4& x, double tail_T,
                         const ConvolutionOptions& opts = {});

}  // namespace offshell
