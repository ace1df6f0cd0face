#include "offshell/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "offshell/quadrature.hpp"

namespace offshell {

namespace {

using Vec4 = FourVector<double>;

struct Stencil {
  Eigen::VectorXd residual;
  double magnitude = 0.0;
};

Eigen::VectorXd sample(const FieldSampler& field, const Vec4& x, double tau) {
  try {
    return field(x, tau);
  } catch (const Error& err) {
    if (err.code() == Errc::OnSingularSupport || err.code() == Errc::OnCone) {
      throw Error(Errc::StencilOnSupport, "stencil point lies on the singular support");
    }
    throw;
  }
}

// Point displaced by `step` along axis a of (t, x, y, z, tau).
std::pair<Vec4, double> shifted(const Vec4& x, double tau, int axis, double step) {
  Vec4 y = x;
  double t = tau;
  if (axis == kFifth) {
    t += step;
  } else {
    y(axis) += step;
  }
  return {y, t};
}

Stencil wave_stencil(const FieldSampler& field, Signature sig, const Vec4& x, double tau, double h) {
  const Eigen::VectorXd f0 = sample(field, x, tau);
  Stencil s;
  s.residual = Eigen::VectorXd::Zero(f0.size());
  for (int a = 0; a < 5; ++a) {
    const auto [xp, tp] = shifted(x, tau, a, h);
    const auto [xm, tm] = shifted(x, tau, a, -h);
    const Eigen::VectorXd second = (sample(field, xp, tp) - 2.0 * f0 + sample(field, xm, tm)) / (h * h);
    s.residual += sig.eta<double>(a) * second;
    s.magnitude += second.cwiseAbs().maxCoeff();
  }
  return s;
}

double order_from(double coarse, double fine) {
  if (!(coarse > 0) || !(fine > 0) || !std::isfinite(coarse) || !std::isfinite(fine)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::log2(coarse / fine);
}

std::pair<double, double> divergence(const UniformSource<double>& src, const Vec4& x, double tau, double h,
                                     double w) {
  double total = 0.0;
  double magnitude = 0.0;
  for (int a = 0; a < 5; ++a) {
    const auto [xp, tp] = shifted(x, tau, a, h);
    const auto [xm, tm] = shifted(x, tau, a, -h);
    const double d = (mollified_current(src, xp, tp, w)(a) - mollified_current(src, xm, tm, w)(a)) / (2.0 * h);
    total += d;
    magnitude += std::abs(d);
  }
  return {total, magnitude};
}

}  // namespace

double default_stencil_spacing(const Vec4& x, double tau) {
  return 1e-3 * std::max({x.norm(), std::abs(tau), 1.0});
}

ResidualReport dalembert_residual(const FieldSampler& field, Signature sig, const Vec4& x, double tau, double h) {
  if (!(h > 0)) throw Error(Errc::InvalidArgument, "stencil spacing must be > 0");
  const Stencil coarse = wave_stencil(field, sig, x, tau, h);
  const Stencil fine = wave_stencil(field, sig, x, tau, 0.5 * h);
  ResidualReport r;
  r.residual = coarse.residual.cwiseAbs().maxCoeff();
  r.normalized_residual = coarse.magnitude > 0 ? r.residual / coarse.magnitude : r.residual;
  r.order_estimate = order_from(r.residual, fine.residual.cwiseAbs().maxCoeff());
  return r;
}

ResidualReport continuity_residual(const UniformSource<double>& src, const Vec4& x, double tau, double h,
                                   double w) {
  if (!(w > 0)) throw Error(Errc::InvalidArgument, "mollifier width must be > 0");
  if (!(h > 0)) throw Error(Errc::InvalidArgument, "stencil spacing must be > 0");
  const auto [coarse, magnitude] = divergence(src, x, tau, h, w);
  const auto [fine, unused] = divergence(src, x, tau, 0.5 * h, w);
  (void)unused;
  ResidualReport r;
  r.residual = std::abs(coarse);
  r.normalized_residual = magnitude > 0 ? r.residual / magnitude : r.residual;
  r.order_estimate = order_from(std::abs(coarse), std::abs(fine));
  return r;
}

double gradient_check(const FieldTensor<double>& analytic, const FieldSampler& field, Signature sig, const Vec4& x,
                      double tau, double h) {
  if (!(h > 0)) throw Error(Errc::InvalidArgument, "stencil spacing must be > 0");
  // grad(a, b) = d_a of component b.
  Eigen::Matrix<double, 5, 5> grad;
  for (int a = 0; a < 5; ++a) {
    const auto [xp, tp] = shifted(x, tau, a, h);
    const auto [xm, tm] = shifted(x, tau, a, -h);
    const Eigen::VectorXd d = (sample(field, xp, tp) - sample(field, xm, tm)) / (2.0 * h);
    if (d.size() != 5) throw Error(Errc::InvalidArgument, "gradient_check needs a five-component sampler");
    grad.row(a) = d.transpose();
  }
  FieldTensor<double> numeric;
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      numeric(a, b) = sig.eta<double>(a) * grad(a, b) - sig.eta<double>(b) * grad(b, a);
    }
  }
  const double scale = analytic.cwiseAbs().maxCoeff();
  const double dev = (analytic - numeric).cwiseAbs().maxCoeff();
  return scale > 0 ? dev / scale : dev;
}

double mollified_pairing(const SingularSurface<double>& surface, const Vec4& x,
                         const std::function<double(double)>& phi, double w) {
  if (!(w > 0)) throw Error(Errc::InvalidArgument, "mollifier width must be > 0");
  if (!surface.roots) throw Error(Errc::InvalidArgument, "surface has no tau roots at this x");
  const auto q = [&](double tau) { return surface.quadric(x, tau); };
  const double per_b = surface.weight / surface.velocity_norm;
  const double gauss = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * w);
  const auto integrand = [&](double tau) {
    const double s = q(tau) / w;
    return phi(tau) * per_b * gauss * std::exp(-0.5 * s * s);
  };

  // The Gaussian in q is negligible beyond |q| = 12 w; integrate over a band twice that wide
  // around each root, or over their hull when the bands meet.
  const auto [t1, t2] = *surface.roots;
  std::array<double, 2> band{};
  double magnitude = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double r = i == 0 ? t1 : t2;
    const double hd = 1e-6 * std::max(std::abs(r), 1.0);
    const double slope = std::abs(q(r + hd) - q(r - hd)) / (2.0 * hd);
    band[i] = 24.0 * w / slope;
    magnitude += std::abs(phi(r)) * per_b / slope;
  }
  const auto band_breaks = [&](double r, double width) {
    std::vector<double> out;
    for (double k : {-1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0}) out.push_back(r + k * width);
    return out;
  };
  std::vector<std::vector<double>> parts;
  if (t1 + band[0] < t2 - band[1]) {
    parts.push_back(band_breaks(t1, band[0]));
    parts.push_back(band_breaks(t2, band[1]));
  } else {
    std::vector<double> hull = band_breaks(t1, band[0]);
    for (double b : band_breaks(t2, band[1])) hull.push_back(b);
    std::sort(hull.begin(), hull.end());
    parts.push_back(hull);
  }
  // A band whose root sits in the far tail of phi contributes far below the total; judge it
  // against the size of the whole pairing.
  const QuadratureOptions opts{1e-15 * magnitude, 1e-11, 20000};
  double total = 0.0;
  for (const auto& part : parts) {
    const IntegralEstimate est = integrate(integrand, std::span<const double>(part), opts);
    if (!est.converged) throw Error(Errc::QuadratureFailure, "mollified pairing did not converge");
    total += est.value;
  }
  return total;
}

double pairing_check(const SingularSurface<double>& surface, const Vec4& x, const std::function<double(double)>& phi,
                     double w) {
  if (!surface.roots) throw Error(Errc::InvalidArgument, "surface has no tau roots at this x");
  const auto [t1, t2] = *surface.roots;
  const double closed = surface.root_coefficient * (phi(t1) + phi(t2));
  const double coarse = mollified_pairing(surface, x, phi, w);
  const double fine = mollified_pairing(surface, x, phi, 0.5 * w);
  return std::abs(closed - (4.0 * fine - coarse) / 3.0);
}

double mollified_mass(const UniformSource<double>& src, double tau, double w) {
  if (!(w > 0)) throw Error(Errc::InvalidArgument, "mollifier width must be > 0");
  // The mollifier is isotropic about the event, so the R^4 integral is 2 pi^2 int r^3 rho(r) dr
  // along any ray; rays along each axis and a diagonal are averaged.
  const Vec4 centre = event_position(src, tau);
  const double sign5 = src.b(kFifth) > 0 ? 1.0 : -1.0;
  const std::array<double, 2> range{0.0, 12.0 * w};
  const QuadratureOptions opts{0.0, 1e-13, 2000};
  double total = 0.0;
  for (int d = 0; d < 5; ++d) {
    const Vec4 dir = d < 4 ? Vec4(Vec4::Unit(d)) : Vec4(Vec4::Constant(0.5));
    const auto radial = [&](double r) {
      return r * r * r * sign5 * mollified_current(src, Vec4(centre + r * dir), tau, w)(kFifth);
    };
    total += 2.0 * std::numbers::pi * std::numbers::pi * integrate(radial, std::span<const double>(range), opts).value;
  }
  return total / 5.0;
}

}  // namespace offshell
