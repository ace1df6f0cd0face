#include "offshell/oracle.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace offshell {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRegulatorFloor = 1e-7;

// Quadratic c0 + c1 t + c2 t^2 through three samples.
struct Quadratic {
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;

  double operator()(double t) const { return (c2 * t + c1) * t + c0; }
  double derivative(double t) const { return 2.0 * c2 * t + c1; }
};

Quadratic fit_quadratic(const std::array<double, 3>& t, const std::array<double, 3>& v) {
  Eigen::Matrix3d m;
  Eigen::Vector3d rhs;
  for (int i = 0; i < 3; ++i) {
    m(i, 0) = t[i] * t[i];
    m(i, 1) = t[i];
    m(i, 2) = 1.0;
    rhs(i) = v[i];
  }
  const Eigen::Vector3d c = m.colPivHouseholderQr().solve(rhs);
  return {c(0), c(1), c(2)};
}

// Real zeros of a quadratic, ascending; linear fallback when the leading term is negligible
// at the given abscissa scale.
std::vector<double> real_zeros(const Quadratic& q, double scale) {
  std::vector<double> out;
  const double lead = std::abs(q.c2) * scale * scale;
  const double rest = std::abs(q.c1) * scale + std::abs(q.c0);
  if (lead <= 1e-12 * rest) {
    if (q.c1 != 0.0) out.push_back(-q.c0 / q.c1);
    return out;
  }
  const double disc = q.c1 * q.c1 - 4.0 * q.c2 * q.c0;
  if (disc < 0) return out;
  const double s = std::sqrt(disc);
  const double k = -0.5 * (q.c1 + (q.c1 >= 0 ? s : -s));
  if (k == 0.0) {
    out = {0.0, 0.0};
  } else {
    out = {k / q.c2, q.c0 / k};
  }
  std::sort(out.begin(), out.end());
  return out;
}

double kernel_prefactor(const Source& src, Signature sig, PrefactorConvention convention) {
  return src.charge * unified_prefactor<double>(sig, convention);
}

void require_quadrature(const IntegralEstimate& est, const char* what) {
  if (!est.converged || !std::isfinite(est.value)) {
    throw Error(Errc::QuadratureFailure, std::string(what) + ": error estimate above tolerance");
  }
}

double kernel_sum(const PTauCoefficients& p, double rho, const ConvolutionOptions& opts, IntegralEstimate* est) {
  const IntegralEstimate theta = theta_term(p, rho, opts);
  require_quadrature(theta, "theta term");
  if (est) *est = theta;
  return delta_term(p, rho) + theta.value;
}

}  // namespace

std::optional<std::array<double, 2>> PTauCoefficients::roots() const {
  if (!(R2 > 0) || A == 0.0) return std::nullopt;
  const double half = std::sqrt(R2) / (A * A);
  return std::array<double, 2>{B - half, B + half};
}

PTauCoefficients p_tau(const Source& src, Signature sig, const Vec4& x, double tau_obs, double eps) {
  const Vec5 X = src.relative(x, tau_obs);
  const double s5 = sig.s5<double>();
  const double bb = contract5(src.b, src.b, sig);
  const double bx = contract5(src.b, X, sig);
  const double xx = contract5(X, X, sig);
  PTauCoefficients p;
  p.quad = -s5 * bb;
  p.lin = 2.0 * s5 * bx;
  p.constant = -s5 * (xx - s5 * eps);
  p.R2 = bx * bx - bb * (xx - s5 * eps);
  p.A = std::sqrt(std::abs(bb));
  p.B = bb != 0.0 ? bx / bb : 0.0;
  p.zeta = bb == 0.0 ? 0 : sig.sigma5() * (bb > 0 ? 1 : -1);
  return p;
}

double regulator_scale(const Source& src, Signature sig, const Vec4& x, double tau_obs) {
  const PTauCoefficients p = p_tau(src, sig, x, tau_obs, 0.0);
  if (p.A == 0.0) throw Error(Errc::LightlikeVelocity, "b.b is zero");
  return std::sqrt(std::abs(p.R2)) / p.A;
}

double delta_term(const PTauCoefficients& p, double rho) {
  if (!(p.R2 > 0)) return 0.0;
  return 1.0 / (std::sqrt(p.R2) * rho);
}

IntegralEstimate theta_term(const PTauCoefficients& p, double rho, const ConvolutionOptions& opts) {
  if (p.zeta == 0) throw Error(Errc::LightlikeVelocity, "b.b is zero");
  const double A = p.A;
  const double A2 = A * A;
  const double r2 = rho * rho;
  const QuadratureOptions qopts{0.0, opts.rel_tol, opts.max_intervals};

  if (p.zeta == 1) {
    if (!(p.R2 > 0)) return IntegralEstimate{0.0, 0.0, 0, true};
    // Support between the zeros; s is the distance from the lower zero, folded about the midpoint.
    const double width = 2.0 * std::sqrt(p.R2) / A2;
    const auto integrand = [&](double s) {
      const double pv = A2 * s * (width - s);
      return std::pow(pv + r2, -1.5);
    };
    const double s0 = std::min(0.25 * width, r2 / (A2 * width));
    const std::vector<double> breaks = graded_breakpoints(0.0, s0, 0.5 * width);
    IntegralEstimate est = integrate(integrand, std::span<const double>(breaks), qopts);
    est.value = -est.value;
    return est;
  }

  // zeta = -1: support outside the zeros (or everywhere when R^2 <= 0). Both sides are mirror
  // images about the vertex B, so one side is integrated and doubled.
  const double C2 = p.R2 / A2 - r2;
  const double span_scale = std::max({std::abs(p.B), std::sqrt(std::abs(p.R2)) / A2, rho / A});
  IntegralEstimate est;
  double T = 0.0;
  if (p.R2 > 0) {
    const auto zeros = *p.roots();
    const double width = zeros[1] - zeros[0];
    T = 1e3 * std::max({std::abs(zeros[0]), std::abs(zeros[1]), span_scale});
    const double L = T - 0.5 * width;
    const auto integrand = [&](double s) {
      const double pv = A2 * s * (s + width);
      return std::pow(pv + r2, -1.5);
    };
    const double s0 = std::min(0.25 * L, r2 / (A2 * width));
    const std::vector<double> breaks = graded_breakpoints(0.0, s0, L);
    est = integrate(integrand, std::span<const double>(breaks), qopts);
  } else {
    const double neg = -C2;
    T = 1e3 * span_scale;
    const auto integrand = [&](double t) { return std::pow(A2 * t * t + neg, -1.5); };
    const double s0 = 1e-2 * std::sqrt(neg) / A;
    const std::vector<double> breaks = graded_breakpoints(0.0, s0, T);
    est = integrate(integrand, std::span<const double>(breaks), qopts);
  }
  const double c = C2 / A2;
  const double tail =
      (0.5 / (T * T) + 0.375 * c / std::pow(T, 4) + 0.3125 * c * c / std::pow(T, 6)) / (A2 * A);
  est.value = -(est.value + tail);
  return est;
}

QuadratureResult convolve_ums(const Source& src, Signature sig, const Vec4& x, double tau_obs, double eps,
                              double rho, const ConvolutionOptions& opts) {
  if (!(eps > 0)) throw Error(Errc::InvalidArgument, "epsilon must be > 0");
  if (!(rho > 0)) throw Error(Errc::InvalidArgument, "rho must be > 0");
  const double kappa0 = regulator_scale(src, sig, x, tau_obs);
  if (!(kappa0 > 0)) throw Error(Errc::OnSingularSupport, "observation point is on the field's pole/support");
  if (rho < kRegulatorFloor * kappa0) {
    throw Error(Errc::RegulatorTooSmall, "rho is below the floating-point safety floor");
  }
  const PTauCoefficients p = p_tau(src, sig, x, tau_obs, eps);
  QuadratureResult out;
  std::array<double, 3> rho_hat{};
  std::array<double, 3> sums{};
  double scale = 1.0;
  for (int k = 0; k < 3; ++k) {
    const double r = rho * scale;
    IntegralEstimate est;
    sums[k] = kernel_sum(p, r, opts, &est);
    rho_hat[k] = r / kappa0;
    out.evaluations += est.evaluations;
    if (k == 0) {
      out.delta_term = delta_term(p, r);
      out.theta_term = est.value;
      out.abs_error_estimate = est.abs_error;
    }
    scale *= 0.5;
  }
  const RegulatorFit fit = fit_regulator_series(rho_hat, sums);
  const double pre = kernel_prefactor(src, sig, opts.convention);
  out.value = src.b * (pre * sums[0]);
  out.abs_error_estimate *= std::abs(pre) * src.b.norm();
  out.divergent_coefficient = pre * fit.c1;
  return out;
}

Vec5 semi_analytic_ums(const Source& src, Signature sig, const Vec4& x, double tau_obs, double eps, double rho,
                       PrefactorConvention convention) {
  const PTauCoefficients p = p_tau(src, sig, x, tau_obs, eps);
  if (p.zeta != -1) throw Error(Errc::RegimeMismatch, "closed-form pieces are for zeta = -1 sources");
  if (!(p.R2 > 0)) return Vec5::Zero();
  const double A = p.A;
  const double kappa2 = p.R2 / (A * A);
  const double C2 = kappa2 - rho * rho;
  if (!(C2 > 0)) throw Error(Errc::DomainError, "C^2 = R^2/A^2 - rho^2 is not positive");
  const double coth = std::sqrt(kappa2) / rho;
  const double delta = 1.0 / (std::sqrt(p.R2) * rho);
  const double theta = -(coth - 1.0) / (A * C2);
  return src.b * (kernel_prefactor(src, sig, convention) * (delta + theta));
}

RegulatorFit fit_regulator_series(std::span<const double> rho_hat, std::span<const double> values) {
  const auto n = static_cast<Eigen::Index>(rho_hat.size());
  if (n < 3 || rho_hat.size() != values.size()) {
    throw Error(Errc::InvalidArgument, "regulator fit needs at least three (rho, value) pairs");
  }
  const Eigen::Index cols = n >= 4 ? 4 : 3;
  Eigen::MatrixXd m(n, cols);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = rho_hat[i];
    m(i, 0) = 1.0;
    m(i, 1) = 1.0 / r;
    m(i, 2) = r;
    if (cols == 4) m(i, 3) = r * r;
    rhs(i) = values[i];
  }
  const Eigen::VectorXd c = m.colPivHouseholderQr().solve(rhs);
  return {c(0), c(1), c(2), cols == 4 ? c(3) : 0.0};
}

ExtrapolatedConvolution extrapolate_ums(const Source& src, Signature sig, const Vec4& x, double tau_obs,
                                        const RegulatorSchedule& schedule, const ConvolutionOptions& opts) {
  const Regime<double> regime = classify(src, sig);
  if (regime.zeta != -1) {
    throw Error(Errc::RegimeMismatch, "pointwise limit exists for zeta = -1 only; pair zeta = +1 fields");
  }
  ExtrapolatedConvolution out;
  out.kappa0 = regulator_scale(src, sig, x, tau_obs);
  if (!(out.kappa0 > 0)) throw Error(Errc::OnSingularSupport, "observation point is on the field's pole");
  const double eps0 = schedule.eps0_factor * out.kappa0 * out.kappa0;
  std::vector<double> rho_hat;
  for (int k = 0; k < schedule.count; ++k) {
    const double r = schedule.rho0_factor * std::ldexp(1.0, -k);
    rho_hat.push_back(r);
    out.rhos.push_back(r * out.kappa0);
  }
  std::array<RegulatorFit, 2> fits;
  for (int level = 0; level < 2; ++level) {
    const double eps = level == 0 ? eps0 : 0.5 * eps0;
    const PTauCoefficients p = p_tau(src, sig, x, tau_obs, eps);
    std::vector<double> sums;
    for (double r : out.rhos) {
      if (r < kRegulatorFloor * out.kappa0) throw Error(Errc::RegulatorTooSmall, "rho schedule below floor");
      IntegralEstimate est;
      sums.push_back(kernel_sum(p, r, opts, &est));
      out.evaluations += est.evaluations;
    }
    if (level == 0) out.samples = sums;
    fits[level] = fit_regulator_series(rho_hat, sums);
  }
  out.regular_coefficient = 2.0 * fits[1].c0 - fits[0].c0;
  out.divergent_coefficient =
      std::abs(fits[0].c1) >= std::abs(fits[1].c1) ? fits[0].c1 : fits[1].c1;
  out.value = src.b * (kernel_prefactor(src, sig, opts.convention) * out.regular_coefficient);
  return out;
}

PairingResult pair_ums(const Source& src, Signature sig, const Vec4& x, const std::function<double(double)>& phi,
                       double window_lo, double window_hi, double eps, double rho, const ConvolutionOptions& opts) {
  if (!(window_hi > window_lo)) throw Error(Errc::InvalidArgument, "empty pairing window");
  if (!(eps > 0) || !(rho > 0)) throw Error(Errc::InvalidArgument, "regulators must be > 0");
  const Regime<double> regime = classify(src, sig);
  if (regime.zeta != 1) throw Error(Errc::RegimeMismatch, "pairing oracle is for zeta = +1 sources");

  // R^2 is quadratic in the observation tau; its zeros bound the support of the convolution.
  const double mid = 0.5 * (window_lo + window_hi);
  const double half = 0.5 * (window_hi - window_lo);
  const std::array<double, 3> ts{-half, 0.0, half};
  std::array<double, 3> r2s{};
  for (int i = 0; i < 3; ++i) r2s[i] = p_tau(src, sig, x, mid + ts[i], eps).R2;
  const Quadratic r2 = fit_quadratic(ts, r2s);
  const double A2 = regime.sign_bb * regime.bb;

  // Pieces of the window separated by the zeros of R^2; the convolution vanishes where R^2 <= 0.
  std::vector<double> cuts{window_lo};
  std::vector<double> slopes{0.0};
  for (double z : real_zeros(r2, half)) {
    const double tz = mid + z;
    if (!(tz > window_lo && tz < window_hi)) continue;
    cuts.push_back(tz);
    slopes.push_back(std::abs(r2.derivative(z)) / A2);
  }
  cuts.push_back(window_hi);
  slopes.push_back(0.0);

  PairingResult out;
  const auto integrand = [&](double tau) {
    const PTauCoefficients p = p_tau(src, sig, x, tau, eps);
    if (!(p.R2 > 0)) return 0.0;
    IntegralEstimate est;
    const double s = kernel_sum(p, rho, opts, &est);
    out.evaluations += est.evaluations;
    return phi(tau) * s;
  };
  const QuadratureOptions qopts{0.0, opts.pairing_rel_tol, opts.max_intervals};

  // Near a zero the integrand behaves like 1/sqrt|tau - zero|; tau = zero +- v^2 removes it.
  // The kernel's boundary layer has width rho^2 / |dy/dtau| in tau, rho / sqrt|dy/dtau| in v.
  double value = 0.0;
  double error = 0.0;
  const auto from_zero = [&](double zero, double slope, double extent) {
    const double dir = extent > 0 ? 1.0 : -1.0;
    const double vmax = std::sqrt(std::abs(extent));
    const auto mapped = [&](double v) { return 2.0 * v * integrand(zero + dir * v * v); };
    const double layer = rho / std::sqrt(std::max(slope, 1e-300));
    const std::vector<double> breaks = graded_breakpoints(0.0, std::min(0.1 * layer, 0.25 * vmax), vmax);
    const IntegralEstimate est = integrate(mapped, std::span<const double>(breaks), qopts);
    require_quadrature(est, "pairing integral");
    value += est.value;
    error += est.abs_error;
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    const double centre = 0.5 * (lo + hi);
    if (!(p_tau(src, sig, x, centre, eps).R2 > 0)) continue;
    const bool lo_zero = i > 0;
    const bool hi_zero = i + 2 < cuts.size();
    if (lo_zero && hi_zero) {
      from_zero(lo, slopes[i], centre - lo);
      from_zero(hi, slopes[i + 1], centre - hi);
    } else if (lo_zero) {
      from_zero(lo, slopes[i], hi - lo);
    } else if (hi_zero) {
      from_zero(hi, slopes[i + 1], lo - hi);
    } else {
      const IntegralEstimate est = integrate(integrand, lo, hi, qopts);
      require_quadrature(est, "pairing integral");
      value += est.value;
      error += est.abs_error;
    }
  }
  const IntegralEstimate est{value, error, 0, true};
  const double pre = kernel_prefactor(src, sig, opts.convention);
  out.value = pre * est.value;
  out.abs_error_estimate = std::abs(pre) * est.abs_error;
  return out;
}

PairingResult pair_ums_extrapolated(const Source& src, Signature sig, const Vec4& x,
                                    const std::function<double(double)>& phi, double window_lo,
                                    double window_hi, double eps, double rho, const ConvolutionOptions& opts) {
  const PairingResult coarse = pair_ums(src, sig, x, phi, window_lo, window_hi, eps, rho, opts);
  const PairingResult fine = pair_ums(src, sig, x, phi, window_lo, window_hi, eps, 0.5 * rho, opts);
  PairingResult out;
  out.value = 2.0 * fine.value - coarse.value;
  out.abs_error_estimate = 2.0 * fine.abs_error_estimate + coarse.abs_error_estimate;
  out.evaluations = coarse.evaluations + fine.evaluations;
  return out;
}

namespace {

// Principal-value-safe integral over tau of a field with the quadratic pole profile 1/dtilde.
Vec4 concatenate_smooth(const Source& src, Signature sig, const Vec4& x, double T, const ConvolutionOptions& opts) {
  const Vec5 n = normalized_velocity(src.b, sig);
  const Vec4 n4 = n.head<4>();
  const double t0 = src.offset(kFifth);
  const auto coefficient = [&](double t) {
    const Vec5 a = smooth_potential(src, sig, x, t0 + t);
    return a.head<4>().dot(n4) / n4.squaredNorm();
  };

  const double scale = std::max({(x - src.offset.head<4>()).norm(), 1.0});
  std::array<double, 3> ts{};
  std::array<double, 3> inv{};
  bool sampled = false;
  for (double shift : {0.0, 0.317, -0.291, 0.613}) {
    try {
      ts = {-scale + shift * scale, shift * scale, scale + shift * scale};
      for (int i = 0; i < 3; ++i) inv[i] = 1.0 / coefficient(ts[i]);
      sampled = true;
      break;
    } catch (const Error& err) {
      if (err.code() != Errc::OnSingularSupport) throw;
    }
  }
  if (!sampled) throw Error(Errc::OnSingularSupport, "cannot sample the field profile off its poles");
  const Quadratic d = fit_quadratic(ts, inv);
  const double disc = d.c1 * d.c1 - 4.0 * d.c2 * d.c0;
  if (std::abs(disc) <= 1e-10 * (d.c1 * d.c1 + std::abs(4.0 * d.c2 * d.c0))) {
    throw Error(Errc::OnCone, "x is on the concatenation cone");
  }
  // Folded principal-value integrands carry cancellation noise near 1e-14; 1e-10 is ample here.
  const QuadratureOptions qopts{0.0, std::max(opts.rel_tol, 1e-10), opts.max_intervals};
  const double vertex = -d.c1 / (2.0 * d.c2);
  if (!(T > std::abs(vertex))) throw Error(Errc::InvalidArgument, "tail_T must enclose the field's peak");

  double body = 0.0;
  // Sum of |pieces|: the reference magnitude when the principal value cancels to ~0.
  double gross = 0.0;
  if (disc < 0) {
    const double w = std::sqrt(-disc) / std::abs(2.0 * d.c2);
    std::vector<double> breaks;
    for (double b : graded_breakpoints(vertex, std::min(0.25 * w, 0.5 * (T - vertex)), -T - vertex)) breaks.push_back(b);
    for (double b : graded_breakpoints(vertex, std::min(0.25 * w, 0.5 * (T - vertex)), T - vertex)) breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    const IntegralEstimate est = integrate(coefficient, std::span<const double>(breaks), qopts);
    require_quadrature(est, "concatenation integral");
    body = est.value;
    gross = std::abs(body);
  } else {
    // Two simple poles: refine them on the sampled field, then fold each symmetric neighbourhood
    // so the principal value is an ordinary integral.
    std::vector<double> poles = real_zeros(d, scale);
    for (double& r : poles) {
      for (int it = 0; it < 8; ++it) {
        const double h = 1e-6 * std::max(std::abs(r), scale);
        double f0;
        double fp;
        double fm;
        try {
          f0 = 1.0 / coefficient(r);
          fp = 1.0 / coefficient(r + h);
          fm = 1.0 / coefficient(r - h);
        } catch (const Error& err) {
          if (err.code() != Errc::OnSingularSupport) throw;
          break;
        }
        const double step = f0 / ((fp - fm) / (2.0 * h));
        r -= step;
        if (std::abs(step) <= 1e-15 * std::max(std::abs(r), scale)) break;
      }
    }
    const double gap = poles[1] - poles[0];
    const double lo = poles[0] - 0.5 * gap;
    const double hi = poles[1] + 0.5 * gap;
    if (!(T > std::max(std::abs(lo), std::abs(hi)))) {
      throw Error(Errc::InvalidArgument, "tail_T must enclose both poles");
    }
    for (double pole : poles) {
      const auto folded = [&](double s) { return coefficient(pole + s) + coefficient(pole - s); };
      // Below s_c the residual pole-location error dominates the folded integrand; the sliver
      // [0, s_c] is taken by the midpoint rule.
      const double s_c = 1e-6 * gap;
      const std::vector<double> fb = graded_breakpoints(s_c, 1e-5 * gap, 0.5 * gap - s_c);
      const IntegralEstimate est = integrate(folded, std::span<const double>(fb), qopts);
      require_quadrature(est, "principal-value fold");
      const double piece = est.value + s_c * folded(0.5 * s_c);
      body += piece;
      gross += std::abs(piece);
    }
    const std::vector<double> left = graded_breakpoints(lo, 0.25 * gap, -T - lo);
    const std::vector<double> right = graded_breakpoints(hi, 0.25 * gap, T - hi);
    for (const auto* part : {&left, &right}) {
      const IntegralEstimate est = integrate(coefficient, std::span<const double>(*part), qopts);
      require_quadrature(est, "concatenation integral");
      body += est.value;
      gross += std::abs(est.value);
    }
  }
  const double a = d.c2;
  const double b = d.c1;
  const double c = d.c0;
  const double tail = 2.0 / (a * T) + 2.0 * (b * b - a * c) / (3.0 * a * a * a * T * T * T);
  const double total = body + tail;
  if (std::abs(tail) > 0.1 * std::max(std::abs(total), gross)) {
    throw Error(Errc::TailEstimateUnreliable, "tail correction exceeds 10% of the total; increase tail_T");
  }
  return n4 * total;
}

Vec4 concatenate_delta(const Source& src, Signature sig, const Vec4& x) {
  const FieldValue<double> probe = eval_field(src, sig, x, src.offset(kFifth));
  const auto& surface = std::get<SingularSurface<double>>(probe);
  const Vec4 n4 = surface.n.head<4>();
  const double t0 = src.offset(kFifth);
  const double scale = std::max((x - src.offset.head<4>()).norm(), 1.0);
  const auto q = [&](double t) { return surface.quadric(x, t0 + t); };
  const Quadratic fit = fit_quadratic({-scale, 0.0, scale}, {q(-scale), q(0.0), q(scale)});
  if (std::abs(fit.c2) * scale * scale + std::abs(fit.c1) * scale <= 1e-12 * std::abs(fit.c0)) {
    // q does not depend on tau: the source never moves through spacetime.
    return Vec4::Zero();
  }
  std::vector<double> zeros = real_zeros(fit, scale);
  if (zeros.size() == 2 &&
      std::abs(zeros[1] - zeros[0]) <= 1e-8 * std::max({std::abs(zeros[0]), std::abs(zeros[1]), scale})) {
    throw Error(Errc::OnCone, "x is on the concatenation cone");
  }
  double sum = 0.0;
  for (double& z : zeros) {
    for (int it = 0; it < 3; ++it) {
      const double h = 1e-4 * std::max(std::abs(z), scale);
      const double slope = (q(z + h) - q(z - h)) / (2.0 * h);
      z -= q(z) / slope;
    }
    const double h = 1e-4 * std::max(std::abs(z), scale);
    sum += 1.0 / std::abs((q(z + h) - q(z - h)) / (2.0 * h));
  }
  return n4 * (surface.weight * sum);
}

}  // namespace

Vec4 concatenate_numeric(const Source& src, Signature sig, const Vec4& x, double tail_T,
                         const ConvolutionOptions& opts) {
  if (!(tail_T > 0)) throw Error(Errc::InvalidArgument, "tail_T must be > 0");
  const Regime<double> regime = classify(src, sig);
  if (regime.label == RegimeLabel::LightlikeBoundary) {
    throw Error(Errc::LightlikeVelocity, "source velocity is on the lightlike boundary");
  }
  const Vec4 n4 = regime.n.head<4>();
  if (n4.norm() <= 1e-12 || src.charge == 0.0) return Vec4::Zero();
  if (regime.zeta == -1) return concatenate_smooth(src, sig, x, tail_T, opts);
  return concatenate_delta(src, sig, x);
}

}  // namespace offshell
