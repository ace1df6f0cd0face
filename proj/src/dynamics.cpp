#include "offshell/dynamics.hpp"

#include <cmath>

namespace offshell {

namespace {

using Vec4 = FourVector<double>;

struct Derivative {
  Vec4 dx;
  Vec4 du;
};

double normalized_denominator(const UniformSource<double>& src, Signature sig, const Vec4& x, double tau) {
  const double rel2 = src.relative(x, tau).squaredNorm();
  return smooth_denominator(src, sig, x, tau) / std::max(rel2, 1e-300);
}

}  // namespace

Vec4 lorentz_accel(const EventState& state, const FieldTensor<double>& f, double e0, double M, Signature sig) {
  if (!(M > 0)) throw Error(Errc::InvalidArgument, "M must be > 0");
  const Vec4 u_lower = lower4(state.u);
  Vec4 out = f.topLeftCorner<4, 4>() * u_lower + f.block<4, 1>(0, kFifth) * sig.s5<double>();
  return out * (e0 / M);
}

std::vector<EventState> integrate(const UniformSource<double>& src, Signature sig, const EventState& init,
                                  double e0, double M, double h, std::size_t n_steps,
                                  const IntegratorOptions& opts) {
  if (!(M > 0)) throw Error(Errc::InvalidArgument, "M must be > 0");
  if (!(h != 0.0) || !std::isfinite(h)) throw Error(Errc::InvalidArgument, "step must be finite and nonzero");
  const Regime<double> regime = classify(src, sig);
  if (regime.zeta != -1) {
    throw Error(Errc::SingularRegimeUnsupported, "trajectories need a smooth (zeta = -1) source field");
  }

  const auto rhs = [&](const Vec4& x, const Vec4& u, double tau) {
    FieldTensor<double> f;
    try {
      f = field_tensor(src, sig, x, tau);
    } catch (const Error& err) {
      if (err.code() == Errc::OnSingularSupport) {
        throw Error(Errc::SingularSupportCrossed, "trajectory reached the field pole at tau = " + std::to_string(tau));
      }
      throw;
    }
    return Derivative{u, lorentz_accel(EventState{x, u, tau}, f, e0, M, sig)};
  };

  std::vector<EventState> out;
  out.reserve(n_steps + 1);
  out.push_back(init);
  double d_prev = normalized_denominator(src, sig, init.x, init.tau);
  for (std::size_t i = 0; i < n_steps; ++i) {
    const EventState& s = out.back();
    const Derivative k1 = rhs(s.x, s.u, s.tau);
    const Derivative k2 = rhs(s.x + 0.5 * h * k1.dx, s.u + 0.5 * h * k1.du, s.tau + 0.5 * h);
    const Derivative k3 = rhs(s.x + 0.5 * h * k2.dx, s.u + 0.5 * h * k2.du, s.tau + 0.5 * h);
    const Derivative k4 = rhs(s.x + h * k3.dx, s.u + h * k3.du, s.tau + h);
    EventState next;
    next.x = s.x + (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    next.u = s.u + (h / 6.0) * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du);
    next.tau = init.tau + h * static_cast<double>(i + 1);
    if (!next.x.allFinite() || !next.u.allFinite()) {
      throw Error(Errc::StepRejected, "nonfinite state at tau = " + std::to_string(next.tau));
    }
    const double d_next = normalized_denominator(src, sig, next.x, next.tau);
    if (std::abs(d_next) < opts.pole_tolerance || (d_prev > 0) != (d_next > 0)) {
      throw Error(Errc::SingularSupportCrossed,
                  "trajectory crossed the field pole near tau = " + std::to_string(next.tau));
    }
    d_prev = d_next;
    out.push_back(next);
  }
  return out;
}

}  // namespace offshell
