#pragma once

// Green-function kernels of the 5D wave operator, evaluated as
// epsilon-regularized families. Distributional parts are returned as
// descriptors next to the finite smooth part, never folded into it.

#include <cmath>
#include <numbers>
#include <optional>
#include <string_view>

#include "offshell/fivespace.hpp"

namespace offshell {

enum class KernelFamily {
  Unified5D,
  PrincipalPart,
  TauRetarded,
  MaxwellPP4D,
  Classic41G,
  Classic41H,
  Laplace4D,
};

/// Overall prefactor of the unified kernel g = c d/d(eps) theta(u)/sqrt(u), u = -sigma5 x.x + eps.
///   GEpsilon:       c = 1 / 4 pi^2 in both metrics (reproduces the direct UMS fields for both sigma5)
///   SignedUnified:  c = sigma5 / 4 pi^2
enum class PrefactorConvention { GEpsilon, SignedUnified };

struct KernelSpec {
  KernelFamily family = KernelFamily::Unified5D;
  Signature sig = Signature::four_one();
  /// Support regulator.
  double epsilon = 0.0;
  /// Integrability regulator; consumed by the convolution oracle only.
  double rho = 0.0;
  /// Width of the Gaussian nascent delta used by MaxwellPP4D.
  double width = 1e-2;
  PrefactorConvention convention = PrefactorConvention::GEpsilon;
};

/// coefficient * delta(argument), with the inverse square root of the kernel argument left
/// symbolic: the boundary term produced by differentiating theta(u)/sqrt(u).
template <typename Scalar>
struct BoundaryDelta {
  Scalar argument;
  Scalar coefficient;
};

/// weight * delta^4-type atom (e.g. delta(x^2) delta(tau)).
template <typename Scalar>
struct PointAtom {
  Scalar weight;
};

template <typename Scalar>
struct KernelValue {
  Scalar smooth = Scalar(0);
  std::optional<BoundaryDelta<Scalar>> boundary_delta;
  std::optional<PointAtom<Scalar>> atom;
};

inline constexpr double kConeTolerance = 1e-12;

template <typename Scalar>
Scalar unified_prefactor(Signature sig, PrefactorConvention convention) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar c = Scalar(1) / (Scalar(4) * pi * pi);
  return convention == PrefactorConvention::GEpsilon ? c : sig.s5<Scalar>() * c;
}

/// Unified (4,1)/(3,2) kernel. With u = -sigma5 q + eps, q = x^2 + sigma5 tau^2:
/// smooth = -(c/2) u^{-3/2} for u > 0, else 0; boundary term c delta(u)/sqrt(u).
template <typename Scalar>
KernelValue<Scalar> eval_unified(Signature sig, const FourVector<Scalar>& x, Scalar tau, Scalar eps,
                                 PrefactorConvention convention = PrefactorConvention::GEpsilon,
                                 Scalar tol = Scalar(kConeTolerance)) {
  using std::abs;
  using std::pow;
  if (eps < 0) throw Error(Errc::InvalidArgument, "epsilon must be >= 0");
  const Scalar s5 = sig.s5<Scalar>();
  const Scalar q = contract4(x, x) + s5 * tau * tau;
  const Scalar scale = x.squaredNorm() + tau * tau;
  if (eps == Scalar(0) && abs(q) <= tol * scale) {
    throw Error(Errc::OnCone, "point is on the 5D cone x.x = 0");
  }
  const Scalar c = unified_prefactor<Scalar>(sig, convention);
  const Scalar u = -s5 * q + eps;
  KernelValue<Scalar> out;
  out.smooth = u > 0 ? -Scalar(0.5) * c * pow(u, Scalar(-1.5)) : Scalar(0);
  out.boundary_delta = BoundaryDelta<Scalar>{u, c};
  return out;
}

/// Principal-part kernel
///   g_P = -(1/4 pi) delta(x^2) delta(tau) - (1/2 pi^2) d/d(x^2) theta(u)/sqrt(u),
///   u = -sigma x^2 - tau^2 + eps.
/// smooth = -(sigma / 4 pi^2) u^{-3/2}; boundary coefficient sigma / 2 pi^2; atom weight -1/4 pi.
template <typename Scalar>
KernelValue<Scalar> eval_principal_part(Signature sig, const FourVector<Scalar>& x, Scalar tau,
                                      Scalar eps, Scalar tol = Scalar(kConeTolerance)) {
  using std::abs;
  using std::pow;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  if (eps < 0) throw Error(Errc::InvalidArgument, "epsilon must be >= 0");
  const Scalar s = sig.s5<Scalar>();
  const Scalar x2 = contract4(x, x);
  const Scalar u = -s * x2 - tau * tau + eps;
  if (eps == Scalar(0) && abs(u) <= tol * (x.squaredNorm() + tau * tau)) {
    throw Error(Errc::OnCone, "point is on the cone sigma x^2 + tau^2 = 0");
  }
  KernelValue<Scalar> out;
  out.smooth = u > 0 ? -s / (Scalar(4) * pi * pi) * pow(u, Scalar(-1.5)) : Scalar(0);
  out.boundary_delta = BoundaryDelta<Scalar>{u, s / (Scalar(2) * pi * pi)};
  out.atom = PointAtom<Scalar>{-Scalar(1) / (Scalar(4) * pi)};
  return out;
}

/// Tau-retarded kernel (the (4,1) form): 2 theta(tau) / (2 pi)^3 times
///   x^2 + tau^2 < 0: atan(sqrt(-x^2 - tau^2) / tau) / (-x^2 - tau^2)^{3/2} - tau / (x^2 (x^2 + tau^2))
///   x^2 + tau^2 > 0: ln|(tau - s)/(tau + s)| / (2 s^3) - tau / (x^2 (x^2 + tau^2)),  s = sqrt(x^2 + tau^2)
template <typename Scalar>
Scalar eval_tau_retarded(const FourVector<Scalar>& x, Scalar tau, Scalar tol = Scalar(kConeTolerance)) {
  using std::abs;
  using std::atan;
  using std::log;
  using std::sqrt;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  if (tau <= 0) return Scalar(0);
  const Scalar x2 = contract4(x, x);
  const Scalar w = x2 + tau * tau;
  const Scalar scale = x.squaredNorm() + tau * tau;
  if (abs(x2) <= tol * scale || abs(w) <= tol * scale) {
    throw Error(Errc::BranchSingularity, "x^2 = 0 or x^2 + tau^2 = 0");
  }
  const Scalar common = -tau / (x2 * w);
  Scalar branch;
  if (w < 0) {
    const Scalar s = sqrt(-w);
    branch = atan(s / tau) / (s * s * s);
  } else {
    const Scalar s = sqrt(w);
    branch = log(abs((tau - s) / (tau + s))) / (Scalar(2) * s * s * s);
  }
  return Scalar(2) / (Scalar(8) * pi * pi * pi) * (branch + common);
}

/// Gaussian nascent delta of width w in the variable s.
template <typename Scalar>
Scalar nascent_delta(Scalar s, Scalar w) {
  using std::exp;
  using std::sqrt;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  return exp(-s * s / (Scalar(2) * w * w)) / (sqrt(Scalar(2) * pi) * w);
}

/// (1/4 pi) delta(x^2), mollified in the variable x^2 with width w.
template <typename Scalar>
Scalar eval_maxwell_pp(const FourVector<Scalar>& x, Scalar w) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  if (!(w > 0)) throw Error(Errc::InvalidArgument, "mollifier width must be positive");
  return nascent_delta(contract4(x, x), w) / (Scalar(4) * pi);
}

enum class Classic41Variant { G, H };

/// G = -(1/4 pi^2) theta(t - |x|) (t^2 - x^2 + eps)^{-3/2};
/// H = (1/2 pi^2) d/d(t^2) theta(t - |x|)/sqrt(t^2 - x^2), whose smooth part equals G's and whose
/// boundary term sits on t = |x| with coefficient (1/2 pi^2) / (2t).
template <typename Scalar>
KernelValue<Scalar> eval_classic_41(const ThreeVector<Scalar>& x3, Scalar t, Classic41Variant variant,
                                    Scalar eps, Scalar tol = Scalar(kConeTolerance)) {
  using std::abs;
  using std::pow;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  if (eps < 0) throw Error(Errc::InvalidArgument, "epsilon must be >= 0");
  const Scalar r2 = x3.squaredNorm();
  const Scalar u = t * t - r2;
  if (eps == Scalar(0) && abs(u) <= tol * (t * t + r2)) {
    throw Error(Errc::OnCone, "point is on the light cone t^2 = |x|^2");
  }
  KernelValue<Scalar> out;
  const bool inside = t > std::sqrt(r2);
  out.smooth = inside ? -pow(u + eps, Scalar(-1.5)) / (Scalar(4) * pi * pi) : Scalar(0);
  if (variant == Classic41Variant::H && t > 0) {
    out.boundary_delta = BoundaryDelta<Scalar>{t - std::sqrt(r2), Scalar(1) / (Scalar(4) * pi * pi * t)};
  }
  return out;
}

/// 1 / (2 pi^2 r^2).
template <typename Scalar>
Scalar eval_laplace4(Scalar r) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  if (!(r > 0)) throw Error(Errc::InvalidArgument, "r must be positive");
  return Scalar(1) / (Scalar(2) * pi * pi * r * r);
}

/// Evaluates `spec` at the 5D point (t, x, y, z, tau). The 4D kernels ignore tau;
/// Laplace4D uses the Euclidean radius of (x, y, z, tau).
template <typename Scalar>
KernelValue<Scalar> evaluate(const KernelSpec& spec, const FiveVector<Scalar>& point) {
  const FourVector<Scalar> x = point.template head<4>();
  const Scalar tau = point(kFifth);
  const Scalar eps = static_cast<Scalar>(spec.epsilon);
  switch (spec.family) {
    case KernelFamily::Unified5D:
      return eval_unified<Scalar>(spec.sig, x, tau, eps, spec.convention);
    case KernelFamily::PrincipalPart:
      return eval_principal_part<Scalar>(spec.sig, x, tau, eps);
    case KernelFamily::TauRetarded:
      return KernelValue<Scalar>{eval_tau_retarded<Scalar>(x, tau), std::nullopt, std::nullopt};
    case KernelFamily::MaxwellPP4D:
      return KernelValue<Scalar>{eval_maxwell_pp<Scalar>(x, static_cast<Scalar>(spec.width)),
                                 std::nullopt, std::nullopt};
    case KernelFamily::Classic41G:
      return eval_classic_41<Scalar>(point.template segment<3>(1), point(0), Classic41Variant::G, eps);
    case KernelFamily::Classic41H:
      return eval_classic_41<Scalar>(point.template segment<3>(1), point(0), Classic41Variant::H, eps);
    case KernelFamily::Laplace4D:
      return KernelValue<Scalar>{eval_laplace4<Scalar>(point.template tail<4>().norm()), std::nullopt,
                                 std::nullopt};
  }
  throw Error(Errc::InvalidArgument, "unknown kernel family");
}

constexpr std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Unified5D: return "unified";
    case KernelFamily::PrincipalPart: return "principal-part";
    case KernelFamily::TauRetarded: return "tau-retarded";
    case KernelFamily::MaxwellPP4D: return "maxwell-pp";
    case KernelFamily::Classic41G: return "classic-g";
    case KernelFamily::Classic41H: return "classic-h";
    case KernelFamily::Laplace4D: return "laplace4";
  }
  return "unknown";
}

}  // namespace offshell
