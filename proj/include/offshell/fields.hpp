#pragma once

// Closed-form fields of a uniformly moving source in all four velocity
// regimes, the tau-root view of the delta-surface fields, the analytic field
// tensor of the smooth fields, and the concatenated (tau-integrated) Maxwell
// potential.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <variant>

#include "offshell/source.hpp"

namespace offshell {

/// |denominator| <= kPoleTolerance * |x|^2 is treated as lying on the pole.
inline constexpr double kPoleTolerance = 1e-13;
inline constexpr double kDegenerateVelocityTolerance = 1e-12;

/// q(x, tau) = (n.x)^2 - sigma5 x.x, evaluated relative to `origin`.
template <typename Scalar>
struct Quadric {
  FiveVector<Scalar> n;
  FiveVector<Scalar> origin;
  Signature sig = Signature::four_one();

  Scalar operator()(const FiveVector<Scalar>& point) const {
    const FiveVector<Scalar> rel = point - origin;
    const Scalar nx = contract5(n, rel, sig);
    return nx * nx - sig.s5<Scalar>() * contract5(rel, rel, sig);
  }

  Scalar operator()(const FourVector<Scalar>& x, Scalar tau) const {
    return (*this)(make_five<Scalar>(x, tau));
  }
};

template <typename Scalar>
struct SmoothField {
  FiveVector<Scalar> a;
};

/// weight * n^a * delta(q(x, tau)).
template <typename Scalar>
struct SingularSurface {
  Scalar weight;
  FiveVector<Scalar> n;
  FiveVector<Scalar> b;
  /// sqrt|b.b|, so that n = b / velocity_norm.
  Scalar velocity_norm;
  Quadric<Scalar> quadric;
  /// q at the evaluation point.
  Scalar q_value;
  /// Absolute tau at which the delta fires for this x, when the source moves (|b'^2| > tol)
  /// and x lies inside the field's support.
  std::optional<std::array<Scalar, 2>> roots;
  /// Coefficient of b^a (delta(tau - tau1) + delta(tau - tau2)); zero when `roots` is empty.
  Scalar root_coefficient = Scalar(0);
};

template <typename Scalar>
using FieldValue = std::variant<SmoothField<Scalar>, SingularSurface<Scalar>>;

/// Roots in tau of b'^2 tau^2 - 2 (b'.x) tau + x^2 - sigma5 [(b'.x)^2 - b'^2 x^2],
/// the tau-polynomial whose zeros carry the delta-surface field. Ordered tau1 <= tau2.
template <typename Scalar>
std::pair<Scalar, Scalar> tau_roots(const FourVector<Scalar>& bprime, Signature sig,
                                    const FourVector<Scalar>& x,
                                    Scalar tol = Scalar(kDegenerateVelocityTolerance)) {
  using std::abs;
  using std::sqrt;
  const Scalar s5 = sig.s5<Scalar>();
  const Scalar b2 = contract4(bprime, bprime);
  if (!(abs(b2) > tol)) {
    throw Error(Errc::DegenerateVelocity, "|b'^2| is within tolerance of zero");
  }
  const Scalar bx = contract4(bprime, x);
  const Scalar x2 = contract4(x, x);
  const Scalar disc4 = bx * bx - b2 * x2;
  const Scalar full = (Scalar(1) + s5 * b2) * disc4;
  if (disc4 < 0 || full < 0) {
    throw Error(Errc::ComplexRoots, "tau-polynomial has no real roots at this x");
  }
  const Scalar constant = x2 - s5 * disc4;
  const Scalar root = sqrt(full);
  const Scalar q = bx + (bx >= 0 ? root : -root);
  Scalar t1;
  Scalar t2;
  if (q == Scalar(0)) {
    t1 = t2 = Scalar(0);
  } else {
    t1 = q / b2;
    t2 = constant / q;
  }
  if (t2 < t1) std::swap(t1, t2);
  return {t1, t2};
}

template <typename Scalar>
struct DeltaDecomposition {
  /// Multiplies b^a.
  Scalar coefficient;
  Scalar tau1;
  Scalar tau2;
  FiveVector<Scalar> b;

  /// Integral over tau of the field (per unit b^a) against phi.
  template <typename F>
  Scalar pair(F&& phi) const {
    return coefficient * (phi(tau1) + phi(tau2));
  }
};

/// a^a = e b^a Delta_+ / (8 pi |b^5| sqrt((b'.x)^2 - b'^2 x^2)).
template <typename Scalar>
DeltaDecomposition<Scalar> delta_decomposition(const UniformSource<Scalar>& src, Signature sig,
                                               const FourVector<Scalar>& x,
                                               Scalar tol = Scalar(kDegenerateVelocityTolerance)) {
  using std::abs;
  using std::sqrt;
  const Regime<Scalar> regime = classify(src, sig);
  if (regime.zeta != 1) {
    throw Error(Errc::RegimeMismatch, "delta decomposition needs a zeta = +1 source");
  }
  const FourVector<Scalar> bprime = reduced_velocity(src.b);
  const FourVector<Scalar> xr = x - src.offset.template head<4>();
  const auto [t1, t2] = tau_roots(bprime, sig, xr, tol);
  const Scalar bx = contract4(bprime, xr);
  const Scalar disc = bx * bx - contract4(bprime, bprime) * contract4(xr, xr);
  const Scalar scale = bprime.squaredNorm() * xr.squaredNorm();
  if (!(disc > Scalar(kPoleTolerance) * scale)) {
    throw Error(Errc::PoleOverflow, "x is on the double-root surface; the root coefficient diverges");
  }
  DeltaDecomposition<Scalar> out;
  out.coefficient = src.charge / (Scalar(8) * std::numbers::pi_v<Scalar> * abs(src.b(kFifth)) * sqrt(disc));
  out.tau1 = t1 + src.offset(kFifth);
  out.tau2 = t2 + src.offset(kFifth);
  out.b = src.b;
  return out;
}

/// Field at (x, tau):
///   zeta = -1: smooth, a^a = (e / 4 pi^2) n^a / [(n.x)^2 + sigma5 x.x];
///   zeta = +1: (e / 4 pi) n^a delta[(n.x)^2 - sigma5 x.x], returned symbolically.
template <typename Scalar>
FieldValue<Scalar> eval_field(const UniformSource<Scalar>& src, Signature sig,
                              const FourVector<Scalar>& x, Scalar tau) {
  using std::abs;
  using std::sqrt;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Regime<Scalar> regime = classify(src, sig);
  if (regime.label == RegimeLabel::LightlikeBoundary) {
    throw Error(Errc::LightlikeVelocity, "source velocity is on the lightlike boundary");
  }
  const FiveVector<Scalar> rel = src.relative(x, tau);
  const Scalar nx = contract5(regime.n, rel, sig);
  const Scalar xx = contract5(rel, rel, sig);
  const Scalar s5 = sig.s5<Scalar>();

  if (regime.zeta == -1) {
    const Scalar denom = nx * nx + s5 * xx;
    if (!(abs(denom) > Scalar(kPoleTolerance) * rel.squaredNorm())) {
      throw Error(Errc::OnSingularSupport, "evaluation point is on the singular cone");
    }
    return SmoothField<Scalar>{regime.n * (src.charge / (Scalar(4) * pi * pi * denom))};
  }

  SingularSurface<Scalar> s;
  s.weight = src.charge / (Scalar(4) * pi);
  s.n = regime.n;
  s.b = src.b;
  s.velocity_norm = sqrt(abs(regime.bb));
  s.quadric = Quadric<Scalar>{regime.n, src.offset, sig};
  s.q_value = nx * nx - s5 * xx;
  if (abs(src.b(kFifth)) >= Scalar(kDegenerateFifthTolerance)) {
    const FourVector<Scalar> bprime = reduced_velocity(src.b);
    if (abs(contract4(bprime, bprime)) > Scalar(kDegenerateVelocityTolerance)) {
      try {
        const DeltaDecomposition<Scalar> d = delta_decomposition(src, sig, x);
        s.roots = std::array<Scalar, 2>{d.tau1, d.tau2};
        s.root_coefficient = d.coefficient;
      } catch (const Error& err) {
        if (err.code() != Errc::ComplexRoots && err.code() != Errc::PoleOverflow) throw;
      }
    }
  }
  return s;
}

/// Smooth (zeta = -1) potential; throws SingularRegimeUnsupported for delta-surface sources.
template <typename Scalar>
FiveVector<Scalar> smooth_potential(const UniformSource<Scalar>& src, Signature sig,
                                    const FourVector<Scalar>& x, Scalar tau) {
  const FieldValue<Scalar> v = eval_field(src, sig, x, tau);
  if (const auto* smooth = std::get_if<SmoothField<Scalar>>(&v)) return smooth->a;
  throw Error(Errc::SingularRegimeUnsupported, "zeta = +1 fields are delta surfaces");
}

/// Denominator (n.x)^2 + sigma5 x.x of the smooth field; its zero set is the pole.
template <typename Scalar>
Scalar smooth_denominator(const UniformSource<Scalar>& src, Signature sig,
                          const FourVector<Scalar>& x, Scalar tau) {
  const FiveVector<Scalar> n = normalized_velocity(src.b, sig);
  const FiveVector<Scalar> rel = src.relative(x, tau);
  const Scalar nx = contract5(n, rel, sig);
  return nx * nx + sig.s5<Scalar>() * contract5(rel, rel, sig);
}

/// f^{ab} = d^a a^b - d^b a^a for the smooth field:
/// f^{ab} = -(e sigma5 / 2 pi^2) (x^a n^b - x^b n^a) / D^2.
template <typename Scalar>
FieldTensor<Scalar> field_tensor(const UniformSource<Scalar>& src, Signature sig,
                                 const FourVector<Scalar>& x, Scalar tau) {
  using std::abs;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const Regime<Scalar> regime = classify(src, sig);
  if (regime.label == RegimeLabel::LightlikeBoundary) {
    throw Error(Errc::LightlikeVelocity, "source velocity is on the lightlike boundary");
  }
  if (regime.zeta == 1) {
    throw Error(Errc::SingularRegimeUnsupported,
                "field tensor of a delta-surface field is a distributional derivative");
  }
  const FiveVector<Scalar> rel = src.relative(x, tau);
  const Scalar nx = contract5(regime.n, rel, sig);
  const Scalar denom = nx * nx + sig.s5<Scalar>() * contract5(rel, rel, sig);
  if (!(abs(denom) > Scalar(kPoleTolerance) * rel.squaredNorm())) {
    throw Error(Errc::OnSingularSupport, "evaluation point is on the singular cone");
  }
  const Scalar k = -src.charge * sig.s5<Scalar>() / (Scalar(2) * pi * pi * denom * denom);
  const FieldTensor<Scalar> outer = rel * regime.n.transpose();
  return k * (outer - outer.transpose());
}

enum class ConcatenationCase { Timelike, Spacelike, Null };

/// A^mu(x) = integral of a^mu over tau
///         = (e n^mu / 4 pi) theta[(n.x)^2 - n^2 x^2] / sqrt((n.x)^2 - n^2 x^2)
/// with 4D contractions. Outside the theta support the zero vector is returned.
template <typename Scalar>
FourVector<Scalar> concatenate(const UniformSource<Scalar>& src, Signature sig,
                               const FourVector<Scalar>& x, Scalar tol = Scalar(1e-12)) {
  using std::abs;
  using std::sqrt;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const FiveVector<Scalar> n = normalized_velocity(src.b, sig);
  const FourVector<Scalar> n4 = n.template head<4>();
  if (n4.norm() <= tol) {
    // The event never moves in spacetime; every Maxwell component vanishes.
    return FourVector<Scalar>::Zero();
  }
  const FourVector<Scalar> xr = x - src.offset.template head<4>();
  const Scalar nx = contract4(n4, xr);
  const Scalar d = nx * nx - contract4(n4, n4) * contract4(xr, xr);
  if (abs(d) <= tol * n4.squaredNorm() * xr.squaredNorm()) {
    throw Error(Errc::OnCone, "x is on the concatenation cone (n.x)^2 = n^2 x^2");
  }
  if (d < 0) return FourVector<Scalar>::Zero();
  return n4 * (src.charge / (Scalar(4) * pi * sqrt(d)));
}

template <typename Scalar>
ConcatenationCase concatenation_case(const FourVector<Scalar>& n4, Scalar tol = Scalar(1e-12)) {
  using std::abs;
  const Scalar n2 = contract4(n4, n4);
  if (abs(n2) <= tol * n4.squaredNorm()) return ConcatenationCase::Null;
  return n2 < 0 ? ConcatenationCase::Timelike : ConcatenationCase::Spacelike;
}

/// The same potential written per (3,1) region with n' = n / sqrt|n^2| (n' = n when n^2 = 0):
///   n'^2 = -1: e n' / (4 pi sqrt((n'.x)^2 + x^2))
///   n'^2 = +1: e n' theta[(n'.x)^2 - x^2] / (4 pi sqrt((n'.x)^2 - x^2))
///   n'^2 =  0: e n' / (4 pi |n'.x|)
template <typename Scalar>
FourVector<Scalar> concatenate_by_case(const FourVector<Scalar>& n4, const FourVector<Scalar>& x,
                                       Scalar charge, Scalar tol = Scalar(1e-12)) {
  using std::abs;
  using std::sqrt;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const ConcatenationCase c = concatenation_case(n4, tol);
  if (c == ConcatenationCase::Null) {
    return n4 * (charge / (Scalar(4) * pi * abs(contract4(n4, x))));
  }
  const FourVector<Scalar> np = n4 / sqrt(abs(contract4(n4, n4)));
  const Scalar npx = contract4(np, x);
  const Scalar x2 = contract4(x, x);
  if (c == ConcatenationCase::Timelike) {
    return np * (charge / (Scalar(4) * pi * sqrt(npx * npx + x2)));
  }
  const Scalar arg = npx * npx - x2;
  if (arg <= 0) return FourVector<Scalar>::Zero();
  return np * (charge / (Scalar(4) * pi * sqrt(arg)));
}

}  // namespace offshell
