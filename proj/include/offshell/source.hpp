#pragma once

// Kinematics of a uniformly moving point event: worldline, velocity-regime
// classification and mass-shell bookkeeping.

#include <cmath>
#include <numbers>
#include <string_view>

#include "offshell/fivespace.hpp"

namespace offshell {

inline constexpr double kLightlikeTolerance = 1e-12;

template <typename Scalar>
struct UniformSource {
  FiveVector<Scalar> b = make_five<Scalar>(0, 0, 0, 0, 1);
  FiveVector<Scalar> offset = FiveVector<Scalar>::Zero();
  Scalar charge = Scalar(1);

  /// z(tau) = offset + b tau.
  FiveVector<Scalar> worldline(Scalar tau) const { return offset + b * tau; }

  /// Observation point expressed relative to the worldline origin.
  FiveVector<Scalar> relative(const FourVector<Scalar>& x, Scalar tau) const {
    return make_five<Scalar>(x, tau) - offset;
  }
};

enum class RegimeLabel { Undershell, Supershell, UnderSpacelike, SuperSpacelike, LightlikeBoundary };

constexpr std::string_view to_string(RegimeLabel label) {
  switch (label) {
    case RegimeLabel::Undershell: return "Undershell";
    case RegimeLabel::Supershell: return "Supershell";
    case RegimeLabel::UnderSpacelike: return "UnderSpacelike";
    case RegimeLabel::SuperSpacelike: return "SuperSpacelike";
    case RegimeLabel::LightlikeBoundary: return "LightlikeBoundary";
  }
  return "Unknown";
}

template <typename Scalar>
struct Regime {
  /// sigma5 * sign(b.b); 0 on the lightlike boundary.
  int zeta = 0;
  Scalar bb = Scalar(0);
  int sign_bb = 0;
  RegimeLabel label = RegimeLabel::LightlikeBoundary;
  /// m^2 / M^2.
  Scalar mass_ratio_sq = Scalar(0);
  /// b / sqrt|b.b|; left equal to b on the lightlike boundary.
  FiveVector<Scalar> n = FiveVector<Scalar>::Zero();

  bool singular() const { return zeta == 1; }
  bool smooth() const { return zeta == -1; }
};

/// m^2/M^2 = sigma5 - b.b, the inversion of b.b = sigma5 (1 - sigma5 m^2/M^2).
template <typename Derived>
typename Derived::Scalar mass_shell_ratio(const Eigen::MatrixBase<Derived>& b, Signature sig) {
  using Scalar = typename Derived::Scalar;
  return sig.s5<Scalar>() - contract5(b, b, sig);
}

template <typename Derived>
FiveVector<typename Derived::Scalar> normalized_velocity(
    const Eigen::MatrixBase<Derived>& b, Signature sig,
    typename Derived::Scalar tol = typename Derived::Scalar(kLightlikeTolerance)) {
  using std::abs;
  using std::sqrt;
  const auto bb = contract5(b, b, sig);
  if (!(abs(bb) > tol)) {
    throw Error(Errc::LightlikeVelocity, "b.b is within tolerance of zero");
  }
  return b / sqrt(abs(bb));
}

template <typename Derived>
Regime<typename Derived::Scalar> classify(
    const Eigen::MatrixBase<Derived>& b, Signature sig,
    typename Derived::Scalar tol = typename Derived::Scalar(kLightlikeTolerance)) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  Regime<Scalar> r;
  r.bb = contract5(b, b, sig);
  r.mass_ratio_sq = mass_shell_ratio(b, sig);
  if (abs(r.bb) <= tol) {
    r.label = RegimeLabel::LightlikeBoundary;
    r.n = b;
    return r;
  }
  r.sign_bb = r.bb > 0 ? 1 : -1;
  r.zeta = sig.sigma5() * r.sign_bb;
  r.n = b / std::sqrt(abs(r.bb));
  if (sig.sigma5() == 1) {
    r.label = r.sign_bb > 0 ? RegimeLabel::Undershell : RegimeLabel::Supershell;
  } else {
    r.label = r.sign_bb < 0 ? RegimeLabel::UnderSpacelike : RegimeLabel::SuperSpacelike;
  }
  return r;
}

template <typename Scalar>
Regime<Scalar> classify(const UniformSource<Scalar>& src, Signature sig,
                        Scalar tol = Scalar(kLightlikeTolerance)) {
  return classify(src.b, sig, tol);
}

/// Distributional descriptor of j^a(x, tau) = b^a delta^4[x - X(tau)].
template <typename Scalar>
struct CurrentSupport {
  bool on_worldline = false;
  FiveVector<Scalar> direction = FiveVector<Scalar>::Zero();
  /// X(tau), the 4D event position at parameter tau.
  FourVector<Scalar> event = FourVector<Scalar>::Zero();
};

/// 4D position of the event at parameter tau: X(tau) = D + b'(tau - D^5).
template <typename Scalar>
FourVector<Scalar> event_position(const UniformSource<Scalar>& src, Scalar tau) {
  const FourVector<Scalar> bprime = reduced_velocity(src.b);
  return src.offset.template head<4>() + bprime * (tau - src.offset(kFifth));
}

template <typename Scalar>
CurrentSupport<Scalar> current_at(const UniformSource<Scalar>& src, const FourVector<Scalar>& x,
                                  Scalar tau, Scalar tol = Scalar(1e-12)) {
  using std::max;
  CurrentSupport<Scalar> out;
  out.direction = src.b;
  out.event = event_position(src, tau);
  const Scalar scale = max(Scalar(1), x.template lpNorm<Eigen::Infinity>());
  out.on_worldline = (x - out.event).template lpNorm<Eigen::Infinity>() <= tol * scale;
  return out;
}

/// Isotropic 4D Gaussian of width w, unit mass over R^4.
template <typename Scalar>
Scalar gaussian4(const FourVector<Scalar>& d, Scalar w) {
  using std::exp;
  const Scalar norm = Scalar(1) / (Scalar(4) * std::numbers::pi_v<Scalar> * std::numbers::pi_v<Scalar> * w * w * w * w);
  return norm * exp(-d.squaredNorm() / (Scalar(2) * w * w));
}

/// Current of the event smeared by a 4D Gaussian of width w:
/// j_w^a(x, tau) = (b^a / |b^5|) N_w(x - X(tau)). Satisfies d_mu j^mu + d_tau j^5 = 0 exactly.
template <typename Scalar>
FiveVector<Scalar> mollified_current(const UniformSource<Scalar>& src, const FourVector<Scalar>& x,
                                     Scalar tau, Scalar w) {
  using std::abs;
  const Scalar density = gaussian4<Scalar>(x - event_position(src, tau), w);
  return src.b * (density / abs(src.b(kFifth)));
}

}  // namespace offshell
