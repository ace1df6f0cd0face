#pragma once

// Signature-aware 4D/5D vector algebra.
//
// Component layout: a FourVector is (t, x, y, z) with metric diag(-,+,+,+);
// a FiveVector appends the fifth (tau-like) component at index 4, so the 5D
// metric is diag(-,+,+,+,sigma5). Contravariant components are stored; the
// contractions below apply the metric.

#include <Eigen/Core>

#include <cmath>

#include "offshell/error.hpp"

namespace offshell {

template <typename Scalar>
using FourVector = Eigen::Matrix<Scalar, 4, 1>;

template <typename Scalar>
using FiveVector = Eigen::Matrix<Scalar, 5, 1>;

template <typename Scalar>
using ThreeVector = Eigen::Matrix<Scalar, 3, 1>;

/// Contravariant field tensor f^{ab}, a,b in {0,1,2,3,5} (stored 0..4).
template <typename Scalar>
using FieldTensor = Eigen::Matrix<Scalar, 5, 5>;

inline constexpr int kFifth = 4;

inline constexpr double kDegenerateFifthTolerance = 1e-12;

/// Metric signature of the fifth axis: +1 for O(4,1), -1 for O(3,2).
class Signature {
 public:
  static constexpr Signature four_one() { return Signature(1); }
  static constexpr Signature three_two() { return Signature(-1); }

  static Signature from_sigma5(int sigma5) {
    if (sigma5 != 1 && sigma5 != -1) {
      throw Error(Errc::InvalidArgument, "sigma5 must be +1 or -1, got " + std::to_string(sigma5));
    }
    return Signature(sigma5);
  }

  constexpr int sigma5() const { return sigma5_; }

  template <typename Scalar>
  constexpr Scalar s5() const {
    return static_cast<Scalar>(sigma5_);
  }

  /// Diagonal entry eta_{aa} of the 5D metric.
  template <typename Scalar>
  constexpr Scalar eta(int index) const {
    return index == 0 ? Scalar(-1) : (index == kFifth ? s5<Scalar>() : Scalar(1));
  }

  template <typename Scalar>
  FiveVector<Scalar> metric_diagonal() const {
    FiveVector<Scalar> d;
    d << Scalar(-1), Scalar(1), Scalar(1), Scalar(1), s5<Scalar>();
    return d;
  }

  friend constexpr bool operator==(Signature, Signature) = default;

 private:
  constexpr explicit Signature(int sigma5) : sigma5_(sigma5) {}
  int sigma5_;
};

/// Maxwell charge e, event charge e0 and the length scale lambda, tied by e = e0 / lambda.
template <typename Scalar>
struct Constants {
  Scalar e;
  Scalar e0;
  Scalar lambda;

  static Constants from_event_charge(Scalar e0, Scalar lambda) {
    if (!(lambda != Scalar(0))) {
      throw Error(Errc::InvalidArgument, "lambda must be nonzero");
    }
    return {e0 / lambda, e0, lambda};
  }
};

/// -u^0 v^0 + u.v (spatial dot).
template <typename D1, typename D2>
typename D1::Scalar contract4(const Eigen::MatrixBase<D1>& u, const Eigen::MatrixBase<D2>& v) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(D1, 4)
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(D2, 4)
  return -u(0) * v(0) + u.template tail<3>().dot(v.template tail<3>());
}

/// contract4 of the four-parts plus sigma5 * u^5 v^5.
template <typename D1, typename D2>
typename D1::Scalar contract5(const Eigen::MatrixBase<D1>& u, const Eigen::MatrixBase<D2>& v,
                              Signature sig) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(D1, 5)
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(D2, 5)
  using Scalar = typename D1::Scalar;
  return contract4(u.template head<4>(), v.template head<4>()) +
         sig.s5<Scalar>() * u(kFifth) * v(kFifth);
}

/// Covariant components v_a = eta_{ab} v^b.
template <typename Derived>
FiveVector<typename Derived::Scalar> lower(const Eigen::MatrixBase<Derived>& v, Signature sig) {
  using Scalar = typename Derived::Scalar;
  return sig.metric_diagonal<Scalar>().cwiseProduct(v);
}

template <typename Derived>
FourVector<typename Derived::Scalar> lower4(const Eigen::MatrixBase<Derived>& v) {
  FourVector<typename Derived::Scalar> out = v;
  out(0) = -out(0);
  return out;
}

template <typename Scalar>
FiveVector<Scalar> make_five(const FourVector<Scalar>& mu, Scalar five) {
  FiveVector<Scalar> v;
  v << mu, five;
  return v;
}

template <typename Scalar>
FiveVector<Scalar> make_five(Scalar t, Scalar x, Scalar y, Scalar z, Scalar five) {
  FiveVector<Scalar> v;
  v << t, x, y, z, five;
  return v;
}

template <typename Scalar>
FourVector<Scalar> make_four(Scalar t, Scalar x, Scalar y, Scalar z) {
  FourVector<Scalar> v;
  v << t, x, y, z;
  return v;
}

/// The (3,1) velocity b^mu / b^5 of the source relative to its tau motion.
template <typename Derived>
FourVector<typename Derived::Scalar> reduced_velocity(
    const Eigen::MatrixBase<Derived>& b,
    typename Derived::Scalar tol = typename Derived::Scalar(kDegenerateFifthTolerance)) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 5)
  using std::abs;
  if (!(abs(b(kFifth)) >= tol)) {
    throw Error(Errc::DegenerateFifthComponent, "b^5 is (numerically) zero");
  }
  return b.template head<4>() / b(kFifth);
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

}  // namespace offshell
