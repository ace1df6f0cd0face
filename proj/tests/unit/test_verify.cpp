#include "support.hpp"

using namespace offshell;
using offshell::test::check_error;

namespace {

const Signature kP = Signature::four_one();
const Signature kM = Signature::three_two();

UniformSource<double> source(const FiveVector<double>& b, double charge = 1.0) {
  UniformSource<double> s;
  s.b = b;
  s.charge = charge;
  return s;
}

FieldSampler potential(const UniformSource<double>& src, Signature sig) {
  return [src, sig](const FourVector<double>& x, double tau) -> Eigen::VectorXd {
    return smooth_potential(src, sig, x, tau);
  };
}

FieldSampler scalar(std::function<double(const FourVector<double>&, double)> f) {
  return [f](const FourVector<double>& x, double tau) -> Eigen::VectorXd {
    Eigen::VectorXd v(1);
    v(0) = f(x, tau);
    return v;
  };
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("wave residual of the smooth fields converges at second order") {
  const auto src = source(make_five(2.0, 0.3, 0.0, 0.0, 1.0));
  for (Signature sig : {kP, kM}) {
    const auto src_sig = sig == kP ? src : source(make_five(0.2, 2.0, 0.0, 0.0, 1.0));
    REQUIRE(classify(src_sig, sig).zeta == -1);
    const FourVector<double> x = make_four(0.3, 1.2, -0.7, 0.4);
    const double tau = 0.25;
    const auto rep = dalembert_residual(potential(src_sig, sig), sig, x, tau, default_stencil_spacing(x, tau));
    CHECK(rep.normalized_residual <= 1e-4);
    CHECK(rep.order_estimate == doctest::Approx(2.0).epsilon(0.15));
  }
}

TEST_CASE("wave residual of affine and quadratic test fields") {
  for (Signature sig : {kP, kM}) {
    const FourVector<double> x = make_four(0.3, 1.2, -0.7, 0.4);
    const auto affine = scalar([](const FourVector<double>& y, double t) {
      return 1.5 - 2.0 * y(0) + 0.5 * y(1) + 3.0 * y(3) - 0.7 * t;
    });
    const auto lin = dalembert_residual(affine, sig, x, 0.2, 1e-2);
    CHECK(lin.residual <= 1e-10);
    // Contracted square: each axis contributes eta^aa * 2 eta_aa.
    const auto square = scalar([sig](const FourVector<double>& y, double t) {
      return contract5(make_five<double>(y, t), make_five<double>(y, t), sig);
    });
    CHECK(dalembert_residual(square, sig, x, 0.2, 1e-2).residual == doctest::Approx(10.0).epsilon(1e-8));
    // Euclidean square: the signs of the operator survive.
    const auto euclid = scalar([](const FourVector<double>& y, double t) { return y.squaredNorm() + t * t; });
    CHECK(dalembert_residual(euclid, sig, x, 0.2, 1e-2).residual ==
          doctest::Approx(std::abs(2.0 * (2.0 + sig.s5<double>()))).epsilon(1e-8));
  }
}

TEST_CASE("stencil touching the pole is reported") {
  const auto src = source(make_five(2.0, 0.0, 0.0, 0.0, 1.0));
  check_error(Errc::StencilOnSupport, [&] {
    dalembert_residual(potential(src, kP), kP, make_four(1e-3, 0.0, 0.0, 0.0), 0.0, 1e-3);
  });
  check_error(Errc::InvalidArgument, [&] {
    dalembert_residual(potential(src, kP), kP, make_four(0.0, 1.0, 0.0, 0.0), 0.0, 0.0);
  });
}

TEST_CASE("continuity of the mollified current") {
  const double w = 0.2;
  const auto still = source(make_five(0.0, 0.0, 0.0, 0.0, 1.0));
  const auto rs = continuity_residual(still, make_four(0.05, 0.1, -0.1, 0.0), 0.3, 1e-3 * w, w);
  CHECK(rs.residual <= 1e-12);
  const auto moving = source(make_five(1.5, 0.4, -0.2, 0.1, 1.0));
  const FourVector<double> x = event_position(moving, 0.3) + make_four(0.1, 0.05, -0.1, 0.08);
  const auto rm = continuity_residual(moving, x, 0.3, 1e-3 * w, w);
  CHECK(rm.normalized_residual <= 1e-4);
  CHECK(rm.order_estimate == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("gradient check on the analytic field tensor") {
  const auto src = source(make_five(2.0, 0.0, 0.0, 0.0, 1.0));
  const FourVector<double> x = make_four(0.3, 1.2, -0.7, 0.4);
  const double tau = 0.25;
  const auto f = field_tensor(src, kP, x, tau);
  const double h = 1e-4 * std::max({x.norm(), tau, 1.0});
  const double dev = gradient_check(f, potential(src, kP), kP, x, tau, h);
  CHECK(dev <= 1e-6);
  const double coarse = gradient_check(f, potential(src, kP), kP, x, tau, 1e-2);
  const double fine = gradient_check(f, potential(src, kP), kP, x, tau, 5e-3);
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.1));
  const FieldTensor<double> zero = FieldTensor<double>::Zero();
  const auto uniform = scalar([](const FourVector<double>&, double) { return 2.5; });
  const FieldSampler constant = [](const FourVector<double>&, double) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(5, 2.5);
  };
  CHECK(gradient_check(zero, constant, kP, x, tau, 1e-3) == 0.0);
  test::check_error(Errc::InvalidArgument, [&] { gradient_check(zero, uniform, kP, x, tau, 1e-3); });
}

TEST_CASE("distributional pairing") {
  const auto src = source(make_five(0.5, 0.1, 0.0, 0.0, 1.0), 1.0);
  const FourVector<double> x = make_four(0.3, 1.5, 0.0, 0.0);
  const auto surf = std::get<SingularSurface<double>>(eval_field(src, kP, x, 0.0));
  REQUIRE(surf.roots.has_value());
  const auto [t1, t2] = *surf.roots;
  // Unit test function over a window holding both roots.
  const double unit = mollified_pairing(surf, x, [](double) { return 1.0; }, 1e-3);
  CHECK(std::abs(unit - 2.0 * surf.root_coefficient) <= 1e-6 * surf.root_coefficient);
  // Narrow Gaussian far from both roots.
  const double far = std::max(t1, t2) + 5.0;
  const auto off = [far](double t) { return std::exp(-0.5 * (t - far) * (t - far) / 0.01); };
  CHECK(mollified_pairing(surf, x, off, 1e-3) <= 1e-12);
  CHECK(std::abs(surf.root_coefficient * (off(t1) + off(t2))) <= 1e-12);
  // Generic Gaussian.
  const auto generic = [](double t) { return std::exp(-0.5 * (t - 0.4) * (t - 0.4) / 2.0); };
  CHECK(pairing_check(surf, x, generic, 1e-2) <= 1e-6);
}

TEST_CASE("mollified density has unit mass") {
  const auto src = source(make_five(1.5, 0.3, 0.0, 0.0, 1.0));
  for (double w : {0.05, 0.3, 2.0}) CHECK(std::abs(mollified_mass(src, 0.7, w) - 1.0) <= 1e-10);
}

}
