#include <vector>

#include "support.hpp"

using namespace offshell;

TEST_SUITE("quadrature") {

TEST_CASE("polynomials and smooth functions") {
  const auto r = integrate([](double x) { return x * x * x - 2 * x + 1; }, -1.0, 2.0);
  CHECK(r.converged);
  CHECK(std::abs(r.value - (15.0 / 4.0 - 3.0 + 3.0)) <= 1e-14);
  const auto e = integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0);
  CHECK(std::abs(e.value - std::sqrt(std::numbers::pi)) <= 1e-13);
}

TEST_CASE("endpoint singularity with graded breakpoints") {
  const auto breaks = graded_breakpoints(0.0, 1e-6, 1.0);
  CHECK(breaks.front() == 0.0);
  CHECK(breaks.back() == doctest::Approx(1.0));
  CHECK(std::is_sorted(breaks.begin(), breaks.end()));
  const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, std::span<const double>(breaks));
  CHECK(std::abs(r.value - 2.0) <= 1e-10);
  CHECK(r.abs_error >= 0.0);
}

TEST_CASE("leftward grading") {
  const auto breaks = graded_breakpoints(1.0, 1e-4, -1.0);
  CHECK(breaks.front() == doctest::Approx(0.0));
  CHECK(breaks.back() == 1.0);
  CHECK(std::is_sorted(breaks.begin(), breaks.end()));
  const auto r = integrate([](double x) { return std::log(1.0 - x); }, std::span<const double>(breaks));
  CHECK(std::abs(r.value + 1.0) <= 1e-10);
}

TEST_CASE("bad grading arguments are rejected") {
  test::check_error(Errc::InvalidArgument, [] { graded_breakpoints(0.0, 0.0, 1.0); });
  test::check_error(Errc::InvalidArgument, [] { graded_breakpoints(0.0, 0.1, 1.0, 1.0); });
}

TEST_CASE("non-finite integrand is not reported as converged") {
  const auto r = integrate([](double x) { return x > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 1.0; }, 0.0,
                           1.0);
  CHECK_FALSE(r.converged);
}

}
