#pragma once

// Globally adaptive Gauss-Kronrod (10/21) quadrature over a caller-seeded
// partition. Intervals are refined worst-error-first; the order of work is
// fully deterministic.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

namespace offshell {

struct QuadratureOptions {
  double abs_tol = 0.0;
  double rel_tol = 1e-12;
  std::size_t max_intervals = 20000;
};

struct IntegralEstimate {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

namespace detail {

struct Segment {
  double a;
  double b;
  double value;
  double error;
};

inline constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525808829, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the odd Kronrod nodes 1, 3, 5, 7, 9.
inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <typename F>
Segment gauss_kronrod_21(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = kKronrodWeights[10] * fc;
  double gauss = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

inline bool worse(const Segment& lhs, const Segment& rhs) { return lhs.error < rhs.error; }

}  // namespace detail

/// Integrates f over [breaks.front(), breaks.back()], starting from the partition `breaks`
/// (ascending). Stops once the summed error estimate is below max(abs_tol, rel_tol |I|).
template <typename F>
IntegralEstimate integrate(F&& f, std::span<const double> breaks, const QuadratureOptions& opts = {}) {
  IntegralEstimate out;
  std::vector<detail::Segment> heap;
  heap.reserve(std::max<std::size_t>(breaks.size(), 16));
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    heap.push_back(detail::gauss_kronrod_21(f, breaks[i], breaks[i + 1]));
    out.evaluations += 21;
  }
  std::make_heap(heap.begin(), heap.end(), detail::worse);

  auto totals = [&heap]() {
    double value = 0.0;
    double error = 0.0;
    for (const auto& s : heap) {
      value += s.value;
      error += s.error;
    }
    return std::pair{value, error};
  };

  auto [value, error] = totals();
  while (!heap.empty()) {
    if (!std::isfinite(value) || !std::isfinite(error)) break;
    if (error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value))) {
      out.converged = true;
      break;
    }
    if (heap.size() >= opts.max_intervals) break;
    std::pop_heap(heap.begin(), heap.end(), detail::worse);
    const detail::Segment worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval cannot be split further in double precision.
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), detail::worse);
      break;
    }
    const detail::Segment left = detail::gauss_kronrod_21(f, worst.a, mid);
    const detail::Segment right = detail::gauss_kronrod_21(f, mid, worst.b);
    out.evaluations += 42;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), detail::worse);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), detail::worse);
    if (heap.size() % 64 == 0) std::tie(value, error) = totals();
  }
  std::tie(out.value, out.abs_error) = totals();
  if (!out.converged) {
    out.converged = std::isfinite(out.value) &&
                    out.abs_error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(out.value));
  }
  return out;
}

template <typename F>
IntegralEstimate integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
  const std::array<double, 2> breaks{a, b};
  return integrate(std::forward<F>(f), std::span<const double>(breaks), opts);
}

/// Breakpoints start, start + w, start + w r, start + w r^2, ... up to start + length, for
/// resolving a boundary layer of width w at `start`. A negative length grades leftwards;
/// the result is always ascending.
std::vector<double> graded_breakpoints(double start, double first_width, double length, double ratio = 4.0);

}  // namespace offshell
