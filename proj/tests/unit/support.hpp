#pragma once

#include <random>

#include <doctest.h>

#include "offshell/offshell.hpp"

namespace offshell::test {

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20240601);
  return engine;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline FourVector<double> random4(double lo = -2.0, double hi = 2.0) {
  return make_four<double>(uniform(lo, hi), uniform(lo, hi), uniform(lo, hi), uniform(lo, hi));
}

inline FiveVector<double> random5(double lo = -2.0, double hi = 2.0) {
  return make_five<double>(uniform(lo, hi), uniform(lo, hi), uniform(lo, hi), uniform(lo, hi), uniform(lo, hi));
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

template <typename A, typename B>
double rel_diff_vec(const A& a, const B& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

template <typename F>
void check_error(Errc expected, F&& f) {
  bool thrown = false;
  try {
    f();
  } catch (const Error& e) {
    thrown = true;
    CHECK_MESSAGE(e.code() == expected, e.what());
  }
  CHECK_MESSAGE(thrown, "expected ", to_string(expected));
}

}  // namespace offshell::test
