// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "offshell/offshell.hpp"

using namespace offshell;

namespace {

constexpr double kPi = std::numbers::pi;
const Signature kP = Signature::four_one();
const Signature kM = Signature::three_two();

std::mt19937_64 rng(987654321);

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Vec4 random4(double lo, double hi) { return make_four(uniform(lo, hi), uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)); }

Source source(const Vec5& b, double charge = 1.0) {
  Source s;
  s.b = b;
  s.charge = charge;
  return s;
}

double rel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double s = std::max(a.norm(), b.norm());
  return s == 0.0 ? 0.0 : (a - b).norm() / s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// A zeta = -1 source with |b.b| >= 0.1 and a moving 4D part.
Source random_smooth_source(Signature sig) {
  while (true) {
    const Vec5 b = make_five(uniform(-2.5, 2.5), uniform(-2.5, 2.5), uniform(-1, 1), uniform(-1, 1), 1.0);
    const auto reg = classify(b, sig);
    if (reg.zeta == -1 && std::abs(reg.bb) >= 0.1 && b.head<4>().norm() > 0.1) return source(b, uniform(0.5, 2.0));
  }
}

// A point whose relative distance to the field's pole surface is at least `margin`.
std::pair<Vec4, double> random_point(const Source& src, Signature sig, double margin) {
  while (true) {
    const Vec4 x = random4(-2, 2);
    const double tau = uniform(-1, 1);
    const Vec5 rel5 = src.relative(x, tau);
    if (rel5.norm() < 0.2) continue;
    if (std::abs(smooth_denominator(src, sig, x, tau)) >= margin * rel5.squaredNorm()) return {x, tau};
  }
}

Outcome criterion1() {
  Outcome o;
  const double e = 1.3;
  const auto src = source(make_five(0.0, 0.0, 0.0, 0.0, 1.0), e);
  double worst_w = 0.0;
  double worst_q = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vec4 x = random4(-3, 3);
    const double tau = uniform(-3, 3);
    const auto v = eval_field(src, kP, x, tau);
    if (!std::holds_alternative<SingularSurface<double>>(v)) return {false, "static source did not give a delta surface"};
    const auto& s = std::get<SingularSurface<double>>(v);
    worst_w = std::max(worst_w, std::abs(s.weight - e / (4 * kPi)) / (e / (4 * kPi)));
    worst_q = std::max(worst_q, std::abs(s.quadric(x, tau) + contract4(x, x)) / x.squaredNorm());
  }
  const int reps = 10000;
  const auto t0 = std::chrono::steady_clock::now();
  double sink = 0.0;
  for (int k = 0; k < reps; ++k) {
    const auto v = eval_field(src, kP, make_four(0.1 * k, 1.0, 0.0, 0.0), 0.0);
    sink += std::get<SingularSurface<double>>(v).q_value;
  }
  const double per_call = seconds_since(t0) / reps;
  o.pass = worst_w <= 1e-12 && worst_q <= 1e-12 && per_call < 1e-3 && std::isfinite(sink);
  o.detail = "weight err " + fmt("%.1e", worst_w) + ", Q err " + fmt("%.1e", worst_q) + ", " +
             fmt("%.2e", per_call) + " s/call";
  return o;
}

Outcome criterion2() {
  struct Row {
    Signature sig;
    Vec5 b;
    int zeta;
    int sign_bb;
    RegimeLabel label;
    bool above_shell;  // m^2 > M^2 for (4,1), -m^2 > M^2 for (3,2)
  };
  const Row rows[] = {
      {kP, make_five(0.5, 0.0, 0.0, 0.0, 1.0), 1, 1, RegimeLabel::Undershell, false},
      {kP, make_five(2.0, 0.0, 0.0, 0.0, 1.0), -1, -1, RegimeLabel::Supershell, true},
      {kM, make_five(0.0, 0.5, 0.0, 0.0, 1.0), 1, -1, RegimeLabel::UnderSpacelike, false},
      {kM, make_five(0.0, 2.0, 0.0, 0.0, 1.0), -1, 1, RegimeLabel::SuperSpacelike, true},
  };
  int ok = 0;
  for (const Row& r : rows) {
    const auto reg = classify(r.b, r.sig);
    const double shell = r.sig == kP ? reg.mass_ratio_sq : -reg.mass_ratio_sq;
    if (reg.zeta == r.zeta && reg.sign_bb == r.sign_bb && reg.label == r.label && (shell > 1.0) == r.above_shell) ++ok;
  }
  return {ok == 4, std::to_string(ok) + "/4 rows"};
}

struct OracleStats {
  double worst_rel = 0.0;
  double worst_div = 0.0;
  double seconds = 0.0;
  int points = 0;
  int failures = 0;
  std::string first_failure;
};

const OracleStats& oracle_run() {
  static const OracleStats stats = [] {
    OracleStats s;
    const auto t0 = std::chrono::steady_clock::now();
    for (Signature sig : {kP, kM}) {
      for (int k = 0; k < 50; ++k) {
        const Source src = random_smooth_source(sig);
        const auto [x, tau] = random_point(src, sig, 0.05);
        try {
          const auto ex = extrapolate_ums(src, sig, x, tau);
          const Vec5 closed = smooth_potential(src, sig, x, tau);
          s.worst_rel = std::max(s.worst_rel, rel(ex.value, closed));
          s.worst_div = std::max(s.worst_div, std::abs(ex.divergent_coefficient) / std::abs(ex.regular_coefficient));
        } catch (const Error& e) {
          ++s.failures;
          if (s.first_failure.empty()) s.first_failure = e.what();
        }
        ++s.points;
      }
    }
    s.seconds = seconds_since(t0);
    return s;
  }();
  return stats;
}

Outcome criterion3() {
  const auto& s = oracle_run();
  Outcome o;
  o.pass = s.failures == 0 && s.worst_rel <= 1e-3 && s.seconds < 60.0;
  o.detail = std::to_string(s.points) + " points, max rel err " + fmt("%.2e", s.worst_rel) + ", " +
             fmt("%.2f", s.seconds) + " s";
  if (s.failures) o.detail += ", " + std::to_string(s.failures) + " errors (" + s.first_failure + ")";
  return o;
}

Outcome criterion4() {
  const auto& s = oracle_run();
  return {s.failures == 0 && s.worst_div <= 1e-3, "max |c1|/|c0| " + fmt("%.2e", s.worst_div)};
}

Outcome criterion5() {
  Outcome o;
  struct Regime5 {
    Signature sig;
    int zeta;
    int sign_bb;
  };
  const Regime5 regimes[] = {{kP, 1, 1}, {kP, -1, -1}, {kM, 1, -1}, {kM, -1, 1}};
  double worst = 0.0;
  int failures = 0;
  std::string first;
  for (const auto& r : regimes) {
    int seen = 0;
    while (seen < 20) {
      const Vec5 b = make_five(uniform(-2.5, 2.5), uniform(-2.5, 2.5), uniform(-1, 1), uniform(-1, 1), 1.0);
      const auto reg = classify(b, r.sig);
      if (reg.zeta != r.zeta || reg.sign_bb != r.sign_bb || std::abs(reg.bb) < 0.1) continue;
      const Vec4 n4 = reg.n.head<4>();
      if (n4.norm() < 0.1 || std::abs(contract4(n4, n4)) < 0.05 * n4.squaredNorm()) continue;
      const Source src = source(b, uniform(0.5, 2.0));
      const Vec4 x = random4(-2, 2);
      const double d = std::pow(contract4(n4, x), 2) - contract4(n4, n4) * contract4(x, x);
      if (std::abs(d) < 0.05 * n4.squaredNorm() * x.squaredNorm() || x.norm() < 0.2) continue;
      ++seen;
      try {
        const Vec4 closed = concatenate(src, r.sig, x);
        const Vec4 num = concatenate_numeric(src, r.sig, x, 1e3 * std::max(1.0, x.norm()));
        const double err = closed.norm() > 0 ? rel(num, closed)
                                              : num.norm() / (src.charge / (4 * kPi * x.norm()));
        worst = std::max(worst, err);
      } catch (const Error& e) {
        ++failures;
        if (first.empty()) first = e.what();
      }
    }
  }
  const auto rest = source(make_five(2.0, 0.0, 0.0, 0.0, 1.0), 1.7);
  double coulomb = 0.0;
  double coulomb_num = 0.0;
  for (double r : {0.3, 1.0, 4.0}) {
    const double expect = 1.7 / (4 * kPi * r);
    const Vec4 x = make_four(0.0, 0.0, r, 0.0);
    const Vec4 A = concatenate(rest, kP, x);
    coulomb = std::max(coulomb, std::abs(A(0) - expect) / expect + A.tail<3>().norm());
    coulomb_num = std::max(coulomb_num, std::abs(concatenate_numeric(rest, kP, x, 1e3 * r)(0) - expect) / expect);
  }
  o.pass = failures == 0 && worst <= 1e-6 && coulomb <= 1e-12 && coulomb_num <= 1e-6;
  o.detail = "80 points, max rel err " + fmt("%.2e", worst) + ", Coulomb closed " + fmt("%.1e", coulomb) +
             " numeric " + fmt("%.1e", coulomb_num);
  if (failures) o.detail += ", " + std::to_string(failures) + " errors (" + first + ")";
  return o;
}

Outcome criterion6() {
  double worst_norm = 0.0;
  double worst_order = 0.0;
  int checked = 0;
  for (Signature sig : {kP, kM}) {
    for (int k = 0; k < 10; ++k) {
      const Source src = random_smooth_source(sig);
      const auto [x, tau] = random_point(src, sig, 0.2);
      const FieldSampler f = [src, sig](const Vec4& y, double t) -> Eigen::VectorXd {
        return smooth_potential(src, sig, y, t);
      };
      const auto rep = dalembert_residual(f, sig, x, tau, default_stencil_spacing(x, tau));
      worst_norm = std::max(worst_norm, rep.normalized_residual);
      worst_order = std::max(worst_order, std::abs(rep.order_estimate - 2.0));
      ++checked;
    }
    int seen = 0;
    while (seen < 10) {
      const Vec4 x = random4(-2, 2);
      const double tau = uniform(-2, 2);
      const double u = -sig.s5<double>() * (contract4(x, x) + sig.s5<double>() * tau * tau);
      if (u < 0.2 * (x.squaredNorm() + tau * tau)) continue;
      ++seen;
      const FieldSampler g = [sig](const Vec4& y, double t) -> Eigen::VectorXd {
        Eigen::VectorXd v(1);
        v(0) = eval_unified<double>(sig, y, t, 0.0).smooth;
        return v;
      };
      const auto rep = dalembert_residual(g, sig, x, tau, default_stencil_spacing(x, tau));
      worst_norm = std::max(worst_norm, rep.normalized_residual);
      worst_order = std::max(worst_order, std::abs(rep.order_estimate - 2.0));
      ++checked;
    }
  }
  const bool pass = worst_norm <= 1e-4 && worst_order <= 0.3;
  return {pass, std::to_string(checked) + " points, max normalized " + fmt("%.2e", worst_norm) +
                    ", max |order - 2| " + fmt("%.3f", worst_order)};
}

Outcome criterion7() {
  double worst = 0.0;
  double asym = 0.0;
  for (Signature sig : {kP, kM}) {
    for (int k = 0; k < 20; ++k) {
      const Source src = random_smooth_source(sig);
      const auto [x, tau] = random_point(src, sig, 0.2);
      const auto f = field_tensor(src, sig, x, tau);
      asym = std::max(asym, (f + f.transpose()).cwiseAbs().maxCoeff());
      const FieldSampler a = [src, sig](const Vec4& y, double t) -> Eigen::VectorXd {
        return smooth_potential(src, sig, y, t);
      };
      // Local length over which the field varies: |D| / |grad D|. For nearly lightlike b the
      // normalized velocity is long and this is much shorter than |X|.
      const Vec5 n = normalized_velocity(src.b, sig);
      const Vec5 X = src.relative(x, tau);
      const Vec5 grad_d = 2.0 * (contract5(n, X, sig) * lower(n, sig) + sig.s5<double>() * lower(X, sig));
      const double h = 1e-4 * std::abs(smooth_denominator(src, sig, x, tau)) / grad_d.norm();
      worst = std::max(worst, gradient_check(f, a, sig, x, tau, h));
    }
  }
  return {worst <= 1e-6 && asym == 0.0, "max rel dev " + fmt("%.2e", worst) + ", antisymmetry " + fmt("%.0e", asym)};
}

// Zeros of the 5D quadric along tau, independent of the closed-form root formula.
std::vector<double> bisect_quadric(const Vec5& n, Signature sig, const Vec4& x, double L) {
  const auto q = [&](double t) {
    const Vec5 X = make_five<double>(x, t);
    const double nx = contract5(n, X, sig);
    return nx * nx - sig.s5<double>() * contract5(X, X, sig);
  };
  std::vector<double> roots;
  const int samples = 400000;
  double a = -L;
  double fa = q(a);
  for (int i = 1; i <= samples; ++i) {
    const double b = -L + 2 * L * i / samples;
    const double fb = q(b);
    if ((fa < 0) != (fb < 0)) {
      double l = a;
      double r = b;
      const bool neg_left = q(l) < 0;
      for (int it = 0; it < 200 && r - l > 0; ++it) {
        const double m = 0.5 * (l + r);
        if (m == l || m == r) break;
        ((q(m) < 0) == neg_left ? l : r) = m;
      }
      roots.push_back(0.5 * (l + r));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

Outcome criterion8() {
  double worst_root = 0.0;
  double worst_vieta = 0.0;
  int cases = 0;
  for (Signature sig : {kP, kM}) {
    while (cases < (sig == kP ? 20 : 40)) {
      const Vec5 b = make_five(uniform(-1.2, 1.2), uniform(-1.2, 1.2), uniform(-0.5, 0.5), uniform(-0.5, 0.5), 1.0);
      const auto reg = classify(b, sig);
      const Vec4 bp = reduced_velocity(b);
      const double b2 = contract4(bp, bp);
      if (reg.zeta != 1 || std::abs(b2) < 0.1) continue;
      const Vec4 x = random4(-2, 2);
      std::pair<double, double> r;
      try {
        r = tau_roots(bp, sig, x);
      } catch (const Error&) {
        continue;
      }
      const double L = 50.0 * (1.0 + std::max(std::abs(r.first), std::abs(r.second)));
      if (r.second - r.first < 100.0 * 2 * L / 400000) continue;
      const auto ref = bisect_quadric(reg.n, sig, x, L);
      if (ref.size() != 2) return {false, "bisection found " + std::to_string(ref.size()) + " roots"};
      worst_root = std::max({worst_root, std::abs(r.first - ref[0]), std::abs(r.second - ref[1])});
      const double sum = 2 * contract4(bp, x) / b2;
      const double prod = (contract4(x, x) - sig.s5<double>() * (std::pow(contract4(bp, x), 2) - b2 * contract4(x, x))) / b2;
      worst_vieta = std::max({worst_vieta, std::abs(r.first + r.second - sum) / std::max(1.0, std::abs(sum)),
                              std::abs(r.first * r.second - prod) / std::max(1.0, std::abs(prod))});
      ++cases;
    }
  }
  return {worst_root <= 1e-10 && worst_vieta <= 1e-12,
          std::to_string(cases) + " cases, root dev " + fmt("%.1e", worst_root) + ", Vieta " + fmt("%.1e", worst_vieta)};
}

Outcome criterion9() {
  const auto src = source(make_five(0.5, 0.1, 0.0, 0.0, 1.0), 1.0);
  double worst = 0.0;
  int done = 0;
  while (done < 10) {
    const Vec4 x = random4(-2, 2);
    const auto v = eval_field(src, kP, x, 0.0);
    const auto& surf = std::get<SingularSurface<double>>(v);
    if (!surf.roots) continue;
    const auto [t1, t2] = *surf.roots;
    const double centre = uniform(t1 - 1.0, t2 + 1.0);
    const double width = uniform(0.3, 2.0);
    const auto phi = [centre, width](double t) { return std::exp(-0.5 * (t - centre) * (t - centre) / (width * width)); };
    worst = std::max(worst, pairing_check(surf, x, phi, 1e-2));
    ++done;
  }
  return {worst <= 1e-6, "10 test functions, max |closed - mollified| " + fmt("%.2e", worst)};
}

Outcome criterion10() {
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const ThreeVector<double> x3(uniform(-3, 3), uniform(-3, 3), uniform(-3, 3));
    const double t = x3.norm() * uniform(1.01, 3.0) + 1e-3;
    const auto G = eval_classic_41<double>(x3, t, Classic41Variant::G, 0.0);
    const auto H = eval_classic_41<double>(x3, t, Classic41Variant::H, 0.0);
    worst = std::max(worst, std::abs(H.smooth - G.smooth) / std::abs(G.smooth));
  }
  int nonzero = 0;
  for (int k = 0; k < 1000; ++k) {
    const double tau = k == 0 ? 0.0 : -uniform(0, 5);
    if (eval_tau_retarded<double>(random4(-3, 3), tau) != 0.0) ++nonzero;
  }
  return {worst <= 1e-12 && nonzero == 0,
          "G/H max rel diff " + fmt("%.1e", worst) + ", tau<=0 nonzero count " + std::to_string(nonzero)};
}

Outcome criterion11() {
  double worst_k = 0.0;
  double worst_f = 0.0;
  for (Signature sig : {kP, kM}) {
    int seen = 0;
    while (seen < 200) {
      const Vec4 x = random4(-2, 2);
      const double tau = uniform(-2, 2);
      const double lambda = uniform(0.1, 10);
      const double u = -sig.s5<double>() * (contract4(x, x) + sig.s5<double>() * tau * tau);
      if (u < 1e-3 * (x.squaredNorm() + tau * tau)) continue;
      ++seen;
      const double base = eval_unified<double>(sig, x, tau, 0.0).smooth;
      const double scaled = eval_unified<double>(sig, Vec4(lambda * x), lambda * tau, 0.0).smooth;
      worst_k = std::max(worst_k, std::abs(scaled * std::pow(lambda, 3) - base) / std::abs(base));
    }
    for (int k = 0; k < 200; ++k) {
      const Source src = random_smooth_source(sig);
      const auto [x, tau] = random_point(src, sig, 1e-3);
      const double lambda = uniform(0.1, 10);
      const Vec5 base = smooth_potential(src, sig, x, tau);
      const Vec5 scaled = smooth_potential(src, sig, Vec4(lambda * x), lambda * tau);
      worst_f = std::max(worst_f, rel(scaled * lambda * lambda, base));
    }
  }
  return {worst_k <= 1e-12 && worst_f <= 1e-12,
          "kernel degree -3 dev " + fmt("%.1e", worst_k) + ", field degree -2 dev " + fmt("%.1e", worst_f)};
}

Outcome criterion12() {
  EventState s0;
  s0.x = make_four(0.0, 1.0, 0.0, 0.0);
  s0.u = make_four(1.0, 0.0, 0.3, 0.0);
  const auto free = integrate(source(make_five(2.0, 0.0, 0.0, 0.0, 1.0), 0.0), kP, s0, 1.0, 1.0, 1e-2, 10000);
  double free_dev = 0.0;
  for (const auto& s : free) {
    free_dev = std::max(free_dev, (s.x - (s0.x + s0.u * s.tau)).cwiseAbs().maxCoeff() / (1.0 + s.tau));
  }
  const Source src = source(make_five(2.0, 0.0, 0.0, 0.0, 1.0), 10.0);
  const auto t0 = std::chrono::steady_clock::now();
  const auto coarse = integrate(src, kP, s0, 1.0, 1.0, 1e-2, 10000);
  const double run_seconds = seconds_since(t0);
  const auto fine = integrate(src, kP, s0, 1.0, 1.0, 5e-3, 20000);
  const auto ref = integrate(src, kP, s0, 1.0, 1.0, 1.25e-3, 80000);
  const auto err = [&](const EventState& e) { return (e.x - ref.back().x).norm() + (e.u - ref.back().u).norm(); };
  const double ratio = err(coarse.back()) / err(fine.back());
  const bool pass = free_dev <= 10000 * std::numeric_limits<double>::epsilon() && std::abs(ratio - 16.0) <= 0.3 * 16.0 && run_seconds < 5.0;
  return {pass, "free-motion dev " + fmt("%.1e", free_dev) + ", ratio " + fmt("%.2f", ratio) + ", 1e4 steps in " +
                    fmt("%.3f", run_seconds) + " s"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"static source reduces to (e/4pi) delta(x^2)", criterion1},
      {"regime table in both metrics", criterion2},
      {"extrapolated convolution matches closed-form fields", criterion3},
      {"1/rho coefficient cancels", criterion4},
      {"numeric concatenation matches closed form", criterion5},
      {"wave-equation residual converges at second order", criterion6},
      {"field tensor against finite differences", criterion7},
      {"tau roots against bisection and Vieta", criterion8},
      {"delta-surface pairing against mollified pairing", criterion9},
      {"classic kernel pair identity and tau-retardation", criterion10},
      {"kernel and field homogeneity", criterion11},
      {"Runge-Kutta integrator exactness and order", criterion12},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
