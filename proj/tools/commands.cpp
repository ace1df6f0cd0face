#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace offshell::cli {

namespace {

using Row = std::vector<Cell>;

Cell num(double v) { return Cell{v}; }
Cell str(std::string s) { return Cell{std::move(s)}; }
Cell integer(long long v) { return Cell{v}; }
const Cell kEmpty{};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const Vec5& v) {
  std::string s;
  for (int i = 0; i < 5; ++i) s += (i ? "," : "") + format_double(v(i));
  return s;
}

Vec4 head4(const Vec5& p) { return p.head<4>(); }

void append_point(Row& row, const Vec5& p, bool with_tau = true) {
  for (int i = 0; i < (with_tau ? 5 : 4); ++i) row.push_back(num(p(i)));
}

Source make_source(const RunConfig& cfg, const Vec5& b) {
  Source s;
  s.b = b;
  s.offset = cfg.offset;
  s.charge = cfg.charge;
  return s;
}

std::vector<std::string> point_columns(bool with_tau = true) {
  std::vector<std::string> c{"t", "x", "y", "z"};
  if (with_tau) c.push_back("tau");
  return c;
}

std::string escape_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string version() {
#ifdef OFFSHELL_VERSION
  return OFFSHELL_VERSION;
#else
  return "0.0.0";
#endif
}

std::vector<int> effective_sigma5s(const RunConfig& cfg) {
  if (!cfg.sigma5s.empty()) return cfg.sigma5s;
  if (cfg.command == "regime") return {1, -1};
  return {1};
}

std::vector<Vec5> effective_sources(const RunConfig& cfg) {
  if (!cfg.bs.empty()) return cfg.bs;
  if (cfg.command == "regime") {
    // One timelike and one spacelike reduced velocity on each side of the mass shell.
    return {make_five<double>(0.5, 0, 0, 0, 1), make_five<double>(2, 0, 0, 0, 1),
            make_five<double>(0, 0.5, 0, 0, 1), make_five<double>(0, 2, 0, 0, 1)};
  }
  return {make_five<double>(2, 0.3, 0, 0, 1)};
}

RunConfig with_default_grid(const RunConfig& cfg) {
  RunConfig out = cfg;
  if (!out.grid_set) {
    out.grid[0] = {0.1, 0.1, 1};
    out.grid[1] = {0.5, 2.0, 4};
    out.grid[2] = {0.25, 1.0, 3};
    out.grid[3] = {0.0, 0.0, 1};
    out.grid[4] = {0.2, 0.2, 1};
  }
  return out;
}

CommandResult cmd_regime(const RunConfig& cfg) {
  CommandResult r;
  r.table.columns = {"sigma5", "b0", "b1", "b2", "b3", "b5", "bb", "sign_bb", "zeta", "label", "msq_ratio",
                     "n0", "n1", "n2", "n3", "n5"};
  for (int s5 : effective_sigma5s(cfg)) {
    const Signature sig = Signature::from_sigma5(s5);
    for (const Vec5& b : effective_sources(cfg)) {
      const Regime<double> reg = classify(b, sig);
      Row row{integer(s5)};
      for (int i = 0; i < 5; ++i) row.push_back(num(b(i)));
      row.push_back(num(reg.bb));
      row.push_back(integer(reg.sign_bb));
      row.push_back(integer(reg.zeta));
      row.push_back(str(std::string(to_string(reg.label))));
      row.push_back(num(reg.mass_ratio_sq));
      for (int i = 0; i < 5; ++i) row.push_back(num(reg.n(i)));
      r.table.rows.push_back(std::move(row));
    }
  }
  return r;
}

CommandResult cmd_field(const RunConfig& in) {
  const RunConfig cfg = with_default_grid(in);
  CommandResult r;
  r.table.columns = point_columns();
  for (const char* c : {"a0", "a1", "a2", "a3", "a5", "regime_flag", "q", "weight", "sigma5", "source"}) {
    r.table.columns.emplace_back(c);
  }
  std::size_t total = 0;
  std::size_t on_support = 0;
  const auto points = grid_points(cfg);
  const auto sources = effective_sources(cfg);
  for (int s5 : effective_sigma5s(cfg)) {
    const Signature sig = Signature::from_sigma5(s5);
    for (std::size_t si = 0; si < sources.size(); ++si) {
      const Source src = make_source(cfg, sources[si]);
      for (const Vec5& p : points) {
        Row row;
        append_point(row, p);
        ++total;
        try {
          const FieldValue<double> v = eval_field(src, sig, head4(p), p(kFifth));
          if (const auto* smooth = std::get_if<SmoothField<double>>(&v)) {
            for (int i = 0; i < 5; ++i) row.push_back(num(smooth->a(i)));
            row.push_back(str("smooth"));
            row.push_back(kEmpty);
            row.push_back(kEmpty);
          } else {
            const auto& surf = std::get<SingularSurface<double>>(v);
            for (int i = 0; i < 5; ++i) row.push_back(kEmpty);
            const double scale = (p - src.offset).squaredNorm();
            const bool on = std::abs(surf.q_value) <= 1e-12 * std::max(scale, 1e-300);
            if (on) ++on_support;
            row.push_back(str(on ? "surface-support" : "surface"));
            row.push_back(num(surf.q_value));
            row.push_back(num(surf.weight));
          }
        } catch (const Error& err) {
          if (err.code() != Errc::OnSingularSupport) throw;
          ++on_support;
          for (int i = 0; i < 5; ++i) row.push_back(kEmpty);
          row.push_back(str("pole"));
          row.push_back(kEmpty);
          row.push_back(kEmpty);
        }
        row.push_back(integer(s5));
        row.push_back(integer(static_cast<long long>(si)));
        r.table.rows.push_back(std::move(row));
      }
    }
  }
  if (total > 0 && on_support == total) {
    r.exit_code = kExitAllSingular;
    r.message = "every grid point lies on the singular support";
  }
  return r;
}

CommandResult cmd_concat(const RunConfig& in) {
  const RunConfig cfg = with_default_grid(in);
  CommandResult r;
  r.table.columns = point_columns(false);
  for (const char* c : {"A0", "A1", "A2", "A3", "flag"}) r.table.columns.emplace_back(c);
  if (cfg.oracle) {
    for (const char* c : {"N0", "N1", "N2", "N3", "rel_error"}) r.table.columns.emplace_back(c);
  }
  r.table.columns.emplace_back("sigma5");
  r.table.columns.emplace_back("source");
  const auto sources = effective_sources(cfg);
  for (int s5 : effective_sigma5s(cfg)) {
    const Signature sig = Signature::from_sigma5(s5);
    for (std::size_t si = 0; si < sources.size(); ++si) {
      const Source src = make_source(cfg, sources[si]);
      // The tau axis is irrelevant after integration; visit each (t, x, y, z) once.
      RunConfig flat = cfg;
      flat.grid[4] = {0.0, 0.0, 1};
      for (const Vec5& p : grid_points(flat)) {
        Row row;
        append_point(row, p, false);
        const Vec4 x = head4(p);
        try {
          const Vec4 A = concatenate(src, sig, x);
          for (int i = 0; i < 4; ++i) row.push_back(num(A(i)));
          row.push_back(str("ok"));
          if (cfg.oracle) {
            const Vec4 N = concatenate_numeric(src, sig, x, cfg.tail_T * std::max(1.0, x.norm()));
            for (int i = 0; i < 4; ++i) row.push_back(num(N(i)));
            const double ref = A.norm();
            row.push_back(num(ref > 0 ? (N - A).norm() / ref : N.norm()));
          }
        } catch (const Error& err) {
          if (err.code() != Errc::OnCone) throw;
          for (int i = 0; i < 4; ++i) row.push_back(kEmpty);
          row.push_back(str("cone"));
          if (cfg.oracle) {
            for (int i = 0; i < 5; ++i) row.push_back(kEmpty);
          }
        }
        row.push_back(integer(s5));
        row.push_back(integer(static_cast<long long>(si)));
        r.table.rows.push_back(std::move(row));
      }
    }
  }
  return r;
}

CommandResult cmd_gf(const RunConfig& in) {
  const RunConfig cfg = with_default_grid(in);
  CommandResult r;
  r.table.columns = point_columns();
  for (const char* c : {"smooth", "boundary_argument", "boundary_coefficient", "atom_weight", "flag", "sigma5"}) {
    r.table.columns.emplace_back(c);
  }
  KernelSpec spec;
  spec.family = parse_kernel(cfg.kernel);
  spec.epsilon = cfg.epsilon;
  spec.rho = cfg.rho;
  spec.width = cfg.width;
  for (int s5 : effective_sigma5s(cfg)) {
    spec.sig = Signature::from_sigma5(s5);
    for (const Vec5& p : grid_points(cfg)) {
      Row row;
      append_point(row, p);
      try {
        const KernelValue<double> k = evaluate<double>(spec, p);
        row.push_back(num(k.smooth));
        row.push_back(k.boundary_delta ? num(k.boundary_delta->argument) : kEmpty);
        row.push_back(k.boundary_delta ? num(k.boundary_delta->coefficient) : kEmpty);
        row.push_back(k.atom ? num(k.atom->weight) : kEmpty);
        row.push_back(str("ok"));
      } catch (const Error& err) {
        if (err.code() != Errc::OnCone && err.code() != Errc::BranchSingularity &&
            err.code() != Errc::InvalidArgument) {
          throw;
        }
        for (int i = 0; i < 4; ++i) row.push_back(kEmpty);
        row.push_back(str(err.code() == Errc::InvalidArgument ? "undefined" : "cone"));
      }
      row.push_back(integer(s5));
      r.table.rows.push_back(std::move(row));
    }
  }
  return r;
}

namespace {

CommandResult convolve_pairing(const RunConfig& cfg, const std::vector<Vec5>& sources) {
  CommandResult r;
  r.table.columns = {"kind", "t", "x", "y", "z", "tau", "closed_pairing", "oracle_pairing", "rel_error",
                     "sigma5", "source"};
  double worst = 0.0;
  for (int s5 : effective_sigma5s(cfg)) {
    const Signature sig = Signature::from_sigma5(s5);
    for (std::size_t si = 0; si < sources.size(); ++si) {
      const Source src = make_source(cfg, sources[si]);
      if (classify(src, sig).zeta != 1) continue;
      for (const Vec5& p : grid_points(cfg)) {
        const Vec4 x = head4(p);
        const double centre = p(kFifth);
        const double sw = cfg.phi_width;
        const auto phi = [centre, sw](double t) { return std::exp(-0.5 * (t - centre) * (t - centre) / (sw * sw)); };
        Row row{str("point")};
        append_point(row, p);
        double closed = 0.0;
        try {
          closed = delta_decomposition(src, sig, x).pair(phi);
        } catch (const Error& err) {
          if (err.code() != Errc::ComplexRoots) throw;
        }
        const double scale = std::max(1.0, (x - src.offset.head<4>()).norm());
        const double rho = cfg.rho > 0 ? cfg.rho : 1e-2 * scale;
        const double eps = cfg.epsilon > 0 ? cfg.epsilon : 1e-12 * scale * scale;
        const PairingResult oracle =
            pair_ums_extrapolated(src, sig, x, phi, centre - 10.0 * sw, centre + 10.0 * sw, eps, rho);
        const double err = std::abs(oracle.value - closed) / std::max(std::abs(closed), 1e-300);
        worst = std::max(worst, closed == 0.0 ? std::abs(oracle.value) : err);
        row.push_back(num(closed));
        row.push_back(num(oracle.value));
        row.push_back(num(err));
        row.push_back(integer(s5));
        row.push_back(integer(static_cast<long long>(si)));
        r.table.rows.push_back(std::move(row));
      }
    }
  }
  Row summary{str("summary")};
  for (int i = 0; i < 7; ++i) summary.push_back(kEmpty);
  summary.push_back(num(worst));
  summary.push_back(kEmpty);
  summary.push_back(kEmpty);
  r.table.rows.push_back(std::move(summary));
  return r;
}

CommandResult convolve_sweep(const RunConfig& cfg, const std::vector<Vec5>& sources) {
  CommandResult r;
  r.table.columns = point_columns();
  for (const char* c : {"rho", "kernel_sum", "c0", "c1", "sigma5", "source"}) r.table.columns.emplace_back(c);
  for (int s5 : effective_sigma5s(cfg)) {
    const Signature sig = Signature::from_sigma5(s5);
    for (std::size_t si = 0; si < sources.size(); ++si) {
      const Source src = make_source(cfg, sources[si]);
      for (const Vec5& p : grid_points(cfg)) {
        try {
          const ExtrapolatedConvolution ex = extrapolate_ums(src, sig, head4(p), p(kFifth));
          for (std::size_t k = 0; k < ex.rhos.size(); ++k) {
            Row row;
            append_point(row, p);
            row.push_back(num(ex.rhos[k]));
            row.push_back(num(ex.samples[k]));
            row.push_back(num(ex.regular_coefficient));
            row.push_back(num(ex.divergent_coefficient));
            row.push_back(integer(s5));
            row.push_back(integer(static_cast<long long>(si)));
            r.table.rows.push_back(std::move(row));
          }
        } catch (const Error& err) {
          if (err.code() != Errc::OnSingularSupport) throw;
        }
      }
    }
  }
  return r;
}

}  // namespace

CommandResult cmd_convolve(const RunConfig& in) {
  const RunConfig cfg = with_default_grid(in);
  const auto sources = effective_sources(cfg);
  bool any_delta = false;
  for (int s5 : effective_sigma5s(cfg)) {
    for (const Vec5& b : sources) {
      const Regime<double> reg = classify(b, Signature::from_sigma5(s5));
      if (reg.label == RegimeLabel::LightlikeBoundary) {
        throw Error(Errc::ConfigError, "source b=" + join(b) + " is lightlike; no field to convolve");
      }
      any_delta = any_delta || reg.zeta == 1;
    }
  }
  if (any_delta) {
    if (!cfg.pairing) {
      throw Error(Errc::ConfigError,
                  "a zeta = +1 source produces a delta-surface field with no pointwise limit; "
                  "rerun with --pairing to compare tau-pairings against a Gaussian test function");
    }
    return convolve_pairing(cfg, sources);
  }
  if (cfg.rho_sweep) return convolve_sweep(cfg, sources);

  CommandResult r;
  r.table.columns = {"kind", "t", "x", "y", "z", "tau"};
  for (const char* c : {"closed_a0", "closed_a1", "closed_a2", "closed_a3", "closed_a5", "oracle_a0", "oracle_a1",
                        "oracle_a2", "oracle_a3", "oracle_a5", "rel_error", "divergent_ratio", "sigma5", "source"}) {
    r.table.columns.emplace_back(c);
  }
  const bool fixed = cfg.epsilon > 0 && cfg.rho > 0;
  double worst = 0.0;
  double worst_div = 0.0;
  for (int s5 : effective_sigma5s(cfg)) {
    const Signature sig = Signature::from_sigma5(s5);
    for (std::size_t si = 0; si < sources.size(); ++si) {
      const Source src = make_source(cfg, sources[si]);
      for (const Vec5& p : grid_points(cfg)) {
        const Vec4 x = head4(p);
        Vec5 closed;
        try {
          closed = smooth_potential(src, sig, x, p(kFifth));
        } catch (const Error& err) {
          if (err.code() != Errc::OnSingularSupport) throw;
          continue;
        }
        Vec5 oracle;
        double div_ratio = 0.0;
        if (fixed) {
          const QuadratureResult q = convolve_ums(src, sig, x, p(kFifth), cfg.epsilon, cfg.rho);
          oracle = q.value;
          const double c0 = q.value.norm() / std::max(src.b.norm(), 1e-300);
          div_ratio = c0 > 0 ? std::abs(q.divergent_coefficient) / c0 : 0.0;
        } else {
          const ExtrapolatedConvolution ex = extrapolate_ums(src, sig, x, p(kFifth));
          oracle = ex.value;
          div_ratio = std::abs(ex.divergent_coefficient) / std::abs(ex.regular_coefficient);
        }
        const double err = (oracle - closed).norm() / closed.norm();
        worst = std::max(worst, err);
        worst_div = std::max(worst_div, div_ratio);
        Row row{str("point")};
        append_point(row, p);
        for (int i = 0; i < 5; ++i) row.push_back(num(closed(i)));
        for (int i = 0; i < 5; ++i) row.push_back(num(oracle(i)));
        row.push_back(num(err));
        row.push_back(num(div_ratio));
        row.push_back(integer(s5));
        row.push_back(integer(static_cast<long long>(si)));
        r.table.rows.push_back(std::move(row));
      }
    }
  }
  Row summary{str("summary")};
  for (int i = 0; i < 15; ++i) summary.push_back(kEmpty);
  summary.push_back(num(worst));
  summary.push_back(num(worst_div));
  summary.push_back(kEmpty);
  summary.push_back(kEmpty);
  r.table.rows.push_back(std::move(summary));
  if (worst > cfg.tolerance) {
    r.message = "warning: max relative error " + format_double(worst) + " exceeds tolerance " +
                format_double(cfg.tolerance);
  }
  return r;
}

CommandResult cmd_trajectory(const RunConfig& cfg) {
  CommandResult r;
  const auto sources = effective_sources(cfg);
  EventState init;
  init.x = cfg.x0;
  init.u = cfg.u0;
  if (cfg.h_sweep) {
    r.table.columns = {"h", "steps", "error", "ratio", "order", "sigma5", "source"};
  } else {
    r.table.columns = {"tau", "t", "x", "y", "z", "ut", "ux", "uy", "uz", "msq_ratio", "sigma5", "source"};
  }
  for (int s5 : effective_sigma5s(cfg)) {
    const Signature sig = Signature::from_sigma5(s5);
    for (std::size_t si = 0; si < sources.size(); ++si) {
      const Source src = make_source(cfg, sources[si]);
      const auto steps = static_cast<std::size_t>(cfg.steps);
      if (cfg.h_sweep) {
        const EventState ref = integrate(src, sig, init, cfg.e0, cfg.mass, cfg.h / 8.0, 8 * steps).back();
        const auto error_at = [&](double h, std::size_t n) {
          const EventState end = integrate(src, sig, init, cfg.e0, cfg.mass, h, n).back();
          return (end.x - ref.x).norm() + (end.u - ref.u).norm();
        };
        const double coarse = error_at(cfg.h, steps);
        const double fine = error_at(cfg.h / 2.0, 2 * steps);
        r.table.rows.push_back({num(cfg.h), integer(static_cast<long long>(steps)), num(coarse), kEmpty, kEmpty,
                                integer(s5), integer(static_cast<long long>(si))});
        const double ratio = coarse / fine;
        r.table.rows.push_back({num(cfg.h / 2.0), integer(static_cast<long long>(2 * steps)), num(fine),
                                num(ratio), num(std::log2(ratio)), integer(s5),
                                integer(static_cast<long long>(si))});
        continue;
      }
      for (const EventState& s : integrate(src, sig, init, cfg.e0, cfg.mass, cfg.h, steps)) {
        Row row{num(s.tau)};
        for (int i = 0; i < 4; ++i) row.push_back(num(s.x(i)));
        for (int i = 0; i < 4; ++i) row.push_back(num(s.u(i)));
        row.push_back(num(msq_ratio(s)));
        row.push_back(integer(s5));
        row.push_back(integer(static_cast<long long>(si)));
        r.table.rows.push_back(std::move(row));
      }
    }
  }
  return r;
}

CommandResult cmd_residual(const RunConfig& in) {
  const RunConfig cfg = with_default_grid(in);
  CommandResult r;
  r.table.columns = point_columns();
  for (const char* c : {"residual", "normalized_residual", "order_estimate", "flag", "sigma5", "source"}) {
    r.table.columns.emplace_back(c);
  }
  const auto sources = effective_sources(cfg);
  const bool per_source = cfg.target != "kernel";
  KernelSpec spec;
  spec.family = parse_kernel(cfg.kernel);
  spec.epsilon = cfg.epsilon;
  spec.width = cfg.width;
  for (int s5 : effective_sigma5s(cfg)) {
    const Signature sig = Signature::from_sigma5(s5);
    spec.sig = sig;
    const std::size_t nsrc = per_source ? sources.size() : 1;
    for (std::size_t si = 0; si < nsrc; ++si) {
      const Source src = make_source(cfg, sources[si]);
      const FieldSampler potential = [&src, sig](const Vec4& x, double tau) -> Eigen::VectorXd {
        return smooth_potential(src, sig, x, tau);
      };
      const FieldSampler kernel = [&spec](const Vec4& x, double tau) -> Eigen::VectorXd {
        Eigen::VectorXd v(1);
        v(0) = evaluate<double>(spec, make_five<double>(x, tau)).smooth;
        return v;
      };
      for (const Vec5& p : grid_points(cfg)) {
        Row row;
        append_point(row, p);
        const Vec4 x = head4(p);
        const double tau = p(kFifth);
        try {
          ResidualReport rep;
          if (cfg.target == "field") {
            rep = dalembert_residual(potential, sig, x, tau, default_stencil_spacing(x, tau));
          } else if (cfg.target == "kernel") {
            rep = dalembert_residual(kernel, sig, x, tau, default_stencil_spacing(x, tau));
          } else if (cfg.target == "current") {
            const double w = cfg.width > 0 ? cfg.width : 1e-2;
            rep = continuity_residual(src, x, tau, 1e-3 * w, w);
          } else {
            const double h = 1e-4 * std::max({x.norm(), std::abs(tau), 1.0});
            const double dev = gradient_check(field_tensor(src, sig, x, tau), potential, sig, x, tau, h);
            const double dev2 = gradient_check(field_tensor(src, sig, x, tau), potential, sig, x, tau, 0.5 * h);
            rep.residual = dev;
            rep.normalized_residual = dev;
            rep.order_estimate = std::log2(dev / dev2);
          }
          row.push_back(num(rep.residual));
          row.push_back(num(rep.normalized_residual));
          row.push_back(std::isfinite(rep.order_estimate) ? num(rep.order_estimate) : kEmpty);
          row.push_back(str("ok"));
        } catch (const Error& err) {
          if (err.code() != Errc::StencilOnSupport && err.code() != Errc::OnSingularSupport &&
              err.code() != Errc::SingularRegimeUnsupported) {
            throw;
          }
          for (int i = 0; i < 3; ++i) row.push_back(kEmpty);
          row.push_back(str(err.code() == Errc::SingularRegimeUnsupported ? "delta-surface" : "support"));
        }
        row.push_back(integer(s5));
        row.push_back(per_source ? integer(static_cast<long long>(si)) : kEmpty);
        r.table.rows.push_back(std::move(row));
      }
    }
  }
  return r;
}

std::string render(const Table& table, const RunConfig& cfg) {
  std::vector<int> sigmas = effective_sigma5s(cfg);
  std::vector<Vec5> sources = effective_sources(cfg);
  if (cfg.format == "json") {
    nlohmann::ordered_json meta;
    meta["tool"] = "offshell";
    meta["version"] = version();
    meta["command"] = cfg.command;
    meta["sigma5"] = sigmas;
    nlohmann::ordered_json bs = nlohmann::ordered_json::array();
    for (const Vec5& b : sources) bs.push_back(std::vector<double>(b.data(), b.data() + 5));
    meta["b"] = bs;
    meta["charge"] = cfg.charge;
    meta["regulators"] = {{"epsilon", cfg.epsilon}, {"rho", cfg.rho}, {"width", cfg.width}};
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < table.columns.size(); ++i) {
        const Cell& c = i < row.size() ? row[i] : kEmpty;
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, std::monostate>) {
                obj[table.columns[i]] = nullptr;
              } else {
                obj[table.columns[i]] = v;
              }
            },
            c);
      }
      rows.push_back(std::move(obj));
    }
    nlohmann::ordered_json doc;
    doc["meta"] = meta;
    doc["columns"] = table.columns;
    doc["rows"] = rows;
    return doc.dump(2) + "\n";
  }

  std::ostringstream out;
  out << "# offshell " << version() << " command=" << cfg.command << " sigma5=";
  for (std::size_t i = 0; i < sigmas.size(); ++i) out << (i ? "," : "") << sigmas[i];
  out << " b=";
  for (std::size_t i = 0; i < sources.size(); ++i) out << (i ? ";" : "") << join(sources[i]);
  out << " charge=" << format_double(cfg.charge) << " epsilon=" << format_double(cfg.epsilon)
      << " rho=" << format_double(cfg.rho) << " width=" << format_double(cfg.width) << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i) out << ",";
      if (i >= row.size()) continue;
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              out << format_double(v);
            } else if constexpr (std::is_same_v<T, long long>) {
              out << v;
            } else if constexpr (std::is_same_v<T, std::string>) {
              out << escape_csv(v);
            }
          },
          row[i]);
    }
    out << "\n";
  }
  return out.str();
}

CommandResult dispatch(const RunConfig& cfg) {
  try {
    validate(cfg);
    if (cfg.command == "regime") return cmd_regime(cfg);
    if (cfg.command == "field") return cmd_field(cfg);
    if (cfg.command == "concat") return cmd_concat(cfg);
    if (cfg.command == "gf") return cmd_gf(cfg);
    if (cfg.command == "convolve") return cmd_convolve(cfg);
    if (cfg.command == "trajectory") return cmd_trajectory(cfg);
    if (cfg.command == "residual") return cmd_residual(cfg);
    throw Error(Errc::ConfigError, "unknown command '" + cfg.command + "'");
  } catch (const Error& err) {
    CommandResult r;
    r.message = err.what();
    switch (err.code()) {
      case Errc::QuadratureFailure:
      case Errc::RegulatorTooSmall:
      case Errc::TailEstimateUnreliable:
        r.exit_code = kExitQuadrature;
        break;
      case Errc::SingularSupportCrossed:
      case Errc::StepRejected:
        r.exit_code = kExitTrajectory;
        break;
      default:
        r.exit_code = kExitConfig;
        break;
    }
    return r;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Classical off-shell electrodynamics: fields, Green kernels, oracle checks, trajectories",
               "offshell"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string sigma5;
  std::vector<std::string> bs;
  std::string offset;
  double charge = 0.0;
  std::vector<std::string> grid;
  double epsilon = 0.0;
  double rho = 0.0;
  double width = 0.0;
  double tolerance = 0.0;
  double tail_T = 0.0;
  std::string format;
  std::string out_path;
  std::string kernel;
  std::string target;
  std::string x0;
  std::string u0;
  double h = 0.0;
  int steps = 0;
  double e0 = 0.0;
  double mass = 0.0;
  double phi_width = 0.0;

  auto* o_config = app.add_option("--config", config_path, "INI file ([section] key = value); flags override it");
  auto* o_sigma5 = app.add_option("--sigma5", sigma5, "1, -1 or both");
  auto* o_b = app.add_option("--b", bs, "source velocity b0,b1,b2,b3,b5 (repeatable)");
  auto* o_offset = app.add_option("--offset", offset, "worldline origin o0,o1,o2,o3,o5");
  auto* o_charge = app.add_option("--charge", charge, "source charge e");
  app.add_option("--grid", grid, "axis=min:max:count, axis in t,x,y,z,tau (repeatable)");
  auto* o_eps = app.add_option("--epsilon", epsilon, "support regulator");
  auto* o_rho = app.add_option("--rho", rho, "integrability regulator");
  auto* o_width = app.add_option("--width", width, "mollifier / nascent-delta width");
  auto* o_tol = app.add_option("--tolerance", tolerance, "relative tolerance for oracle comparisons");
  auto* o_tail = app.add_option("--tail-T", tail_T, "concatenation truncation, in units of max(|x|, 1)");
  auto* o_format = app.add_option("--format", format, "csv or json");
  auto* o_out = app.add_option("--out", out_path, "output file (default stdout)");
  auto* o_rho_sweep = app.add_flag("--rho-sweep", "convolve: emit the rho-sequence diagnostics");
  auto* o_h_sweep = app.add_flag("--h-sweep", "trajectory: step-halving convergence report");
  auto* o_pairing = app.add_flag("--pairing", "convolve: pair delta-surface fields with a Gaussian in tau");
  auto* o_oracle = app.add_flag("--oracle", "concat: add the numerical tau-integral columns");
  auto* o_phi = app.add_option("--phi-width", phi_width, "convolve --pairing: test-function width");
  auto* o_kernel = app.add_option("--kernel", kernel,
                                  "unified, principal-part, tau-retarded, maxwell-pp, classic-g, classic-h, laplace4");
  auto* o_target = app.add_option("--target", target, "residual: field, kernel, current or gradient");
  auto* o_x0 = app.add_option("--x0", x0, "trajectory: initial event t,x,y,z");
  auto* o_u0 = app.add_option("--u0", u0, "trajectory: initial velocity dx/dtau");
  auto* o_h = app.add_option("--step", h, "trajectory: tau step (negative runs backwards)");
  auto* o_steps = app.add_option("--steps", steps, "trajectory: number of steps");
  auto* o_e0 = app.add_option("--e0", e0, "trajectory: test-event charge");
  auto* o_mass = app.add_option("--mass", mass, "trajectory: M");

  for (const char* name : {"regime", "field", "concat", "gf", "convolve", "trajectory", "residual"}) {
    app.add_subcommand(name, std::string("run the ") + name + " command");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  RunConfig cfg;
  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (*o_config) apply_ini(read_ini_file(config_path), cfg);
    if (*o_sigma5) cfg.sigma5s = parse_sigma5(sigma5);
    if (*o_b) {
      cfg.bs.clear();
      for (const auto& s : bs) {
        const auto v = parse_list(s, 5);
        cfg.bs.push_back(make_five<double>(v[0], v[1], v[2], v[3], v[4]));
      }
    }
    if (*o_offset) {
      const auto v = parse_list(offset, 5);
      cfg.offset = make_five<double>(v[0], v[1], v[2], v[3], v[4]);
    }
    if (*o_charge) cfg.charge = charge;
    for (const auto& g : grid) {
      std::string name;
      const GridAxis axis = parse_axis(g, &name);
      const auto it = std::find_if(kAxisNames.begin(), kAxisNames.end(), [&](const char* n) { return name == n; });
      if (it == kAxisNames.end()) throw Error(Errc::ConfigError, "unknown grid axis '" + name + "'");
      if (!cfg.grid_set) cfg.grid = {};
      cfg.grid[it - kAxisNames.begin()] = axis;
      cfg.grid_set = true;
    }
    if (*o_eps) cfg.epsilon = epsilon;
    if (*o_rho) cfg.rho = rho;
    if (*o_width) cfg.width = width;
    if (*o_tol) cfg.tolerance = tolerance;
    if (*o_tail) cfg.tail_T = tail_T;
    if (*o_format) cfg.format = format;
    if (*o_out) cfg.out = out_path;
    if (*o_rho_sweep) cfg.rho_sweep = true;
    if (*o_h_sweep) cfg.h_sweep = true;
    if (*o_pairing) cfg.pairing = true;
    if (*o_oracle) cfg.oracle = true;
    if (*o_phi) cfg.phi_width = phi_width;
    if (*o_kernel) cfg.kernel = kernel;
    if (*o_target) cfg.target = target;
    if (*o_x0) {
      const auto v = parse_list(x0, 4);
      cfg.x0 = make_four<double>(v[0], v[1], v[2], v[3]);
    }
    if (*o_u0) {
      const auto v = parse_list(u0, 4);
      cfg.u0 = make_four<double>(v[0], v[1], v[2], v[3]);
    }
    if (*o_h) cfg.h = h;
    if (*o_steps) cfg.steps = steps;
    if (*o_e0) cfg.e0 = e0;
    if (*o_mass) cfg.mass = mass;
  } catch (const Error& e) {
    err << "offshell: " << e.what() << "\n";
    return kExitConfig;
  }

  const CommandResult result = dispatch(cfg);
  if (!result.message.empty()) err << "offshell: " << result.message << "\n";
  if (result.exit_code != kExitOk && result.exit_code != kExitAllSingular) return result.exit_code;

  const std::string text = render(result.table, cfg);
  if (cfg.out.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.out);
    if (!f) {
      err << "offshell: cannot write '" << cfg.out << "'\n";
      return kExitConfig;
    }
    f << text;
  }
  return result.exit_code;
}

}  // namespace offshell::cli
