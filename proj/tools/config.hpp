#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "offshell/offshell.hpp"

namespace offshell::cli {

struct GridAxis {
  double min = 0.0;
  double max = 0.0;
  int count = 1;
};

/// Axis order of every grid: t, x, y, z, tau.
inline constexpr std::array<const char*, 5> kAxisNames{"t", "x", "y", "z", "tau"};

struct RunConfig {
  std::string command;
  /// Empty means "use the command's default" (both metrics for regime, +1 otherwise).
  std::vector<int> sigma5s;
  /// Empty means "use the command's default source set".
  std::vector<Vec5> bs;
  Vec5 offset = Vec5::Zero();
  double charge = 1.0;
  std::array<GridAxis, 5> grid{};
  bool grid_set = false;

  double epsilon = 0.0;
  double rho = 0.0;
  double width = 1e-2;
  double tolerance = 1e-3;
  double tail_T = 1e3;

  std::string format = "csv";
  std::string out;

  bool rho_sweep = false;
  bool h_sweep = false;
  bool pairing = false;
  bool oracle = false;
  double phi_width = 1.0;

  std::string kernel = "unified";
  std::string target = "field";

  Vec4 x0 = make_four<double>(0, 1, 0, 0);
  Vec4 u0 = make_four<double>(1, 0, 0.3, 0);
  double h = 1e-2;
  int steps = 1000;
  double e0 = 1.0;
  double mass = 1.0;
};

/// Flat "key = value" file with [section] headers; '#' and ';' start comments.
/// Keys are returned as "section.key"; repeated keys accumulate.
using IniData = std::map<std::string, std::vector<std::string>>;
IniData parse_ini_text(const std::string& text);
IniData read_ini_file(const std::string& path);

std::vector<double> parse_list(const std::string& text, std::size_t expected);
GridAxis parse_axis(const std::string& text, std::string* name);
std::vector<int> parse_sigma5(const std::string& text);
KernelFamily parse_kernel(const std::string& name);

/// Applies recognised keys of an INI document onto `cfg`; throws ConfigError on unknown keys
/// or malformed values.
void apply_ini(const IniData& ini, RunConfig& cfg);

/// Validation of the assembled configuration (grid counts >= 1, regulators >= 0, ...).
void validate(const RunConfig& cfg);

/// Grid points (t, x, y, z, tau) in row-major axis order.
std::vector<Vec5> grid_points(const RunConfig& cfg);

}  // namespace offshell::cli
