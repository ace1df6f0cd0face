#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace offshell::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void config_error(const std::string& msg) { throw Error(Errc::ConfigError, msg); }

double parse_double(const std::string& raw) {
  const std::string text = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    config_error("not a number: '" + raw + "'");
  }
  return v;
}

int parse_int(const std::string& raw) {
  const std::string text = trim(raw);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    config_error("not an integer: '" + raw + "'");
  }
  return v;
}

bool parse_bool(const std::string& raw) {
  std::string t = trim(raw);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  config_error("not a boolean: '" + raw + "'");
}

Vec5 to_vec5(const std::vector<double>& v) { return make_five<double>(v[0], v[1], v[2], v[3], v[4]); }
Vec4 to_vec4(const std::vector<double>& v) { return make_four<double>(v[0], v[1], v[2], v[3]); }

}  // namespace

IniData parse_ini_text(const std::string& text) {
  IniData out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') config_error("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) config_error("line " + std::to_string(lineno) + ": empty key");
    out[section.empty() ? key : section + "." + key].push_back(trim(line.substr(eq + 1)));
  }
  return out;
}

IniData read_ini_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) config_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_ini_text(ss.str());
}

std::vector<double> parse_list(const std::string& text, std::size_t expected) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  if (out.size() != expected) {
    config_error("expected " + std::to_string(expected) + " comma-separated numbers, got '" + text + "'");
  }
  return out;
}

GridAxis parse_axis(const std::string& text, std::string* name) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) config_error("grid axis must look like axis=min:max:count, got '" + text + "'");
  *name = trim(text.substr(0, eq));
  const std::string spec = text.substr(eq + 1);
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  GridAxis axis;
  if (parts.size() == 1) {
    axis.min = axis.max = parse_double(parts[0]);
    axis.count = 1;
  } else if (parts.size() == 3) {
    axis.min = parse_double(parts[0]);
    axis.max = parse_double(parts[1]);
    axis.count = parse_int(parts[2]);
  } else {
    config_error("grid axis must look like axis=min:max:count, got '" + text + "'");
  }
  return axis;
}

std::vector<int> parse_sigma5(const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "both") return {1, -1};
  if (text == "1" || text == "+1") return {1};
  if (text == "-1") return {-1};
  config_error("sigma5 must be 1, -1 or both, got '" + raw + "'");
}

KernelFamily parse_kernel(const std::string& name) {
  for (KernelFamily f : {KernelFamily::Unified5D, KernelFamily::PrincipalPart, KernelFamily::TauRetarded,
                         KernelFamily::MaxwellPP4D, KernelFamily::Classic41G, KernelFamily::Classic41H,
                         KernelFamily::Laplace4D}) {
    if (to_string(f) == name) return f;
  }
  config_error("unknown kernel '" + name + "'");
}

void apply_ini(const IniData& ini, RunConfig& cfg) {
  for (const auto& [key, values] : ini) {
    const std::string& last = values.back();
    if (key == "source.sigma5") {
      cfg.sigma5s = parse_sigma5(last);
    } else if (key == "source.b") {
      cfg.bs.clear();
      for (const auto& v : values) cfg.bs.push_back(to_vec5(parse_list(v, 5)));
    } else if (key == "source.offset") {
      cfg.offset = to_vec5(parse_list(last, 5));
    } else if (key == "source.charge") {
      cfg.charge = parse_double(last);
    } else if (key.rfind("grid.", 0) == 0) {
      const std::string axis_name = key.substr(5);
      const auto it = std::find_if(kAxisNames.begin(), kAxisNames.end(),
                                   [&](const char* n) { return axis_name == n; });
      if (it == kAxisNames.end()) config_error("unknown grid axis '" + axis_name + "'");
      std::string parsed_name;
      cfg.grid[it - kAxisNames.begin()] = parse_axis(axis_name + "=" + last, &parsed_name);
      cfg.grid_set = true;
    } else if (key == "regulators.epsilon") {
      cfg.epsilon = parse_double(last);
    } else if (key == "regulators.rho") {
      cfg.rho = parse_double(last);
    } else if (key == "regulators.width") {
      cfg.width = parse_double(last);
    } else if (key == "tolerances.relative") {
      cfg.tolerance = parse_double(last);
    } else if (key == "tolerances.tail_T") {
      cfg.tail_T = parse_double(last);
    } else if (key == "output.format") {
      cfg.format = last;
    } else if (key == "output.path") {
      cfg.out = last;
    } else if (key == "kernel.family") {
      cfg.kernel = last;
    } else if (key == "convolve.pairing") {
      cfg.pairing = parse_bool(last);
    } else if (key == "convolve.rho_sweep") {
      cfg.rho_sweep = parse_bool(last);
    } else if (key == "convolve.phi_width") {
      cfg.phi_width = parse_double(last);
    } else if (key == "concat.oracle") {
      cfg.oracle = parse_bool(last);
    } else if (key == "residual.target") {
      cfg.target = last;
    } else if (key == "trajectory.x0") {
      cfg.x0 = to_vec4(parse_list(last, 4));
    } else if (key == "trajectory.u0") {
      cfg.u0 = to_vec4(parse_list(last, 4));
    } else if (key == "trajectory.h") {
      cfg.h = parse_double(last);
    } else if (key == "trajectory.steps") {
      cfg.steps = parse_int(last);
    } else if (key == "trajectory.e0") {
      cfg.e0 = parse_double(last);
    } else if (key == "trajectory.mass") {
      cfg.mass = parse_double(last);
    } else if (key == "trajectory.h_sweep") {
      cfg.h_sweep = parse_bool(last);
    } else {
      config_error("unknown config key '" + key + "'");
    }
  }
}

void validate(const RunConfig& cfg) {
  for (int s : cfg.sigma5s) {
    if (s != 1 && s != -1) config_error("sigma5 must be +1 or -1");
  }
  for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
    const GridAxis& a = cfg.grid[i];
    if (a.count < 1) config_error(std::string("grid count must be >= 1 on axis ") + kAxisNames[i]);
    if (!std::isfinite(a.min) || !std::isfinite(a.max)) config_error("grid bounds must be finite");
  }
  if (cfg.epsilon < 0 || cfg.rho < 0 || cfg.width < 0) config_error("regulators must be >= 0");
  if (!(cfg.tolerance > 0)) config_error("tolerance must be > 0");
  if (!(cfg.tail_T > 0)) config_error("tail_T must be > 0");
  if (cfg.format != "csv" && cfg.format != "json") config_error("format must be csv or json");
  if (cfg.steps < 1) config_error("steps must be >= 1");
  if (!(cfg.mass > 0)) config_error("mass must be > 0");
  if (!(cfg.h != 0.0) || !std::isfinite(cfg.h)) config_error("h must be finite and nonzero");
  if (!(cfg.phi_width > 0)) config_error("phi width must be > 0");
  if (cfg.target != "field" && cfg.target != "kernel" && cfg.target != "current" && cfg.target != "gradient") {
    config_error("residual target must be field, kernel, current or gradient");
  }
  parse_kernel(cfg.kernel);
}

std::vector<Vec5> grid_points(const RunConfig& cfg) {
  std::vector<Vec5> out;
  std::array<int, 5> idx{};
  const auto value = [&](int axis) {
    const GridAxis& a = cfg.grid[axis];
    if (a.count == 1) return a.min;
    return a.min + (a.max - a.min) * static_cast<double>(idx[axis]) / static_cast<double>(a.count - 1);
  };
  while (true) {
    out.push_back(make_five<double>(value(0), value(1), value(2), value(3), value(4)));
    int axis = 4;
    while (axis >= 0) {
      if (++idx[axis] < cfg.grid[axis].count) break;
      idx[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  return out;
}

}  // namespace offshell::cli
