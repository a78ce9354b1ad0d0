#pragma once

// Run configuration for the command-line tool. The file format is flat
// `key = value` lines with `#` comments; every key can also be given on the
// command line, which overrides the file.

#include "mirrorport/dynamics.hpp"
#include "mirrorport/protocol.hpp"

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mirrorport::app {

using Real = long double;

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  Real start = 0;
  Real stop = 2 * std::acos(Real(-1));
  std::size_t points = 2001;
};

struct McPoint {
  Real theta_t;
  Real nbar;
};

struct RunConfig {
  PhysicalParams<Real> params;
  std::vector<Real> nbars{0, 1, 10, 1000};
  GridSpec grid;
  std::size_t edge_points = 400;

  std::size_t mc_n_traj = 10000;
  std::uint64_t mc_seed = 20240611;
  Real alpha_in_re = 0.5;
  Real alpha_in_im = -0.25;
  std::vector<McPoint> mc_points;  // empty: the built-in set

  Real rel_dpower = 1e-6;
  std::optional<std::string> out_path;
  int sign_variant = 0;
  int readout_sigma = 1;
  unsigned threads = 0;  // 0: hardware concurrency

  std::complex<Real> alpha_in() const { return {alpha_in_re, alpha_in_im}; }
  SignVariant variant() const { return SignVariant::from_id(sign_variant); }
  unsigned thread_count() const { return threads ? threads : std::max(1u, std::thread::hardware_concurrency()); }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

}  // namespace detail

/// Real number; also accepts multiples of π written as `pi`, `2pi` or `0.5*pi`.
inline Real parse_real(const std::string& text, const std::string& key) {
  std::string s = detail::trim(text);
  Real factor = 1;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    factor = std::acos(Real(-1));
    s = s.substr(0, s.size() - 2);
    if (!s.empty() && s.back() == '*') s.pop_back();
    if (s.empty()) return factor;
  }
  if (s.empty()) throw ConfigError(key + ": empty value");
  errno = 0;
  char* end = nullptr;
  const Real v = std::strtold(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    throw ConfigError(key + ": not a finite number: '" + text + "'");
  return v * factor;
}

inline std::uint64_t parse_unsigned(const std::string& text, const std::string& key) {
  const std::string s = detail::trim(text);
  if (s.empty() || s.front() == '-') throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE)
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  return v;
}

inline int parse_int(const std::string& text, const std::string& key) {
  const std::string s = detail::trim(text);
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return static_cast<int>(v);
}

inline std::vector<Real> parse_real_list(const std::string& text, const std::string& key) {
  std::vector<Real> out;
  for (const auto& item : detail::split(text, ',')) out.push_back(parse_real(item, key));
  if (out.empty()) throw ConfigError(key + ": list is empty");
  return out;
}

/// START:STOP:POINTS
inline GridSpec parse_grid(const std::string& text) {
  const auto parts = detail::split(text, ':');
  if (parts.size() != 3) throw ConfigError("grid: expected START:STOP:POINTS, got '" + text + "'");
  GridSpec g{parse_real(parts[0], "grid"), parse_real(parts[1], "grid"),
             static_cast<std::size_t>(parse_unsigned(parts[2], "grid"))};
  return g;
}

/// theta_t@nbar, comma separated
inline std::vector<McPoint> parse_mc_points(const std::string& text) {
  std::vector<McPoint> out;
  for (const auto& item : detail::split(text, ',')) {
    const auto at = item.find('@');
    if (at == std::string::npos) throw ConfigError("mc_points: expected THETA_T@NBAR, got '" + item + "'");
    out.push_back({parse_real(item.substr(0, at), "mc_points"), parse_real(item.substr(at + 1), "mc_points")});
  }
  return out;
}

/// Applies one `key = value` setting.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  auto& p = c.params;
  if (key == "power_w") p.power_w = parse_real(value, key);
  else if (key == "omega0_rad_s") p.omega0_rad_s = parse_real(value, key);
  else if (key == "omega_m_rad_s") p.omega_m_rad_s = parse_real(value, key);
  else if (key == "phi0_rad") p.phi0_rad = parse_real(value, key);
  else if (key == "mass_kg") p.mass_kg = parse_real(value, key);
  else if (key == "dnu_det_rad_s") p.dnu_det_rad_s = parse_real(value, key);
  else if (key == "dnu_mode_rad_s") p.dnu_mode_rad_s = parse_real(value, key);
  else if (key == "gamma_m_hz") p.gamma_m_hz = parse_real(value, key);
  else if (key == "temperature_k") p.temperature_k = parse_real(value, key);
  else if (key == "nbar") c.nbars = parse_real_list(value, key);
  else if (key == "grid") c.grid = parse_grid(value);
  else if (key == "edge_points") c.edge_points = static_cast<std::size_t>(parse_unsigned(value, key));
  else if (key == "mc_n_traj") c.mc_n_traj = static_cast<std::size_t>(parse_unsigned(value, key));
  else if (key == "mc_seed") c.mc_seed = parse_unsigned(value, key);
  else if (key == "alpha_in_re") c.alpha_in_re = parse_real(value, key);
  else if (key == "alpha_in_im") c.alpha_in_im = parse_real(value, key);
  else if (key == "mc_points") c.mc_points = parse_mc_points(value);
  else if (key == "rel_dpower") c.rel_dpower = parse_real(value, key);
  else if (key == "out") c.out_path = detail::trim(value);
  else if (key == "sign_variant") c.sign_variant = parse_int(value, key);
  else if (key == "readout_sigma") c.readout_sigma = parse_int(value, key);
  else if (key == "threads") c.threads = static_cast<unsigned>(parse_unsigned(value, key));
  else throw ConfigError("unknown config key '" + key + "'");
}

inline void parse_config_text(RunConfig& c, const std::string& text, const std::string& origin = "config") {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    try {
      apply_setting(c, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

inline void load_config_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  parse_config_text(c, buf.str(), path);
}

/// A temperature, when given, replaces the n̄ list by its single occupation.
inline std::vector<Real> effective_nbars(const RunConfig& c) {
  if (c.params.temperature_k) return {nbar_from_temperature(*c.params.temperature_k, c.params.omega_m_rad_s)};
  return c.nbars;
}

/// Checks the invariants that do not depend on the command.
inline void validate_config(const RunConfig& c) {
  try {
    validate(c.params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.grid.points < 2) throw ConfigError("grid: at least 2 points required");
  if (!(c.grid.stop > c.grid.start)) throw ConfigError("grid: STOP must exceed START");
  if (c.grid.start < 0) throw ConfigError("grid: scaled times must be >= 0");
  if (c.nbars.empty()) throw ConfigError("nbar: list is empty");
  for (const Real n : c.nbars)
    if (n < 0) throw ConfigError("nbar: values must be >= 0");
  if (c.sign_variant < 0 || c.sign_variant > 7) throw ConfigError("sign_variant: must be in 0..7");
  if (c.readout_sigma != 1 && c.readout_sigma != -1) throw ConfigError("readout_sigma: must be +1 or -1");
  if (c.mc_n_traj < 100) throw ConfigError("mc_n_traj: at least 100 trajectories required");
  if (!(c.rel_dpower > 0) || !(c.rel_dpower < Real(0.1))) throw ConfigError("rel_dpower: must be in (0, 0.1)");
  for (const auto& m : c.mc_points)
    if (m.theta_t < 0 || m.nbar < 0) throw ConfigError("mc_points: values must be >= 0");
  if (c.out_path) {
    std::ofstream probe(*c.out_path, std::ios::app);
    if (!probe) throw ConfigError("output path '" + *c.out_path + "' is not writable");
  }
}

}  // namespace mirrorport::app
