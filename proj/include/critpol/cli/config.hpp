#pragma once

// Flat key = value config files.
//
//   # comment (also after a value)
//   experiment = spectrum
//   units = angular                      # or hertz: frequencies are multiplied by 2 pi
//   params.omega_m = 1
//   sweep.G_over_omega_m = 0:0.5:51      # start:stop:points, optional :log
//   numerics.n_max = 8
//   output.file = spectrum.csv
//   output.format = wide                 # or long
//
// Sweep axes are expanded in file order; the first axis varies slowest.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "critpol/errors.hpp"

namespace critpol::cli {

enum class Units { angular, hertz };

struct SweepAxis {
  std::string name;
  double start = 0.0;
  double stop = 0.0;
  std::size_t points = 1;
  bool log = false;

  std::vector<double> values() const {
    std::vector<double> v(points);
    for (std::size_t i = 0; i < points; ++i) {
      const double f = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
      v[i] = log ? std::exp(std::log(start) + f * (std::log(stop) - std::log(start))) : start + f * (stop - start);
    }
    if (points > 1) v.back() = stop;
    return v;
  }

  std::string describe() const;
};

struct ExperimentConfig {
  std::string experiment;
  Units units = Units::angular;
  std::map<std::string, double> params;  ///< angular units after conversion
  std::vector<SweepAxis> sweep;          ///< angular units after conversion
  std::map<std::string, double> numerics;
  std::map<std::string, std::string> output;
  std::string source;  ///< file name, for messages
};

/// Parameters whose values are angular frequencies or rates.
inline bool is_frequency_param(const std::string& name) {
  static const std::set<std::string> kFreq{
      "omega_a", "omega_m", "omega_d",    "g",           "kappa",        "gamma_m", "Omega_d",
      "Omega_NV", "omega_NV", "lambda",   "gamma_perp",  "gamma_par",    "delta_a", "G",
      "omega_minus", "lambda_plus", "lambda_plus1", "lambda_plus2", "delta", "delta1", "delta2"};
  return kFreq.count(name) > 0;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
    throw ConfigError(where + ": '" + t + "' is not a finite number");
  return v;
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string SweepAxis::describe() const {
  return detail::format_number(start) + ":" + detail::format_number(stop) + ":" + std::to_string(points) +
         (log ? ":log" : "");
}

inline SweepAxis parse_axis(const std::string& name, const std::string& spec, const std::string& where) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(detail::trim(part));
  if (parts.size() < 3 || parts.size() > 4)
    throw ConfigError(where + ": sweep spec must be start:stop:points[:log], got '" + spec + "'");
  SweepAxis ax;
  ax.name = name;
  ax.start = detail::parse_number(parts[0], where);
  ax.stop = detail::parse_number(parts[1], where);
  const double pts = detail::parse_number(parts[2], where);
  if (pts != std::floor(pts) || pts < 1.0) throw ConfigError(where + ": points must be a positive integer");
  ax.points = static_cast<std::size_t>(pts);
  if (ax.points < 2 && ax.start != ax.stop)
    throw ConfigError(where + ": a sweep needs points >= 2 (a single point requires start == stop)");
  if (parts.size() == 4) {
    if (parts[3] == "log") ax.log = true;
    else if (parts[3] != "linear" && parts[3] != "lin") throw ConfigError(where + ": unknown sweep scale '" + parts[3] + "'");
  }
  if (ax.log && !(ax.start > 0.0 && ax.stop > 0.0)) throw ConfigError(where + ": log sweep needs positive endpoints");
  return ax;
}

inline ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>") {
  ExperimentConfig cfg;
  cfg.source = source;
  std::map<std::string, std::string> raw_params, raw_sweep;
  std::vector<std::string> sweep_order;
  std::set<std::string> seen;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const std::string where = source + ":" + std::to_string(lineno);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq)), value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(where + ": empty key or value");
    if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");

    const auto dot = key.find('.');
    const std::string section = dot == std::string::npos ? key : key.substr(0, dot);
    const std::string name = dot == std::string::npos ? std::string{} : key.substr(dot + 1);
    if (dot == std::string::npos) {
      if (key == "experiment") cfg.experiment = value;
      else if (key == "units") {
        if (value == "angular") cfg.units = Units::angular;
        else if (value == "hertz") cfg.units = Units::hertz;
        else throw ConfigError(where + ": units must be 'angular' or 'hertz'");
      } else throw ConfigError(where + ": unknown key '" + key + "'");
      continue;
    }
    if (name.empty()) throw ConfigError(where + ": missing name after '" + section + ".'");
    if (section == "params") raw_params[name] = where + "\x1f" + value;
    else if (section == "sweep") {
      raw_sweep[name] = where + "\x1f" + value;
      sweep_order.push_back(name);
    } else if (section == "numerics") cfg.numerics[name] = detail::parse_number(value, where);
    else if (section == "output") cfg.output[name] = value;
    else throw ConfigError(where + ": unknown section '" + section + "'");
  }

  const double scale = cfg.units == Units::hertz ? 2.0 * std::numbers::pi : 1.0;
  auto split = [](const std::string& s) { const auto p = s.find('\x1f'); return std::pair{s.substr(0, p), s.substr(p + 1)}; };
  for (const auto& [name, packed] : raw_params) {
    const auto [where, value] = split(packed);
    cfg.params[name] = detail::parse_number(value, where) * (is_frequency_param(name) ? scale : 1.0);
  }
  for (const auto& name : sweep_order) {
    const auto [where, value] = split(raw_sweep.at(name));
    if (cfg.params.count(name)) throw ConfigError(where + ": '" + name + "' is both a fixed parameter and a sweep axis");
    SweepAxis ax = parse_axis(name, value, where);
    if (is_frequency_param(name)) {
      ax.start *= scale;
      ax.stop *= scale;
    }
    cfg.sweep.push_back(ax);
  }
  if (const auto it = cfg.output.find("format"); it != cfg.output.end() && it->second != "wide" && it->second != "long")
    throw ConfigError(source + ": output.format must be 'wide' or 'long'");
  return cfg;
}

inline ExperimentConfig parse_config_string(const std::string& text, const std::string& source = "<string>") {
  std::istringstream in(text);
  return parse_config(in, source);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

}  // namespace critpol::cli
