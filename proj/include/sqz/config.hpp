// Copyright 2026 The sqzsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Experiment configuration: a flat key = value text file with dotted section
// names. Lines starting with '#' are comments. Unknown keys, unparsable
// values and invariant violations are all collected into one SchemaError.

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sqz/detection.hpp"
#include "sqz/error.hpp"
#include "sqz/lock_chain.hpp"
#include "sqz/michelson.hpp"
#include "sqz/opo.hpp"
#include "sqz/quadrature.hpp"
#include "sqz/spectra.hpp"

namespace sqz {

inline constexpr double kNominalRunSeconds = 1.5 * 3600.0;

struct ExperimentConfig {
  std::string scenario = "fig3";
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  double duration_scale = 0.01;  ///< fraction of the 1.5 h locked run to simulate

  CarrierConfig carrier{};
  OpoParams opo{0.0, 13.5e6, 0.95, 3.8e9};
  std::optional<double> opo_x;       ///< explicit pump parameter; calibrated when absent
  double opo_bandwidth = 27e6;       ///< quoted cavity bandwidth, Hz
  bool opo_bandwidth_is_fwhm = true;
  double target_squeezing_db = -4.0;  ///< calibration target at the nominal homodyne

  HomodyneConfig homodyne{};
  MichelsonConfig michelson{};
  LockSystemConfig lock{};
  std::optional<WindowPlan> plan;

  // frequencies of the RF chain; the error signals depend only on their ratios
  double aom_offset = 40e6;
  double pump_demod_freq = 80e6;
  double length_demod_freq = 153.8e6;
  double polarization_offset = 1.4e9;
};

/// Half-linewidth and pump parameter after applying the bandwidth convention
/// and, unless x is given, calibrating x to the target squeezing level.
inline OpoParams resolve_opo(const ExperimentConfig& c) {
  OpoParams p = c.opo;
  p.gamma = half_linewidth(c.opo_bandwidth, c.opo_bandwidth_is_fwhm);
  if (c.opo_x) {
    p.x = *c.opo_x;
  } else {
    const double eta = p.eta_esc * effective_efficiency(c.homodyne);
    p.x = calibrate_pump(eta, db_to_ratio(c.target_squeezing_db));
  }
  return p;
}

inline WindowPlan resolve_plan(const ExperimentConfig& c) { return c.plan ? *c.plan : default_window_plan(); }

inline LockSystemConfig resolve_lock(const ExperimentConfig& c) {
  LockSystemConfig l = c.lock;
  l.opo = resolve_opo(c);
  l.control.detuning = c.aom_offset;
  l.lo = c.carrier;
  l.hold_duration = kNominalRunSeconds * c.duration_scale;
  return l;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& v) {
  std::size_t pos = 0;
  const double d = std::stod(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("trailing characters");
  return d;
}

inline bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("not a boolean");
}

inline std::uint64_t parse_u64(const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) throw std::invalid_argument("not an unsigned integer");
  return std::stoull(v);
}

/// "f_start:f_stop:rbw:averages"
inline SpectrumWindow parse_window(const std::string& v) {
  std::vector<std::string> parts;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(trim(item));
  if (parts.size() != 4) throw std::invalid_argument("expected f_start:f_stop:rbw:averages");
  return {parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2]), static_cast<int>(parse_u64(parts[3]))};
}

/// Comma-separated windows.
inline WindowPlan parse_plan(const std::string& v) {
  WindowPlan p;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) p.windows.push_back(parse_window(trim(item)));
  return p;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

inline Setter dbl(double ExperimentConfig::*m) {
  return [m](ExperimentConfig& c, const std::string& v) { c.*m = parse_double(v); };
}

template <class F>
Setter num(F f) {
  return [f](ExperimentConfig& c, const std::string& v) { f(c) = parse_double(v); };
}

template <class F>
Setter flag(F f) {
  return [f](ExperimentConfig& c, const std::string& v) { f(c) = parse_bool(v); };
}

inline const std::map<std::string, Setter>& schema() {
  static const std::map<std::string, Setter> s = {
      {"scenario", [](ExperimentConfig& c, const std::string& v) { c.scenario = v; }},
      {"seed", [](ExperimentConfig& c, const std::string& v) { c.seed = parse_u64(v); }},
      {"output_dir", [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; }},
      {"duration_scale", dbl(&ExperimentConfig::duration_scale)},

      {"carrier.omega0", num([](ExperimentConfig& c) -> double& { return c.carrier.omega0; })},
      {"carrier.lo_power", [](ExperimentConfig& c, const std::string& v) {
         c.carrier.lo_power = parse_double(v);
         c.homodyne.lo_power = c.carrier.lo_power;
       }},

      {"opo.x", [](ExperimentConfig& c, const std::string& v) { c.opo_x = parse_double(v); }},
      {"opo.bandwidth", dbl(&ExperimentConfig::opo_bandwidth)},
      {"opo.bandwidth_is_fwhm", [](ExperimentConfig& c, const std::string& v) { c.opo_bandwidth_is_fwhm = parse_bool(v); }},
      {"opo.eta_esc", num([](ExperimentConfig& c) -> double& { return c.opo.eta_esc; })},
      {"opo.fsr", num([](ExperimentConfig& c) -> double& { return c.opo.fsr; })},
      {"opo.target_db", dbl(&ExperimentConfig::target_squeezing_db)},

      {"homodyne.visibility", num([](ExperimentConfig& c) -> double& { return c.homodyne.visibility; })},
      {"homodyne.qe", num([](ExperimentConfig& c) -> double& { return c.homodyne.qe; })},
      {"homodyne.dark_noise_rel_shot_db", num([](ExperimentConfig& c) -> double& { return c.homodyne.dark_noise_rel_shot_db; })},
      {"homodyne.hf_corner", num([](ExperimentConfig& c) -> double& { return c.homodyne.hf_corner; })},
      {"homodyne.reference_lo_power", num([](ExperimentConfig& c) -> double& { return c.homodyne.reference_lo_power; })},
      {"homodyne.classical_noise", flag([](ExperimentConfig& c) -> bool& { return c.homodyne.classical_noise; })},
      {"homodyne.classical_noise_rel_shot_db", num([](ExperimentConfig& c) -> double& { return c.homodyne.classical_noise_rel_shot_db; })},
      {"homodyne.mains", flag([](ExperimentConfig& c) -> bool& { return c.homodyne.mains; })},
      {"homodyne.mains_rel_shot_db", num([](ExperimentConfig& c) -> double& { return c.homodyne.mains_rel_shot_db; })},
      {"homodyne.angle_jitter_rms", num([](ExperimentConfig& c) -> double& { return c.homodyne.angle_jitter_rms; })},

      {"michelson.input_power", num([](ExperimentConfig& c) -> double& { return c.michelson.input_power; })},
      {"michelson.mi_visibility", num([](ExperimentConfig& c) -> double& { return c.michelson.mi_visibility; })},
      {"michelson.end_mirror_r", num([](ExperimentConfig& c) -> double& { return c.michelson.end_mirror_r; })},
      {"michelson.arm_length", num([](ExperimentConfig& c) -> double& { return c.michelson.arm_length; })},
      {"michelson.dither_freq", num([](ExperimentConfig& c) -> double& { return c.michelson.dither_freq; })},
      {"michelson.dither_depth", num([](ExperimentConfig& c) -> double& { return c.michelson.dither_depth; })},
      {"michelson.signal_freq", num([](ExperimentConfig& c) -> double& { return c.michelson.signal_freq; })},
      {"michelson.signal_depth", num([](ExperimentConfig& c) -> double& { return c.michelson.signal_depth; })},
      {"michelson.faraday_double_pass_transmission",
       num([](ExperimentConfig& c) -> double& { return c.michelson.faraday_double_pass_transmission; })},
      {"michelson.homodyne_visibility", num([](ExperimentConfig& c) -> double& { return c.michelson.homodyne_visibility; })},
      {"michelson.lock_noise_diffusion", num([](ExperimentConfig& c) -> double& { return c.michelson.lock_noise_diffusion; })},
      {"michelson.lock_residual_bound", num([](ExperimentConfig& c) -> double& { return c.michelson.lock_residual_bound; })},
      {"michelson.window", [](ExperimentConfig& c, const std::string& v) { c.michelson.window = parse_window(v); }},

      {"control.aom_offset", dbl(&ExperimentConfig::aom_offset)},
      {"control.pump_demod_freq", dbl(&ExperimentConfig::pump_demod_freq)},
      {"control.length_demod_freq", dbl(&ExperimentConfig::length_demod_freq)},
      {"control.polarization_offset", dbl(&ExperimentConfig::polarization_offset)},
      {"control.alpha", [](ExperimentConfig& c, const std::string& v) { c.lock.control.alpha = parse_double(v); }},
      {"control.lo_demod_phase", num([](ExperimentConfig& c) -> double& { return c.lock.lo_demod_phase; })},

      {"lock.dt", num([](ExperimentConfig& c) -> double& { return c.lock.dt; })},
      {"lock.timeout", num([](ExperimentConfig& c) -> double& { return c.lock.timeout; })},
      {"lock.sweep_rate", num([](ExperimentConfig& c) -> double& { return c.lock.sweep_rate; })},
      {"lock.initial_detuning_span", num([](ExperimentConfig& c) -> double& { return c.lock.initial_detuning_span; })},
      {"lock.squeezed_mode_noise", num([](ExperimentConfig& c) -> double& { return c.lock.squeezed_mode_noise; })},
      {"lock.noise_diffusion", [](ExperimentConfig& c, const std::string& v) {
         const double d = parse_double(v);
         for (auto& l : c.lock.loops) l.noise_diffusion = d;
       }},
      {"lock.kp", [](ExperimentConfig& c, const std::string& v) {
         const double d = parse_double(v);
         for (auto& l : c.lock.loops) l.servo.kp = d;
       }},
      {"lock.ki", [](ExperimentConfig& c, const std::string& v) {
         const double d = parse_double(v);
         for (auto& l : c.lock.loops) l.servo.ki = d;
       }},
      {"lock.rms_threshold", [](ExperimentConfig& c, const std::string& v) {
         const double d = parse_double(v);
         for (auto& l : c.lock.loops) l.rms_threshold = d;
       }},

      {"plan.windows", [](ExperimentConfig& c, const std::string& v) { c.plan = parse_plan(v); }},
  };
  return s;
}

}  // namespace detail

inline const std::vector<std::string>& known_scenarios() {
  static const std::vector<std::string> s = {"fig2", "fig3", "fig4", "lock-demo", "selftest"};
  return s;
}

/// Apply one key = value setting; returns an error message or empty.
inline std::string apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
  const auto& s = detail::schema();
  const auto it = s.find(key);
  if (it == s.end()) return key + ": unknown key";
  try {
    it->second(c, value);
  } catch (const std::exception&) {
    return key + ": invalid value '" + value + "'";
  }
  return {};
}

/// Check invariants of a fully assembled configuration.
inline std::vector<std::string> check_config(const ExperimentConfig& c) {
  std::vector<std::string> errs;
  const auto guard = [&errs](const std::string& section, const auto& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      errs.push_back(section + ": " + e.what());
    }
  };
  bool found = false;
  for (const auto& s : known_scenarios()) found = found || s == c.scenario;
  if (!found) errs.push_back("scenario: unknown scenario '" + c.scenario + "'");
  if (!(c.duration_scale > 0.0)) errs.push_back("duration_scale: must be positive");
  guard("carrier", [&] { validate(c.carrier); });
  guard("homodyne", [&] { validate(c.homodyne); });
  guard("michelson", [&] { validate(c.michelson); });
  guard("opo", [&] {
    if (!(c.opo_bandwidth > 0.0)) throw DomainError("bandwidth must be positive");
    validate(resolve_opo(c));
  });
  guard("plan", [&] { validate(resolve_plan(c)); });
  guard("lock", [&] { validate(resolve_lock(c)); });
  if (!(c.aom_offset > 0.0)) errs.push_back("control.aom_offset: must be positive");
  return errs;
}

inline std::string join_errors(const std::vector<std::string>& errs) {
  std::string msg = "invalid configuration:";
  for (const auto& e : errs) msg += "\n  " + e;
  return msg;
}

/// Parse configuration text on top of `base`.
inline ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {}) {
  std::vector<std::string> errs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      errs.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (auto e = apply_setting(base, key, value); !e.empty()) errs.push_back(e);
  }
  if (errs.empty()) errs = check_config(base);
  if (!errs.empty()) throw SchemaError(join_errors(errs));
  return base;
}

inline ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {}) {
  std::istringstream in(text);
  return parse_config(in, std::move(base));
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open configuration file '" + path + "'");
  return parse_config(in, std::move(base));
}

}  // namespace sqz
