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

// Scenario orchestration and serialized outputs.
//
// Trace files: one CSV per trace, two header lines
//   # sqzsim trace schema_version=1
//   frequency_hz,power_rel_shot_db,statistical_sigma_db
// Summary: <prefix>_summary.txt, "key = value" lines.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "sqz/config.hpp"
#include "sqz/detection.hpp"
#include "sqz/lock_chain.hpp"
#include "sqz/michelson.hpp"
#include "sqz/opo.hpp"
#include "sqz/quadrature.hpp"
#include "sqz/rng.hpp"
#include "sqz/spectra.hpp"

namespace sqz {

inline constexpr int kOutputSchemaVersion = 1;

struct Trace {
  std::string name;
  std::vector<double> freq;
  std::vector<double> db;
  std::vector<double> sigma_db;
};

struct ScenarioOutput {
  std::string scenario;
  std::vector<Trace> traces;
  std::vector<std::pair<std::string, std::string>> summary;
  std::vector<std::pair<std::string, bool>> checks;
  AcquisitionResult lock;  ///< lock-demo only

  bool passed() const {
    for (const auto& c : checks)
      if (!c.second) return false;
    return true;
  }
  void put(const std::string& key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    summary.emplace_back(key, buf);
  }
  void put(const std::string& key, const std::string& v) { summary.emplace_back(key, v); }
};

inline std::string format_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// ---- fig3 -----------------------------------------------------------------

struct SqueezingTrace {
  Trace trace;
  std::vector<double> window_mean_db;
};

/// Squeezed noise divided by a separately measured shot-noise trace, pieced
/// together from the window plan.
inline SqueezingTrace squeezing_trace(const OpoParams& opo, const HomodyneConfig& hd, const WindowPlan& plan,
                                      std::uint64_t seed) {
  SqueezingTrace out;
  out.trace.name = "fig3_squeezing_rel_shot";
  const StateSpectrum vac = [](double f) { return vacuum_state(f); };
  const StateSpectrum sq = [&opo](double f) { return squeezing_spectrum(opo, f); };
  for (std::size_t i = 0; i < plan.windows.size(); ++i) {
    const SpectrumWindow& w = plan.windows[i];
    const MeasuredSpectrum shot = measure_spectrum(vac, kSqueezedQuadrature, hd, w, derive_seed(seed, {3, i, 0}));
    const MeasuredSpectrum sqz = measure_spectrum(sq, kSqueezedQuadrature, hd, w, derive_seed(seed, {3, i, 1}));
    const std::vector<double> db = to_db_rel(sqz.corrected, shot.corrected);
    const double s1 = averaged_bin_sigma_db(w.averages);
    double lin = 0.0;
    for (std::size_t k = 0; k < db.size(); ++k) {
      out.trace.freq.push_back(shot.freq[k]);
      out.trace.db.push_back(db[k]);
      const double a = sqz.raw[k] / sqz.corrected[k];
      const double b = shot.raw[k] / shot.corrected[k];
      out.trace.sigma_db.push_back(s1 * std::sqrt(a * a + b * b));
      lin += db_to_ratio(db[k]);
    }
    out.window_mean_db.push_back(ratio_to_db(lin / static_cast<double>(db.size())));
  }
  return out;
}

/// Largest |trace - target| over all points.
inline double max_deviation_db(const Trace& t, double target) {
  double m = 0.0;
  for (double v : t.db) m = std::max(m, std::abs(v - target));
  return m;
}

inline constexpr double kFig3ToleranceDb = 0.5;

inline ScenarioOutput run_fig3(const ExperimentConfig& c) {
  ScenarioOutput out;
  out.scenario = "fig3";
  const OpoParams opo = resolve_opo(c);
  const SqueezingTrace st = squeezing_trace(opo, c.homodyne, resolve_plan(c), c.seed);
  out.traces.push_back(st.trace);

  double lin = 0.0;
  std::size_t within = 0;
  for (double v : st.trace.db) {
    lin += db_to_ratio(v);
    if (std::abs(v - c.target_squeezing_db) <= kFig3ToleranceDb) ++within;
  }
  const double n = static_cast<double>(st.trace.db.size());
  const double max_dev = max_deviation_db(st.trace, c.target_squeezing_db);
  out.put("opo_x", opo.x);
  out.put("opo_gamma_hz", opo.gamma);
  out.put("parametric_gain", parametric_gain(opo));
  out.put("expected_db", ratio_to_db(detected_variance(squeezing_spectrum(opo, 1e3), kSqueezedQuadrature,
                                                       effective_efficiency(c.homodyne), c.homodyne.angle_jitter_rms)));
  out.put("points", n);
  out.put("mean_db", ratio_to_db(lin / n));
  out.put("max_abs_deviation_db", max_dev);
  out.put("fraction_within_tolerance", static_cast<double>(within) / n);
  for (std::size_t i = 0; i < st.window_mean_db.size(); ++i) out.put("window" + std::to_string(i + 1) + "_mean_db", st.window_mean_db[i]);
  out.checks.emplace_back("every point within 0.5 dB of the target", max_dev <= kFig3ToleranceDb);
  return out;
}

// ---- fig2 -----------------------------------------------------------------

struct BandPower {
  Trace trace;
  double power = 0.0;  ///< integrated dark-corrected power over the plan
};

/// Absolute noise of one LO power over the plan, relative to the shot level
/// at the reference LO power (detector roll-off included).
inline BandPower band_power(const StateSpectrum& state, const HomodyneConfig& hd, const WindowPlan& plan,
                            std::uint64_t seed, const std::string& name) {
  BandPower bp;
  bp.trace.name = name;
  for (std::size_t i = 0; i < plan.windows.size(); ++i) {
    const SpectrumWindow& w = plan.windows[i];
    const MeasuredSpectrum m = measure_spectrum(state, kSqueezedQuadrature, hd, w, derive_seed(seed, {i}));
    const double s1 = averaged_bin_sigma_db(w.averages);
    for (std::size_t k = 0; k < m.freq.size(); ++k) {
      bp.trace.freq.push_back(m.freq[k]);
      bp.trace.db.push_back(ratio_to_db(m.corrected[k]));
      bp.trace.sigma_db.push_back(s1 * m.raw[k] / m.corrected[k]);
      bp.power += m.corrected[k] * m.rbw;
    }
  }
  return bp;
}

inline constexpr double kLinearityTolerance = 0.03;
inline constexpr double kClassicalTolerance = 0.06;

inline ScenarioOutput run_fig2(const ExperimentConfig& c) {
  ScenarioOutput out;
  out.scenario = "fig2";
  const WindowPlan plan = resolve_plan(c);
  const OpoParams opo = resolve_opo(c);
  const StateSpectrum vac = [](double f) { return vacuum_state(f); };
  const StateSpectrum sq = [&opo](double f) { return squeezing_spectrum(opo, f); };
  const double p0 = c.homodyne.lo_power;

  struct Run {
    const char* label;
    double factor;
  };
  const Run runs[] = {{"a", 1.0}, {"c", 2.0}, {"d", 0.5}};
  double base = 0.0;
  double base_classical = 0.0;
  for (std::size_t r = 0; r < 3; ++r) {
    HomodyneConfig hd = c.homodyne;
    hd.lo_power = p0 * runs[r].factor;
    hd.classical_noise = false;
    const std::string tag = std::string("fig2_shot_") + runs[r].label + "_" + format_num(hd.lo_power * 1e6) + "uW";
    BandPower bp = band_power(vac, hd, plan, derive_seed(c.seed, {2, r, 0}), tag);
    out.traces.push_back(bp.trace);

    hd.classical_noise = true;
    const BandPower with = band_power(vac, hd, plan, derive_seed(c.seed, {2, r, 1}), tag + "_classical");
    const double classical = with.power - bp.power;

    if (r == 0) {
      base = bp.power;
      base_classical = classical;
      out.put("band_power_ref", base);
      out.put("classical_power_ref", classical);
      continue;
    }
    const double ratio = bp.power / base;
    const double cratio = classical / base_classical;
    const double f = runs[r].factor;
    out.put(std::string("shot_ratio_") + runs[r].label, ratio);
    out.put(std::string("classical_ratio_") + runs[r].label, cratio);
    out.checks.emplace_back(std::string("shot noise scales linearly (") + runs[r].label + ")",
                            std::abs(ratio - f) / f <= kLinearityTolerance);
    out.checks.emplace_back(std::string("classical noise scales quadratically (") + runs[r].label + ")",
                            std::abs(cratio - f * f) / (f * f) <= kClassicalTolerance);
  }

  HomodyneConfig hd = c.homodyne;
  hd.classical_noise = false;
  out.traces.push_back(band_power(sq, hd, plan, derive_seed(c.seed, {2, 9}), "fig2_squeezed_b").trace);
  return out;
}

// ---- fig4 -----------------------------------------------------------------

inline constexpr double kFig4SeparationDb = 3.0;
inline constexpr double kFig4SeparationToleranceDb = 0.5;
inline constexpr double kFig4PeakToleranceDb = 0.2;

inline Trace to_trace(const MiSpectrum& s, const std::string& name) {
  Trace t;
  t.name = name;
  t.freq = s.freq;
  t.db = s.rel_shot_db;
  t.sigma_db.assign(s.freq.size(), averaged_bin_sigma_db(s.averages));
  return t;
}

inline ScenarioOutput run_fig4(const ExperimentConfig& c) {
  ScenarioOutput out;
  out.scenario = "fig4";
  const OpoParams opo = resolve_opo(c);
  const MiSpectrum off = run_mi_scenario(c.michelson, c.homodyne, opo, false, derive_seed(c.seed, {4}));
  const MiSpectrum on = run_mi_scenario(c.michelson, c.homodyne, opo, true, derive_seed(c.seed, {4}));
  out.traces.push_back(to_trace(off, "fig4_squeezing_off"));
  out.traces.push_back(to_trace(on, "fig4_squeezing_on"));
  const double sep = off.floor_db - on.floor_db;
  const double peak_diff = on.peak_db - off.peak_db;
  out.put("floor_off_db", off.floor_db);
  out.put("floor_on_db", on.floor_db);
  out.put("floor_separation_db", sep);
  out.put("expected_separation_db", off.expected_floor_db - on.expected_floor_db);
  out.put("peak_off_db", off.peak_db);
  out.put("peak_on_db", on.peak_db);
  out.put("peak_difference_db", peak_diff);
  out.put("dark_fringe_residual_rms_rad", on.lock.residual_rms);
  out.checks.emplace_back("floor separation 3.0 +- 0.5 dB", std::abs(sep - kFig4SeparationDb) <= kFig4SeparationToleranceDb);
  out.checks.emplace_back("signal peaks agree within 0.2 dB", std::abs(peak_diff) <= kFig4PeakToleranceDb);
  out.checks.emplace_back("dark fringe held", off.lock.within_bound && on.lock.within_bound);
  return out;
}

// ---- lock-demo --------------------------------------------------------------

inline ScenarioOutput run_lock_demo(const ExperimentConfig& c) {
  ScenarioOutput out;
  out.scenario = "lock-demo";
  const LockSystemConfig lc = resolve_lock(c);
  out.lock = acquire_locks(lc, c.seed);
  const AcquisitionResult& r = out.lock;
  out.put("acquired", r.acquired ? "true" : "false");
  out.put("held", r.held ? "true" : "false");
  out.put("acquisition_time_s", r.acquisition_time);
  for (std::size_t i = 0; i < kLoopCount; ++i) {
    out.put(std::string("lock_time_") + loop_name(i) + "_s", r.lock_time[i]);
    out.put(std::string("hold_rms_") + loop_name(i), r.hold_rms[i]);
  }
  out.put("hold_duration_s", lc.hold_duration);
  out.put("report", r.report);
  const bool ordered = respects_ordering(r.trajectory);
  out.put("ordering_respected", ordered ? "true" : "false");
  out.checks.emplace_back("all loops locked within timeout", r.acquired);
  out.checks.emplace_back("lock held with residual below threshold", r.held);
  out.checks.emplace_back("dependency ordering respected", ordered);
  return out;
}

// ---- selftest ---------------------------------------------------------------

/// Closed-form loss budget: source at the target level, then the Michelson
/// injection path (Faraday double pass and reduced homodyne visibility).
inline double loss_budget_db(const ExperimentConfig& c) {
  const double v = db_to_ratio(c.target_squeezing_db);
  const double r = c.michelson.homodyne_visibility / c.homodyne.visibility;
  const QuadratureState out = apply_loss({1.0 / v, v, 0.0, 0.0}, c.michelson.faraday_double_pass_transmission * r * r);
  return ratio_to_db(out.v22);
}

/// Fast analytic and small stochastic checks of the installed build.
inline ScenarioOutput run_selftest(const ExperimentConfig& c) {
  ScenarioOutput out;
  out.scenario = "selftest";
  const double budget = loss_budget_db(c);
  out.put("loss_budget_db", budget);
  out.checks.emplace_back("loss budget maps -4 dB to -3.3 +- 0.1 dB", std::abs(budget + 3.3) <= 0.1);

  Rng rng(derive_seed(c.seed, {0x5e1f}));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  double worst_lossless = 0.0;
  for (int i = 0; i < 2000; ++i) {
    OpoParams p{0.9 * u(rng), 13.5e6, 1.0, 3.8e9};
    const double f = 1e8 * u(rng);
    worst_lossless = std::max(worst_lossless, std::abs(uncertainty_product(squeezing_spectrum(p, f)) - 1.0));
    p.eta_esc = 0.5 + 0.5 * u(rng);
    const QuadratureState s = apply_loss(rotate(squeezing_spectrum(p, f), 2.0 * std::numbers::pi * u(rng)), u(rng));
    worst = std::min(worst, uncertainty_product(s));
  }
  out.put("min_uncertainty_product", worst);
  out.put("max_lossless_deviation", worst_lossless);
  out.checks.emplace_back("states physical", worst >= 1.0 - 1e-9);
  out.checks.emplace_back("lossless states minimum uncertainty", worst_lossless <= 1e-9);

  const OpoParams opo = resolve_opo(c);
  const double expected = ratio_to_db(detected_variance(squeezing_spectrum(opo, 1e3), kSqueezedQuadrature,
                                                        effective_efficiency(c.homodyne), 0.0));
  out.put("calibrated_x", opo.x);
  out.put("calibrated_level_db", expected);
  out.checks.emplace_back("pump calibration reaches the target", std::abs(expected - c.target_squeezing_db) < 1e-6);

  const SpectrumWindow w{800.0, 3200.0, 4.0, 400};
  HomodyneConfig hd = c.homodyne;
  const VarianceEstimate shot = measure_variance(vacuum_state(0.0), 0.0, hd, w, derive_seed(c.seed, {0x5e2f}));
  out.put("shot_variance", shot.variance);
  out.put("shot_variance_sigma", shot.sigma);
  out.checks.emplace_back("dark-corrected shot level within 4 sigma", std::abs(shot.variance - 1.0) <= 4.0 * shot.sigma);
  return out;
}

inline ScenarioOutput run_scenario(const ExperimentConfig& c) {
  if (c.scenario == "fig2") return run_fig2(c);
  if (c.scenario == "fig3") return run_fig3(c);
  if (c.scenario == "fig4") return run_fig4(c);
  if (c.scenario == "lock-demo") return run_lock_demo(c);
  if (c.scenario == "selftest") return run_selftest(c);
  throw SchemaError("scenario: unknown scenario '" + c.scenario + "'");
}

// ---- output -----------------------------------------------------------------

inline void write_trace(const Trace& t, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "# sqzsim trace schema_version=" << kOutputSchemaVersion << "\n";
  f << "frequency_hz,power_rel_shot_db,statistical_sigma_db\n";
  char buf[128];
  for (std::size_t i = 0; i < t.freq.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.6g\n", t.freq[i], t.db[i], t.sigma_db[i]);
    f << buf;
  }
}

inline void write_trajectory(const AcquisitionResult& r, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "# sqzsim lock trajectory schema_version=" << kOutputSchemaVersion << "\n";
  f << "time_s";
  for (std::size_t i = 0; i < kLoopCount; ++i) f << ',' << loop_name(i);
  for (std::size_t i = 0; i < kLoopCount; ++i) f << ',' << loop_name(i) << "_rms";
  f << '\n';
  char buf[64];
  for (const auto& st : r.trajectory) {
    std::snprintf(buf, sizeof buf, "%.6f", st.time);
    f << buf;
    for (auto s : st.status) f << ',' << to_string(s);
    for (double v : st.residual_rms) {
      std::snprintf(buf, sizeof buf, ",%.6g", v);
      f << buf;
    }
    f << '\n';
  }
}

inline void write_outputs(const ScenarioOutput& o, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& t : o.traces) write_trace(t, dir / (t.name + ".csv"));
  if (!o.lock.trajectory.empty()) write_trajectory(o.lock, dir / "lock_demo_trajectory.csv");
  std::string prefix = o.scenario;
  for (auto& ch : prefix)
    if (ch == '-') ch = '_';
  std::ofstream f(dir / (prefix + "_summary.txt"), std::ios::binary);
  if (!f) throw std::runtime_error("cannot write summary in " + dir.string());
  f << "schema_version = " << kOutputSchemaVersion << "\n";
  f << "scenario = " << o.scenario << "\n";
  for (const auto& [k, v] : o.summary) f << k << " = " << v << "\n";
  for (const auto& [name, ok] : o.checks) f << "check: " << name << " = " << (ok ? "pass" : "fail") << "\n";
}

}  // namespace sqz
