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

// Three-loop lock acquisition: OPO cavity length, then pump phase (2*Omega
// error on the back-reflected control field), then LO phase (Omega error on
// the homodyne difference current).
//
// Plant coordinates: d is the cavity detuning in half-linewidths, phi the
// control-field phase relative to the pump, theta the LO quadrature angle in
// the pump frame. The pump actuator shifts the pump phase, which moves phi
// and theta together. RF demodulation is evaluated analytically once per
// loop time step.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "sqz/error.hpp"
#include "sqz/error_signals.hpp"
#include "sqz/opo.hpp"
#include "sqz/rng.hpp"
#include "sqz/servo.hpp"

namespace sqz {

enum class LoopId : std::size_t { OpoLength = 0, PumpPhase = 1, LoPhase = 2 };
inline constexpr std::size_t kLoopCount = 3;

enum class LockStatus { Unlocked, Acquiring, Locked };

inline const char* to_string(LockStatus s) {
  switch (s) {
    case LockStatus::Unlocked: return "unlocked";
    case LockStatus::Acquiring: return "acquiring";
    case LockStatus::Locked: return "locked";
  }
  return "?";
}

inline const char* loop_name(std::size_t i) {
  static constexpr const char* names[kLoopCount] = {"opo_length", "pump_phase", "lo_phase"};
  return i < kLoopCount ? names[i] : "?";
}

struct LoopConfig {
  ServoConfig servo;
  double actuator_tau = 5e-4;     ///< s
  double noise_diffusion = 0.05;  ///< random-walk strength, units/sqrt(s)
  double lock_threshold = 0.05;   ///< |normalized error| that counts as on-lock
  double unlock_threshold = 0.5;  ///< |normalized error| that drops the lock
  double hold_time = 0.1;         ///< s on-lock before declaring locked
  double rms_threshold = 0.02;    ///< residual RMS bound while holding
};

inline std::array<LoopConfig, kLoopCount> default_loops() {
  std::array<LoopConfig, kLoopCount> loops{};
  loops[0].servo.actuator_range = 60.0;  // +-30 half-linewidths
  return loops;
}

struct LockSystemConfig {
  OpoParams opo{1.0 / 3.0, 13.5e6, 0.95, 3.8e9};
  ControlField control{};
  CarrierConfig lo{};
  std::array<LoopConfig, kLoopCount> loops = default_loops();
  double dt = 1e-4;                     ///< loop update interval, s
  double timeout = 10.0;                ///< acquisition deadline, s
  double hold_duration = 10.0;          ///< locked run after acquisition, s
  double sweep_rate = 100.0;            ///< length sweep, half-linewidths/s
  double capture_indicator = 0.5;       ///< resonance indicator that stops the sweep
  double initial_detuning_span = 20.0;  ///< initial |d| drawn up to this
  double lo_demod_phase = kLoDemodPhase;
  double squeezed_mode_noise = 0.0;     ///< extra squeeze-angle noise from the length loop, rad rms
  double record_interval = 0.01;        ///< s
  bool start_locked = false;
};

inline void validate(const LockSystemConfig& c) {
  validate(c.opo);
  validate(c.control);
  validate(c.lo);
  for (const auto& l : c.loops) validate(l.servo);
  if (!(c.dt > 0.0 && c.timeout > 0.0 && c.hold_duration >= 0.0 && c.record_interval > 0.0))
    throw DomainError("lock simulation times must be positive");
  if (std::abs(c.control.alpha) == 0.0) throw DomainError("coherent locking needs a non-zero control field");
}

struct LockChainState {
  double time = 0.0;
  std::array<LockStatus, kLoopCount> status{};
  std::array<double, kLoopCount> residual_rms{};  ///< over the last record interval
};

struct AcquisitionResult {
  bool acquired = false;
  bool held = false;
  double acquisition_time = NAN;
  std::array<double, kLoopCount> lock_time{NAN, NAN, NAN};
  std::array<double, kLoopCount> hold_rms{NAN, NAN, NAN};  ///< true residual RMS during the hold
  std::vector<LockChainState> trajectory;
  std::string report;

  bool all_within(const std::array<LoopConfig, kLoopCount>& loops) const {
    for (std::size_t i = 0; i < kLoopCount; ++i)
      if (!(hold_rms[i] < loops[i].rms_threshold)) return false;
    return true;
  }
};

/// Loop i may be acquiring or locked only while the loop upstream of it is
/// locked.
inline bool respects_ordering(const std::array<LockStatus, kLoopCount>& s) {
  for (std::size_t i = 1; i < kLoopCount; ++i)
    if (s[i] != LockStatus::Unlocked && s[i - 1] != LockStatus::Locked) return false;
  return true;
}

inline bool respects_ordering(const std::vector<LockChainState>& traj) {
  for (const auto& st : traj)
    if (!respects_ordering(st.status)) return false;
  return true;
}

namespace detail {

inline double wrap_half_period(double a, double period) { return a - period * std::round(a / period); }

class LockChainSim {
 public:
  LockChainSim(const LockSystemConfig& c, std::uint64_t seed) : cfg_(c), rng_(derive_seed(seed, {0x10c4})) {
    const double g0 = parametric_gain(c.opo);
    pump_slope_ = (g0 - 1.0 / g0) * std::norm(c.control.alpha);
    lo_slope_ = std::abs(lo_phase_error(c.control, g0, 0.0, c.lo, kSqueezedQuadrature + 1e-6, c.lo_demod_phase) -
                         lo_phase_error(c.control, g0, 0.0, c.lo, kSqueezedQuadrature - 1e-6, c.lo_demod_phase)) /
                2e-6;
    for (std::size_t i = 0; i < kLoopCount; ++i) act_[i].tau = c.loops[i].actuator_tau;
    if (c.start_locked) {
      dist_ = {0.0, 0.0, kSqueezedQuadrature};
      status_.fill(LockStatus::Locked);
    } else {
      std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
      std::uniform_real_distribution<double> ud(-c.initial_detuning_span, c.initial_detuning_span);
      dist_ = {ud(rng_), u(rng_), u(rng_)};
      status_.fill(LockStatus::Unlocked);
    }
  }

  AcquisitionResult run() {
    AcquisitionResult res;
    record(res);
    const auto steps_to = [&](double t) { return static_cast<std::int64_t>(std::llround(t / cfg_.dt)); };

    const std::int64_t timeout_steps = steps_to(cfg_.timeout);
    std::int64_t n = 0;
    for (; n < timeout_steps && !all_locked(); ++n) step(res);
    if (!all_locked()) {
      res.report = "acquisition failed at t=" + std::to_string(time_) + " s:";
      for (std::size_t i = 0; i < kLoopCount; ++i)
        res.report += std::string(" ") + loop_name(i) + "=" + to_string(status_[i]);
      record(res);
      return res;
    }
    res.acquired = true;
    res.acquisition_time = time_;
    for (std::size_t i = 0; i < kLoopCount; ++i)
      if (std::isnan(res.lock_time[i])) res.lock_time[i] = 0.0;

    std::array<double, kLoopCount> sum_sq{};
    const std::int64_t hold_steps = steps_to(cfg_.hold_duration);
    bool held = true;
    for (std::int64_t k = 0; k < hold_steps; ++k) {
      step(res);
      if (!all_locked()) held = false;
      const auto r = residuals();
      for (std::size_t i = 0; i < kLoopCount; ++i) sum_sq[i] += r[i] * r[i];
    }
    for (std::size_t i = 0; i < kLoopCount; ++i)
      res.hold_rms[i] = hold_steps > 0 ? std::sqrt(sum_sq[i] / static_cast<double>(hold_steps)) : 0.0;
    res.held = held && res.all_within(cfg_.loops);
    record(res);
    res.report = held ? "all loops locked" : "lock lost during hold";
    if (held && !res.held) res.report = "locked, residual above threshold";
    return res;
  }

 private:
  bool all_locked() const {
    for (auto s : status_)
      if (s != LockStatus::Locked) return false;
    return true;
  }

  double detuning() const { return dist_[0] + act_[0].position; }
  double phi() const { return dist_[1] + act_[1].position; }
  double theta() const { return dist_[2] + act_[2].position + act_[1].position; }

  std::array<double, kLoopCount> residuals() {
    double sq = 0.0;
    if (cfg_.squeezed_mode_noise > 0.0) sq = cfg_.squeezed_mode_noise * normal_(rng_);
    return {detuning(), wrap_half_period(phi(), std::numbers::pi),
            wrap_half_period(theta() - kSqueezedQuadrature + sq, std::numbers::pi)};
  }

  std::array<double, kLoopCount> errors() const {
    const double d = detuning();
    const double fsr_lw = cfg_.opo.fsr / cfg_.opo.gamma;
    const double x_eff = cfg_.opo.x * resonance_indicator(d);
    const double a = (1.0 + x_eff) / (1.0 - x_eff);
    const double g = a * a;
    return {opo_length_error(wrap_half_period(d, fsr_lw), fsr_lw),
            pump_phase_error(cfg_.control, g, phi()) / pump_slope_,
            lo_phase_error(cfg_.control, g, phi(), cfg_.lo, theta(), cfg_.lo_demod_phase) / lo_slope_};
  }

  void set_status(std::size_t i, LockStatus s, AcquisitionResult& res) {
    if (status_[i] == s) return;
    status_[i] = s;
    if (s == LockStatus::Locked && std::isnan(res.lock_time[i])) res.lock_time[i] = time_;
    status_changed_ = true;
  }

  void step(AcquisitionResult& res) {
    const double sdt = std::sqrt(cfg_.dt);
    for (std::size_t i = 0; i < kLoopCount; ++i) dist_[i] += cfg_.loops[i].noise_diffusion * sdt * normal_(rng_);
    time_ += cfg_.dt;

    const auto e = errors();
    for (std::size_t i = 0; i < kLoopCount; ++i) {
      const LoopConfig& lc = cfg_.loops[i];
      const bool upstream_locked = i == 0 || status_[i - 1] == LockStatus::Locked;
      if (!upstream_locked) {
        if (status_[i] != LockStatus::Unlocked) {
          servo_[i] = {};
          set_status(i, LockStatus::Unlocked, res);
        }
        act_[i].step(-servo_[i].command, cfg_.dt);
        continue;
      }
      if (status_[i] == LockStatus::Unlocked) {
        servo_[i] = {};
        good_time_[i] = 0.0;
        sweeping_ = i == 0;
        set_status(i, LockStatus::Acquiring, res);
      }

      const double half = lc.servo.actuator_range / 2.0;
      if (i == 0 && sweeping_) {
        double cmd = servo_[i].command + sweep_dir_ * cfg_.sweep_rate * cfg_.dt;
        if (std::abs(cmd) >= half) {
          cmd = std::copysign(half, cmd);
          sweep_dir_ = -sweep_dir_;
        }
        servo_[i].command = cmd;
        if (resonance_indicator(detuning()) > cfg_.capture_indicator) {
          sweeping_ = false;
          servo_[i].integral = lc.servo.ki != 0.0 ? cmd / lc.servo.ki : 0.0;
        }
      } else {
        servo_step(servo_[i], e[i], lc.servo, cfg_.dt);
      }

      if (status_[i] == LockStatus::Acquiring && !(i == 0 && sweeping_)) {
        good_time_[i] = std::abs(e[i]) < lc.lock_threshold ? good_time_[i] + cfg_.dt : 0.0;
        if (good_time_[i] >= lc.hold_time) set_status(i, LockStatus::Locked, res);
      } else if (status_[i] == LockStatus::Locked) {
        if (std::abs(e[i]) > lc.unlock_threshold || std::abs(servo_[i].command) >= half) {
          servo_[i] = {};
          set_status(i, LockStatus::Unlocked, res);
        }
      }
      act_[i].step(-servo_[i].command, cfg_.dt);
    }

    const auto r = residuals();
    for (std::size_t i = 0; i < kLoopCount; ++i) interval_sq_[i] += r[i] * r[i];
    ++interval_count_;
    if (status_changed_ || time_ - last_record_ >= cfg_.record_interval - 0.5 * cfg_.dt) record(res);
  }

  void record(AcquisitionResult& res) {
    LockChainState st;
    st.time = time_;
    st.status = status_;
    for (std::size_t i = 0; i < kLoopCount; ++i)
      st.residual_rms[i] = interval_count_ > 0 ? std::sqrt(interval_sq_[i] / static_cast<double>(interval_count_)) : 0.0;
    res.trajectory.push_back(st);
    interval_sq_.fill(0.0);
    interval_count_ = 0;
    last_record_ = time_;
    status_changed_ = false;
  }

  LockSystemConfig cfg_;
  Rng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  double pump_slope_ = 1.0;
  double lo_slope_ = 1.0;
  std::array<double, kLoopCount> dist_{};
  std::array<PztActuator, kLoopCount> act_{};
  std::array<ServoState, kLoopCount> servo_{};
  std::array<LockStatus, kLoopCount> status_{};
  std::array<double, kLoopCount> good_time_{};
  bool sweeping_ = false;
  bool status_changed_ = false;
  double sweep_dir_ = 1.0;
  double time_ = 0.0;
  double last_record_ = 0.0;
  std::array<double, kLoopCount> interval_sq_{};
  std::size_t interval_count_ = 0;
};

}  // namespace detail

/// Simulate sequential lock acquisition followed by a locked hold period.
/// Failure to acquire within the timeout is reported in the result, not
/// thrown.
inline AcquisitionResult acquire_locks(const LockSystemConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  return detail::LockChainSim(cfg, seed).run();
}

}  // namespace sqz
