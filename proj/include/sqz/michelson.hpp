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

// Michelson interferometer on a dark fringe with squeezed vacuum injected
// into the antisymmetric port and homodyne readout of the dark port.
//
// `offset` is half the differential round-trip phase, so the dark-port
// power is P_in R [V sin^2(offset) + (1 - V)/2].

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "sqz/detection.hpp"
#include "sqz/error.hpp"
#include "sqz/opo.hpp"
#include "sqz/quadrature.hpp"
#include "sqz/rng.hpp"
#include "sqz/servo.hpp"
#include "sqz/spectra.hpp"

namespace sqz {

inline constexpr double kPlanck = 6.62607015e-34;
inline constexpr double kSpeedOfLight = 299792458.0;

struct MichelsonConfig {
  double input_power = 1.5e-6;  ///< W
  double mi_visibility = 0.999;
  double end_mirror_r = 0.9992;
  double arm_length = 0.04;     ///< m (static fringe model only)
  double wavelength = 1064e-9;  ///< m
  double dither_freq = 66e3;    ///< Hz
  double dither_depth = 0.05;   ///< rad
  double signal_freq = 3.2e3;   ///< Hz
  double signal_depth = 3e-5;   ///< differential phase amplitude, rad
  double faraday_double_pass_transmission = 0.95;
  double homodyne_visibility = 0.907;
  // dark-fringe lock
  double lock_kp = 0.5;
  double lock_ki = 500.0;
  double lock_dt = 1e-4;
  double lock_actuator_tau = 2e-4;
  double lock_noise_diffusion = 1e-3;  ///< rad/sqrt(s)
  double lock_residual_bound = 1e-3;   ///< rad rms
  SpectrumWindow window{2800.0, 3600.0, 4.0, 200};
  double floor_exclusion = 20.0;  ///< Hz either side of the signal left out of the floor
};

inline void validate(const MichelsonConfig& c) {
  for (double v : {c.mi_visibility, c.end_mirror_r, c.faraday_double_pass_transmission, c.homodyne_visibility})
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("transmissions and visibilities must lie in [0, 1]");
  if (!(c.input_power > 0.0)) throw DomainError("input power must be positive");
  validate(c.window);
  if (!(c.signal_freq > c.window.f_start && c.signal_freq < c.window.f_stop))
    throw DomainError("signal frequency must lie inside the analysis window");
}

inline double photon_flux(double power, double wavelength) { return power * wavelength / (kPlanck * kSpeedOfLight); }

/// Dark-port quantities that feed the homodyne readout.
struct DarkPortReadout {
  double carrier_leakage = 0.0;  ///< W
  /// Mean-square signal in the readout quadrature, in shot-noise PSD x Hz
  /// (i.e. the tone power of the photocurrent when shot noise is 1/Hz).
  double signal_power = 0.0;
  QuadratureState readout_state;   ///< squeezed input after the loss budget, pump frame
  double squeeze_transmission = 1.0;  ///< transmission seen by the injected state
  double signal_transmission = 1.0;   ///< power transmission seen by the signal
};

/// Static fringe model plus the injection/readout loss budget. The signal is
/// read out in the quadrature that the squeezed state is aligned to.
inline DarkPortReadout dark_port_output(const MichelsonConfig& cfg, const HomodyneConfig& hd, double offset,
                                        double depth, const QuadratureState& squeezed_input) {
  validate(cfg);
  DarkPortReadout r;
  const double p = cfg.input_power * cfg.end_mirror_r;
  const double s = std::sin(offset);
  r.carrier_leakage = p * (cfg.mi_visibility * s * s + (1.0 - cfg.mi_visibility) / 2.0);

  HomodyneConfig readout = hd;
  readout.visibility = cfg.homodyne_visibility;
  const double eta_det = effective_efficiency(readout);
  const double mi_return = cfg.end_mirror_r * (1.0 + cfg.mi_visibility) / 2.0;
  r.squeeze_transmission = cfg.faraday_double_pass_transmission * mi_return * eta_det;
  r.readout_state = apply_loss(squeezed_input, r.squeeze_transmission);

  r.signal_transmission = std::sqrt(cfg.faraday_double_pass_transmission) * eta_det;
  const double amp = std::sqrt(photon_flux(p, cfg.wavelength) * cfg.mi_visibility) * std::sin(depth) * std::cos(2.0 * offset);
  r.signal_power = r.signal_transmission * amp * amp;
  return r;
}

/// Bright-port power with the dither demodulated at the dither frequency
/// (full-amplitude convention): P_in R V J1(2 depth) sin(2 offset). Positive
/// slope at the dark fringe.
inline double dither_lock_error(const MichelsonConfig& cfg, double offset) {
  const double p = cfg.input_power * cfg.end_mirror_r;
  return p * cfg.mi_visibility * std::cyl_bessel_j(1.0, 2.0 * cfg.dither_depth) * std::sin(2.0 * offset);
}

/// Bright-port power of the static fringe model.
inline double bright_port_power(const MichelsonConfig& cfg, double offset) {
  const double p = cfg.input_power * cfg.end_mirror_r;
  const double s = std::sin(offset);
  return p - p * (cfg.mi_visibility * s * s + (1.0 - cfg.mi_visibility) / 2.0);
}

struct DitherLockResult {
  double residual_rms = 0.0;  ///< rad
  double max_abs = 0.0;       ///< rad
  bool within_bound = false;
};

/// Dark-fringe lock under a random-walk arm-length drift for `duration`
/// seconds. The dither is demodulated analytically at each loop step.
inline DitherLockResult simulate_dither_lock(const MichelsonConfig& cfg, double duration, std::uint64_t seed) {
  ServoConfig sc;
  sc.kp = cfg.lock_kp;
  sc.ki = cfg.lock_ki;
  sc.actuator_range = 2.0 * std::numbers::pi;
  const double slope = 2.0 * cfg.input_power * cfg.end_mirror_r * cfg.mi_visibility * std::cyl_bessel_j(1.0, 2.0 * cfg.dither_depth);
  Rng rng(derive_seed(seed, {0xd17e}));
  std::normal_distribution<double> normal(0.0, 1.0);
  ServoState st;
  PztActuator pzt{cfg.lock_actuator_tau, 0.0};
  double drift = 0.0;
  double sum_sq = 0.0;
  double max_abs = 0.0;
  const auto steps = static_cast<std::int64_t>(std::llround(duration / cfg.lock_dt));
  const double sdt = std::sqrt(cfg.lock_dt);
  for (std::int64_t n = 0; n < steps; ++n) {
    drift += cfg.lock_noise_diffusion * sdt * normal(rng);
    const double offset = drift + pzt.position;
    const double e = dither_lock_error(cfg, offset) / slope;
    servo_step(st, e, sc, cfg.lock_dt);
    pzt.step(-st.command, cfg.lock_dt);
    sum_sq += offset * offset;
    max_abs = std::max(max_abs, std::abs(offset));
  }
  DitherLockResult r;
  r.residual_rms = steps > 0 ? std::sqrt(sum_sq / static_cast<double>(steps)) : 0.0;
  r.max_abs = max_abs;
  r.within_bound = r.residual_rms < cfg.lock_residual_bound;
  return r;
}

struct MiSpectrum {
  std::vector<double> freq;         ///< Hz
  std::vector<double> rel_shot;     ///< PSD relative to the calibrated shot level (linear)
  std::vector<double> rel_shot_db;  ///< same, dB
  double floor_db = 0.0;            ///< mean noise floor away from the signal
  double peak_db = 0.0;             ///< signal bin
  double expected_floor_db = 0.0;   ///< analytic floor of the readout state
  DitherLockResult lock;
  int averages = 0;
  double rbw = 0.0;
};

/// Dark-port spectrum around the signal frequency with squeezed injection on
/// or off. `source` is the OPO feeding the injection path.
inline MiSpectrum run_mi_scenario(const MichelsonConfig& cfg, const HomodyneConfig& hd, const OpoParams& source,
                                  bool squeezing, std::uint64_t seed) {
  validate(cfg);
  validate(hd);
  const SpectrumWindow& w = cfg.window;
  const double fs = window_sample_rate(w);
  const double duration = required_duration(w);

  MiSpectrum out;
  out.lock = simulate_dither_lock(cfg, duration, seed);

  const double offset = out.lock.residual_rms;
  const auto readout_at = [&](double f) {
    const QuadratureState in = squeezing ? squeezing_spectrum(source, f) : vacuum_state(f);
    return dark_port_output(cfg, hd, offset, cfg.signal_depth, in);
  };
  const double shot = shot_level(hd);
  const double dark = dark_level(hd);
  const auto noise_psd = [&](double f) {
    const double h = detector_transfer(f, hd);
    if (h == 0.0) return 0.0;
    const double v = rotate(readout_at(f).readout_state, kSqueezedQuadrature).v11;
    return (shot * v + dark) * h * h;
  };
  std::vector<double> series =
      synthesize_for_window(noise_psd, w, fs, duration, derive_seed(seed, {0x5e, squeezing ? 1u : 0u}));

  const DarkPortReadout at_signal = readout_at(cfg.signal_freq);
  const double h_sig = detector_transfer(cfg.signal_freq, hd);
  const double amp = std::sqrt(2.0 * at_signal.signal_power * shot) * h_sig;
  Rng rng(derive_seed(seed, {0x7a, squeezing ? 1u : 0u}));
  const double ph = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
  for (std::size_t n = 0; n < series.size(); ++n)
    series[n] += amp * std::sin(2.0 * std::numbers::pi * cfg.signal_freq * static_cast<double>(n) / fs + ph);

  const PsdEstimate est = estimate_psd(series, fs, w);
  out.freq = est.freq;
  out.averages = est.averages;
  out.rbw = est.rbw;
  out.rel_shot.resize(est.freq.size());
  out.rel_shot_db.resize(est.freq.size());
  double floor_sum = 0.0;
  std::size_t floor_n = 0;
  std::size_t peak_k = 0;
  for (std::size_t k = 0; k < est.freq.size(); ++k) {
    const double h = detector_transfer(est.freq[k], hd);
    out.rel_shot[k] = subtract_dark_noise(est.power[k], dark * h * h) / (shot * h * h);
    out.rel_shot_db[k] = ratio_to_db(out.rel_shot[k]);
    if (std::abs(est.freq[k] - cfg.signal_freq) > cfg.floor_exclusion) {
      floor_sum += out.rel_shot[k];
      ++floor_n;
    }
    if (std::abs(est.freq[k] - cfg.signal_freq) < std::abs(est.freq[peak_k] - cfg.signal_freq)) peak_k = k;
  }
  out.floor_db = ratio_to_db(floor_sum / static_cast<double>(floor_n));
  out.peak_db = out.rel_shot_db[peak_k];
  out.expected_floor_db = ratio_to_db(rotate(at_signal.readout_state, kSqueezedQuadrature).v11);
  return out;
}

}  // namespace sqz
