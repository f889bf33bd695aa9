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

// Balanced homodyne detection at baseband.
//
// Absolute noise powers are one-sided PSDs in units of the shot-noise level
// at reference_lo_power: shot noise scales as lo_power / reference_lo_power,
// classical LO noise as its square, and electronic noise is fixed. All three
// pass through the detector's first-order high-pass transfer function.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "sqz/error.hpp"
#include "sqz/quadrature.hpp"
#include "sqz/rng.hpp"
#include "sqz/spectra.hpp"

namespace sqz {

struct HomodyneConfig {
  double lo_power = 88e-6;               ///< W
  double visibility = 0.943;             ///< fringe visibility with the signal beam
  double qe = 0.95;                      ///< photodiode quantum efficiency
  double dark_noise_rel_shot_db = -7.0;  ///< electronic noise vs shot noise at reference_lo_power
  double hf_corner = 12.0;               ///< low-frequency roll-off corner, Hz (cosmetic)
  double reference_lo_power = 88e-6;     ///< W
  bool classical_noise = false;          ///< inject classical LO amplitude noise
  double classical_noise_rel_shot_db = 10.0;  ///< its level at reference_lo_power
  bool mains = false;                    ///< add 50 Hz and 150 Hz pick-up tones
  double mains_rel_shot_db = 20.0;       ///< tone power vs shot PSD in 1 Hz
  double angle_jitter_rms = 0.0;         ///< residual quadrature-angle jitter, rad
};

inline void validate(const HomodyneConfig& c) {
  if (!(c.lo_power > 0.0 && c.reference_lo_power > 0.0)) throw DomainError("LO powers must be positive");
  if (!(c.visibility >= 0.0 && c.visibility <= 1.0)) throw DomainError("visibility must lie in [0, 1]");
  if (!(c.qe > 0.0 && c.qe <= 1.0)) throw DomainError("quantum efficiency must lie in (0, 1]");
  if (!(c.hf_corner >= 0.0)) throw DomainError("transfer corner must be non-negative");
  if (!(c.angle_jitter_rms >= 0.0)) throw DomainError("angle jitter must be non-negative");
}

/// qe * visibility^2 * extra_transmission.
inline double effective_efficiency(const HomodyneConfig& c, double extra_transmission = 1.0) {
  if (!(c.qe > 0.0 && c.qe <= 1.0)) throw DomainError("quantum efficiency must lie in (0, 1]");
  if (!(c.visibility >= 0.0 && c.visibility <= 1.0)) throw DomainError("visibility must lie in [0, 1]");
  if (!(extra_transmission >= 0.0 && extra_transmission <= 1.0)) throw DomainError("transmission must lie in [0, 1]");
  return c.qe * c.visibility * c.visibility * extra_transmission;
}

inline double subtract_dark_noise(double measured, double dark) {
  if (!(dark >= 0.0)) throw DomainError("dark-noise power must be non-negative");
  if (!(measured > dark)) throw NonPhysicalSubtraction("measured power does not exceed the dark-noise power");
  return measured - dark;
}

/// |H(f)| of the first-order high-pass: (f/fc) / sqrt(1 + (f/fc)^2).
inline double detector_transfer(double omega, double corner) {
  if (!(omega >= 0.0)) throw DomainError("frequency must be non-negative");
  if (corner <= 0.0) return 1.0;
  const double r = omega / corner;
  return r / std::sqrt(1.0 + r * r);
}

inline double detector_transfer(double omega, const HomodyneConfig& c) { return detector_transfer(omega, c.hf_corner); }

inline double shot_level(const HomodyneConfig& c) { return c.lo_power / c.reference_lo_power; }
inline double dark_level(const HomodyneConfig& c) { return db_to_ratio(c.dark_noise_rel_shot_db); }
inline double classical_level(const HomodyneConfig& c) {
  if (!c.classical_noise) return 0.0;
  const double r = shot_level(c);
  return db_to_ratio(c.classical_noise_rel_shot_db) * r * r;
}

/// Variance of quadrature theta after the detection losses, averaged over a
/// Gaussian angle jitter.
inline double detected_variance(const QuadratureState& s, double theta, double eta, double jitter_rms) {
  const QuadratureState r = rotate(apply_loss(s, eta), theta);
  if (jitter_rms <= 0.0) return r.v11;
  const double c2 = 0.5 * (1.0 + std::exp(-2.0 * jitter_rms * jitter_rms));
  return c2 * r.v11 + (1.0 - c2) * r.v22;
}

/// Per-bin result of a homodyne spectrum measurement.
struct MeasuredSpectrum {
  std::vector<double> freq;       ///< Hz
  std::vector<double> raw;        ///< absolute PSD including electronic noise
  std::vector<double> dark;       ///< calibrated electronic-noise PSD
  std::vector<double> corrected;  ///< raw - dark
  std::vector<double> variance;   ///< corrected PSD in shot-noise units of the configured LO
  int averages = 0;
  double rbw = 0.0;
};

using StateSpectrum = std::function<QuadratureState(double)>;

/// Simulate the subtracted photocurrent for one analyzer window and estimate
/// its spectrum. `extra_transmission` multiplies the homodyne efficiency.
inline MeasuredSpectrum measure_spectrum(const StateSpectrum& state, double theta_lo, const HomodyneConfig& cfg,
                                         const SpectrumWindow& window, std::uint64_t seed,
                                         double extra_transmission = 1.0, double sample_rate = 0.0) {
  validate(cfg);
  validate(window);
  const double eta = effective_efficiency(cfg, extra_transmission);
  const double fs = sample_rate > 0.0 ? sample_rate : window_sample_rate(window);
  const double shot = shot_level(cfg);
  const double dark = dark_level(cfg);
  const double classical = classical_level(cfg);
  const auto noise_psd = [&](double f) {
    const double h = detector_transfer(f, cfg);
    if (h == 0.0) return 0.0;
    const double v = detected_variance(state(f), theta_lo, eta, cfg.angle_jitter_rms);
    return (shot * v + classical + dark) * h * h;
  };
  const double duration = required_duration(window);
  std::vector<double> series = synthesize_for_window(noise_psd, window, fs, duration, seed);

  if (cfg.mains) {
    Rng rng(derive_seed(seed, {0x3a175}));
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    for (double f0 : {50.0, 150.0}) {
      const double h = detector_transfer(f0, cfg);
      const double amp = std::sqrt(2.0 * db_to_ratio(cfg.mains_rel_shot_db) * shot) * h;
      const double ph = u(rng);
      for (std::size_t n = 0; n < series.size(); ++n)
        series[n] += amp * std::sin(2.0 * std::numbers::pi * f0 * static_cast<double>(n) / fs + ph);
    }
  }

  const PsdEstimate est = estimate_psd(series, fs, window);
  MeasuredSpectrum m;
  m.freq = est.freq;
  m.raw = est.power;
  m.averages = est.averages;
  m.rbw = est.rbw;
  const std::size_t nb = est.freq.size();
  m.dark.resize(nb);
  m.corrected.resize(nb);
  m.variance.resize(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    const double h = detector_transfer(est.freq[k], cfg);
    m.dark[k] = dark * h * h;
    m.corrected[k] = subtract_dark_noise(m.raw[k], m.dark[k]);
    m.variance[k] = m.corrected[k] / (shot * h * h);
  }
  return m;
}

struct VarianceEstimate {
  double raw_power = 0.0;        ///< mean absolute PSD over the window, before dark subtraction
  double corrected_power = 0.0;  ///< after dark subtraction
  double variance = 0.0;         ///< shot-noise units
  double sigma = 0.0;            ///< one-sigma statistical error of `variance`
};

inline VarianceEstimate summarize(const MeasuredSpectrum& m) {
  VarianceEstimate v;
  const auto n = static_cast<double>(m.freq.size());
  double var_sq = 0.0;
  for (std::size_t k = 0; k < m.freq.size(); ++k) {
    v.raw_power += m.raw[k];
    v.corrected_power += m.corrected[k];
    v.variance += m.variance[k];
    const double rel = m.raw[k] / m.corrected[k];
    var_sq += rel * rel;
  }
  v.raw_power /= n;
  v.corrected_power /= n;
  v.variance /= n;
  // per-bin relative scatter is (raw/corrected)/sqrt(M); Hann bins are correlated
  v.sigma = v.variance * std::sqrt(var_sq / n * kHannBinCorrelation / (n * m.averages));
  return v;
}

/// Quadrature variance of a single-frequency state measured over one window.
inline VarianceEstimate measure_variance(const QuadratureState& state, double theta_lo, const HomodyneConfig& cfg,
                                         const SpectrumWindow& window, std::uint64_t seed) {
  return summarize(measure_spectrum([&](double) { return state; }, theta_lo, cfg, window, seed));
}

}  // namespace sqz
