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

// Colored Gaussian noise synthesis and averaged-periodogram estimation.
//
// PSDs are one-sided: a white series of variance s2 sampled at fs has level
// 2 s2 / fs. Each estimate averages `averages` non-overlapping Hann-windowed
// segments whose length fs/rbw makes the bin spacing equal the resolution
// bandwidth.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "sqz/error.hpp"
#include "sqz/fft.hpp"
#include "sqz/rng.hpp"

namespace sqz {

struct SpectrumWindow {
  double f_start = 0.0;  ///< Hz
  double f_stop = 0.0;   ///< Hz
  double rbw = 1.0;      ///< resolution bandwidth, Hz
  int averages = 1;

  bool operator==(const SpectrumWindow&) const = default;
};

inline void validate(const SpectrumWindow& w) {
  if (!(w.f_start < w.f_stop)) throw DomainError("window start must be below stop");
  if (!(w.rbw > 0.0)) throw DomainError("resolution bandwidth must be positive");
  if (!(w.rbw <= w.f_stop - w.f_start)) throw DomainError("resolution bandwidth exceeds the window span");
  if (!(w.averages >= 1)) throw DomainError("averages must be >= 1");
}

struct WindowPlan {
  std::vector<SpectrumWindow> windows;
};

inline void validate(const WindowPlan& p) {
  if (p.windows.empty()) throw DomainError("window plan is empty");
  for (std::size_t i = 0; i < p.windows.size(); ++i) {
    validate(p.windows[i]);
    if (i > 0) {
      const double gap = p.windows[i].f_start - p.windows[i - 1].f_stop;
      if (std::abs(gap) > 1e-9 * p.windows[i].f_start) throw DomainError("window plan must be contiguous and non-overlapping");
    }
  }
}

/// Five analyzer windows covering 10 Hz to 10 kHz.
inline WindowPlan default_window_plan() {
  return {{
      {10.0, 50.0, 0.25, 100},
      {50.0, 200.0, 1.0, 100},
      {200.0, 800.0, 2.0, 400},
      {800.0, 3200.0, 4.0, 400},
      {3200.0, 10000.0, 16.0, 800},
  }};
}

/// Sample rate of about oversample * f_stop, rounded up to a whole number of
/// resolution bandwidths.
inline double window_sample_rate(const SpectrumWindow& w, double oversample = 4.0) {
  validate(w);
  return std::ceil(oversample * w.f_stop / w.rbw - 1e-9) * w.rbw;
}

/// Segment length giving bin spacing rbw at sample rate fs.
inline std::size_t segment_length(double fs, double rbw) {
  const double n = fs / rbw;
  const double r = std::round(n);
  if (r < 2.0 || std::abs(n - r) > 1e-9 * n) throw PlanningError("sample rate must be a whole multiple of the resolution bandwidth");
  return static_cast<std::size_t>(r);
}

/// Shortest record that supports the window's averages at its RBW.
inline double required_duration(const SpectrumWindow& w) { return static_cast<double>(w.averages) / w.rbw; }

/// Real Gaussian series with one-sided PSD target(f). The series is built
/// from independent circular blocks of block_len samples (0: one block), each
/// from its own seeded stream, so blocks can be generated in any order.
template <class Psd>
std::vector<double> synthesize_noise(const Psd& target, double duration, double fs, std::uint64_t seed,
                                     std::size_t block_len = 0) {
  if (!(fs > 0.0)) throw DomainError("sample rate must be positive");
  if (!(duration > 0.0)) throw DomainError("duration must be positive");
  const auto n = static_cast<std::size_t>(std::llround(duration * fs));
  if (n < 2) throw PlanningError("duration too short for the sample rate");
  const std::size_t block = block_len == 0 ? n : block_len;
  const std::size_t nblocks = (n + block - 1) / block;

  std::vector<double> amp(block / 2 + 1);
  for (std::size_t k = 0; k < amp.size(); ++k) {
    const double s = target(static_cast<double>(k) * fs / static_cast<double>(block));
    if (!(s >= 0.0)) throw DomainError("target PSD must be non-negative");
    amp[k] = std::sqrt(static_cast<double>(block) * fs * s / 2.0);
  }

  std::vector<double> out(nblocks * block);
  RealFft fft(block);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t b = 0; b < nblocks; ++b) {
    Rng rng(derive_seed(seed, {b}));
    auto spec = fft.spectrum();
    for (std::size_t k = 0; k < spec.size(); ++k) {
      const bool real_bin = k == 0 || (block % 2 == 0 && k == block / 2);
      if (real_bin) {
        spec[k] = {amp[k] * normal(rng), 0.0};
      } else {
        const double re = normal(rng);
        const double im = normal(rng);
        spec[k] = {amp[k] * re / std::numbers::sqrt2, amp[k] * im / std::numbers::sqrt2};
      }
    }
    fft.inverse();
    const auto real = fft.real();
    for (std::size_t i = 0; i < block; ++i) out[b * block + i] = real[i] / static_cast<double>(block);
  }
  out.resize(n);
  return out;
}

/// synthesize_noise planned for a spectrum window: checks the record length
/// and aligns synthesis blocks with the estimator's segments.
template <class Psd>
std::vector<double> synthesize_for_window(const Psd& target, const SpectrumWindow& w, double fs, double duration,
                                          std::uint64_t seed) {
  validate(w);
  if (duration * (1.0 + 1e-12) < required_duration(w))
    throw PlanningError("duration too short: the window needs averages/rbw seconds");
  return synthesize_noise(target, duration, fs, seed, segment_length(fs, w.rbw));
}

enum class Averaging { Power, Amplitude };

/// Equivalent noise bandwidth of the periodic Hann window, in bins.
inline constexpr double kHannEnbw = 1.5;

/// Sum of squared power correlations between a Hann bin and all its
/// neighbours (1 + 2 (2/3)^2 + 2 (1/6)^2); divides the number of bins to give
/// the number of effectively independent bins.
inline constexpr double kHannBinCorrelation = 1.0 + 2.0 * 4.0 / 9.0 + 2.0 / 36.0;

struct PsdEstimate {
  std::vector<double> freq;   ///< Hz
  std::vector<double> power;  ///< one-sided PSD, units^2/Hz
  double rbw = 0.0;
  int averages = 0;
};

/// Averaged periodogram over all bins 0..seg_len/2.
inline PsdEstimate welch(std::span<const double> series, double fs, std::size_t seg_len, int averages,
                         Averaging mode = Averaging::Power) {
  if (averages < 1) throw DomainError("averages must be >= 1");
  if (series.size() < static_cast<std::size_t>(averages) * seg_len)
    throw PlanningError("series too short for the requested averages at this resolution");

  std::vector<double> win(seg_len);
  double wsq = 0.0;
  for (std::size_t n = 0; n < seg_len; ++n) {
    win[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(seg_len)));
    wsq += win[n] * win[n];
  }

  RealFft fft(seg_len);
  const std::size_t nb = fft.bins();
  std::vector<double> acc(nb, 0.0);
  for (int s = 0; s < averages; ++s) {
    auto real = fft.real();
    const std::size_t off = static_cast<std::size_t>(s) * seg_len;
    for (std::size_t n = 0; n < seg_len; ++n) real[n] = series[off + n] * win[n];
    fft.forward();
    const auto spec = fft.spectrum();
    for (std::size_t k = 0; k < nb; ++k) {
      const bool edge = k == 0 || (seg_len % 2 == 0 && k == seg_len / 2);
      const double p = (edge ? 1.0 : 2.0) * std::norm(spec[k]) / (fs * wsq);
      acc[k] += mode == Averaging::Power ? p : std::sqrt(p);
    }
  }

  PsdEstimate est;
  est.rbw = fs / static_cast<double>(seg_len);
  est.averages = averages;
  est.freq.resize(nb);
  est.power.resize(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    est.freq[k] = static_cast<double>(k) * est.rbw;
    const double m = acc[k] / averages;
    // mean chi(2) amplitude is sqrt(pi/4) of the rms
    est.power[k] = mode == Averaging::Power ? m : m * m * 4.0 / std::numbers::pi;
  }
  return est;
}

/// Averaged periodogram restricted to bins with f_start <= f < f_stop.
inline PsdEstimate estimate_psd(std::span<const double> series, double fs, const SpectrumWindow& w,
                                Averaging mode = Averaging::Power) {
  validate(w);
  const std::size_t seg = segment_length(fs, w.rbw);
  PsdEstimate full = welch(series, fs, seg, w.averages, mode);
  PsdEstimate est;
  est.rbw = full.rbw;
  est.averages = full.averages;
  for (std::size_t k = 0; k < full.freq.size(); ++k) {
    const double f = full.freq[k];
    if (f >= w.f_start - 1e-9 * w.rbw && f < w.f_stop - 1e-9 * w.rbw) {
      est.freq.push_back(f);
      est.power.push_back(full.power[k]);
    }
  }
  return est;
}

/// 10 log10(numerator / shot) per bin.
inline std::vector<double> to_db_rel(std::span<const double> numerator, std::span<const double> shot) {
  if (numerator.size() != shot.size()) throw DomainError("traces must have matching bins");
  std::vector<double> out(numerator.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(shot[i] > 0.0)) throw DomainError("shot-noise bins must be positive");
    out[i] = 10.0 * std::log10(numerator[i] / shot[i]);
  }
  return out;
}

/// One-sigma scatter, in dB, of a power-averaged bin.
inline double averaged_bin_sigma_db(int averages) {
  return 10.0 / std::numbers::ln10 / std::sqrt(static_cast<double>(averages));
}

}  // namespace sqz
