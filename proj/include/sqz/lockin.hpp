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

// Lock-in demodulation: mix with a reference tone, then low-pass with a
// boxcar spanning an integer number of reference periods.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "sqz/error.hpp"

namespace sqz {

struct DemodConfig {
  double freq = 1.0;       ///< demodulation frequency, Hz
  double phase = 0.0;      ///< reference phase, rad
  double lp_corner = 0.1;  ///< low-pass -3 dB corner, Hz
};

inline void validate(const DemodConfig& c) {
  if (!(c.freq > 0.0)) throw DomainError("demodulation frequency must be positive");
  if (!(c.lp_corner > 0.0)) throw DomainError("low-pass corner must be positive");
  if (!(c.lp_corner < c.freq / 2.0)) throw DomainError("low-pass corner must be below half the demodulation frequency");
}

/// Boxcar length in samples. A boxcar of duration T has its -3 dB point at
/// about 0.443/T. T is rounded to whole reference periods, which nulls every
/// harmonic of the reference.
inline std::size_t lowpass_length(double sample_rate, const DemodConfig& c) {
  const double periods = std::max(1.0, std::round(0.443 * c.freq / c.lp_corner));
  return static_cast<std::size_t>(std::llround(periods * sample_rate / c.freq));
}

/// Baseband output, one sample per fully populated low-pass window
/// ("valid" convolution). A tone A cos(2 pi f t + p) gives A/2 cos(p - phase).
inline std::vector<double> demodulate(std::span<const double> signal, double sample_rate, const DemodConfig& c) {
  validate(c);
  if (!(sample_rate > 2.0 * c.freq)) throw SamplingError("sample rate must exceed twice the demodulation frequency");
  const std::size_t len = lowpass_length(sample_rate, c);
  if (signal.size() < len) throw SamplingError("signal shorter than one low-pass window");

  const double w = 2.0 * std::numbers::pi * c.freq / sample_rate;
  std::vector<long double> prefix(signal.size() + 1, 0.0L);
  for (std::size_t n = 0; n < signal.size(); ++n) {
    const double mixed = signal[n] * std::cos(w * static_cast<double>(n) + c.phase);
    prefix[n + 1] = prefix[n] + mixed;
  }
  std::vector<double> out(signal.size() - len + 1);
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = static_cast<double>((prefix[n + len] - prefix[n]) / static_cast<long double>(len));
  }
  return out;
}

}  // namespace sqz
