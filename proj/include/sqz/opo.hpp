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

// Below-threshold degenerate OPO.
//
// Frame convention: quadratures are referred to the pump. The OPO amplifies
// the amplitude quadrature q1 and deamplifies the phase quadrature q2, so a
// vacuum-seeded OPO emits a state with v11 = V_anti and v22 = V_sq, and the
// squeezed quadrature sits at kSqueezedQuadrature.

#include <cmath>
#include <complex>
#include <numbers>

#include "sqz/error.hpp"
#include "sqz/quadrature.hpp"

namespace sqz {

inline constexpr double kSqueezedQuadrature = std::numbers::pi / 2.0;

struct OpoParams {
  double x = 0.0;          ///< sqrt(P_pump / P_threshold), in [0, 1)
  double gamma = 13.5e6;   ///< cavity half-linewidth, Hz
  double eta_esc = 1.0;    ///< escape efficiency, (0, 1]
  double fsr = 3.8e9;      ///< free spectral range, Hz (informational)
};

/// Half-linewidth from a quoted cavity bandwidth.
inline double half_linewidth(double bandwidth, bool bandwidth_is_fwhm) {
  return bandwidth_is_fwhm ? bandwidth / 2.0 : bandwidth;
}

inline void validate(const OpoParams& p) {
  if (!(p.x >= 0.0)) throw DomainError("pump parameter x must be non-negative");
  if (!(p.x < 1.0)) throw AboveThresholdError("pump parameter x must be below threshold (x < 1)");
  if (!(p.gamma > 0.0)) throw DomainError("cavity half-linewidth must be positive");
  if (!(p.eta_esc > 0.0 && p.eta_esc <= 1.0)) throw DomainError("escape efficiency must lie in (0, 1]");
}

/// Output quadrature spectrum of the vacuum-seeded OPO at sideband omega.
inline QuadratureState squeezing_spectrum(const OpoParams& p, double omega) {
  validate(p);
  if (!(omega >= 0.0)) throw DomainError("sideband frequency must be non-negative");
  const double w2 = (omega / p.gamma) * (omega / p.gamma);
  const double k = p.eta_esc * 4.0 * p.x;
  QuadratureState s;
  s.v11 = 1.0 + k / ((1.0 - p.x) * (1.0 - p.x) + w2);
  s.v22 = 1.0 - k / ((1.0 + p.x) * (1.0 + p.x) + w2);
  s.v12 = 0.0;
  s.omega = omega;
  return s;
}

/// Classical power gain of the amplified quadrature at zero frequency.
inline double parametric_gain(const OpoParams& p) {
  validate(p);
  const double a = (1.0 + p.x) / (1.0 - p.x);
  return a * a;
}

/// Pump parameter x for which an OPO with total detection-chain efficiency
/// eta_total yields low-frequency squeezed variance target_variance.
/// Solves eta_total * 4x / (1+x)^2 = 1 - target_variance.
inline double calibrate_pump(double eta_total, double target_variance) {
  if (!(eta_total > 0.0 && eta_total <= 1.0)) throw DomainError("efficiency must lie in (0, 1]");
  if (!(target_variance > 0.0 && target_variance <= 1.0)) throw DomainError("target variance must lie in (0, 1]");
  const double c = (1.0 - target_variance) / eta_total;
  if (c >= 1.0) throw AboveThresholdError("target squeezing unreachable below threshold at this efficiency");
  if (c == 0.0) return 0.0;
  // smaller root of c x^2 + (2c - 4) x + c = 0
  return ((2.0 - c) - 2.0 * std::sqrt(1.0 - c)) / c;
}

struct ControlField {
  std::complex<double> alpha{1.0, 0.0};  ///< single-sideband amplitude
  double detuning = 40e6;                ///< offset from the carrier, Hz
  double phase_rel_pump = 0.0;           ///< rad
};

inline void validate(const ControlField& f) {
  if (f.detuning == 0.0) throw DomainError("control field detuning must be non-zero");
}

/// Sideband amplitudes at +detuning and -detuning.
struct SidebandPair {
  std::complex<double> upper;
  std::complex<double> lower;
  double detuning = 0.0;

  /// Complex envelope relative to the carrier at time t (s).
  std::complex<double> envelope(double t) const {
    const double ph = 2.0 * std::numbers::pi * detuning * t;
    return upper * std::polar(1.0, ph) + lower * std::polar(1.0, -ph);
  }
};

/// Phase-sensitive amplification of a frequency-shifted control field.
///
/// The input sideband a = alpha e^{i phi} at +detuning leaves the OPO as
/// mu a at +detuning plus the generated partner nu a* at -detuning, where
/// mu = (sqrt(g) + 1/sqrt(g))/2 and nu = (sqrt(g) - 1/sqrt(g))/2. The real
/// (pump-frame) part of the envelope is amplified by sqrt(g) and the
/// imaginary part deamplified by 1/sqrt(g).
inline SidebandPair amplify_control_field(const ControlField& field, double g, double phi) {
  validate(field);
  if (!(g >= 1.0)) throw DomainError("parametric gain must be >= 1");
  const double rg = std::sqrt(g);
  const double mu = 0.5 * (rg + 1.0 / rg);
  const double nu = 0.5 * (rg - 1.0 / rg);
  const std::complex<double> a = field.alpha * std::polar(1.0, phi);
  return {mu * a, nu * std::conj(a), field.detuning};
}

inline SidebandPair amplify_control_field(const ControlField& field, double g) {
  return amplify_control_field(field, g, field.phase_rel_pump);
}

}  // namespace sqz
