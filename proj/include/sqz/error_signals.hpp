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

// Analytic error signals of the coherent control scheme.
//
// Conventions (all error signals):
//  * values are the full amplitude of the demodulated beat, i.e. twice the
//    lock-in output of `demodulate`;
//  * the demodulation reference is derived from the control-field drive, so
//    it follows the launch phase arg(alpha);
//  * slopes are positive at the intended lock point and the actuator applies
//    the negative of the servo command.

#include <cmath>
#include <complex>
#include <numbers>

#include "sqz/error.hpp"
#include "sqz/opo.hpp"
#include "sqz/quadrature.hpp"

namespace sqz {

/// Lock-in output to error-signal scale.
inline constexpr double kErrorSignalScale = 2.0;

/// Reference phase of the 2*Omega demodulation (relative to the doubled
/// control-field drive) that turns the beat into a sin(2 phi) error.
inline constexpr double kPumpDemodPhase = std::numbers::pi / 2.0;

/// Default reference phase of the Omega homodyne demodulation. With the pump
/// loop locked at phi = 0 the error is -2 L |alpha| sqrt(g) cos(theta), which
/// crosses zero with positive slope at the squeezed quadrature theta = pi/2.
inline constexpr double kLoDemodPhase = std::numbers::pi;

/// Direct detection of the back-reflected control field, demodulated at
/// twice the detuning: (g - 1/g)/2 |alpha|^2 sin(2 phi).
inline double pump_phase_error(const ControlField& field, double g, double phi) {
  if (!(g >= 1.0)) throw DomainError("parametric gain must be >= 1");
  return 0.5 * (g - 1.0 / g) * std::norm(field.alpha) * std::sin(2.0 * phi);
}

/// Balanced-homodyne difference current of the amplified control sidebands
/// against the LO (amplitude sqrt(lo_power), quadrature angle theta_lo in the
/// pump frame), demodulated at the detuning with reference phase
/// arg(alpha) + demod_phase. `reference_phase` is arg(alpha).
inline double lo_phase_error(const SidebandPair& sidebands, const CarrierConfig& lo, double theta_lo,
                             double demod_phase = kLoDemodPhase, double reference_phase = 0.0) {
  validate(lo);
  const double amp = std::sqrt(lo.lo_power);
  const double ref = reference_phase + demod_phase;
  const double up = std::abs(sidebands.upper) * std::cos(std::arg(sidebands.upper) - theta_lo - ref);
  const double dn = std::abs(sidebands.lower) * std::cos(theta_lo - std::arg(sidebands.lower) - ref);
  return 2.0 * amp * (up + dn);
}

inline double lo_phase_error(const ControlField& field, double g, double phi, const CarrierConfig& lo,
                             double theta_lo, double demod_phase = kLoDemodPhase) {
  return lo_phase_error(amplify_control_field(field, g, phi), lo, theta_lo, demod_phase, std::arg(field.alpha));
}

/// Default free spectral range in units of the cavity half-linewidth
/// (3.8 GHz / 13.5 MHz).
inline constexpr double kDefaultFsrInLinewidths = 3.8e9 / 13.5e6;

/// Dispersive cavity-length error, Im[1 / (1 - i d)] = d / (1 + d^2), with the
/// detuning d in units of the half-linewidth. Unit slope at resonance.
inline double opo_length_error(double detuning, double fsr_in_linewidths = kDefaultFsrInLinewidths) {
  if (!(std::abs(detuning) < fsr_in_linewidths)) throw DomainError("cavity detuning must be within one free spectral range");
  return detuning / (1.0 + detuning * detuning);
}

/// Fraction of on-resonance power coupled into the cavity; used as the
/// capture indicator while sweeping.
inline double resonance_indicator(double detuning) { return 1.0 / (1.0 + detuning * detuning); }

}  // namespace sqz
