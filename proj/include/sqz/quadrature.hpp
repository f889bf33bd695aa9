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

// Gaussian quadrature states of a single optical sideband.
//
// Variances are in shot-noise units: the vacuum has unit variance in every
// quadrature. q1 is the amplitude quadrature (angle 0) and q2 the phase
// quadrature (angle pi/2).

#include <cmath>

#include "sqz/error.hpp"

namespace sqz {

struct QuadratureState {
  double v11 = 1.0;    ///< Var(q1)
  double v22 = 1.0;    ///< Var(q2)
  double v12 = 0.0;    ///< Cov(q1, q2)
  double omega = 0.0;  ///< sideband frequency, Hz

  bool operator==(const QuadratureState&) const = default;
};

struct CarrierConfig {
  double omega0 = 2.8176e14;  ///< optical carrier, Hz (1064 nm); informational
  double lo_power = 88e-6;    ///< local-oscillator power, W
};

inline void validate(const CarrierConfig& c) {
  if (!(c.lo_power > 0.0)) throw DomainError("lo_power must be positive");
}

inline QuadratureState vacuum_state(double omega) {
  if (!(omega >= 0.0)) throw DomainError("sideband frequency must be non-negative");
  return {1.0, 1.0, 0.0, omega};
}

/// State in quadratures rotated by theta; the new q1 is
/// q_theta = cos(theta) q1 + sin(theta) q2.
inline QuadratureState rotate(const QuadratureState& s, double theta) {
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  QuadratureState r = s;
  r.v11 = c * c * s.v11 + sn * sn * s.v22 + 2.0 * c * sn * s.v12;
  r.v22 = sn * sn * s.v11 + c * c * s.v22 - 2.0 * c * sn * s.v12;
  r.v12 = c * sn * (s.v22 - s.v11) + (c * c - sn * sn) * s.v12;
  return r;
}

/// Beam-splitter loss with power transmission eta; the lost fraction is
/// replaced by vacuum.
inline QuadratureState apply_loss(const QuadratureState& s, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("transmission must lie in [0, 1]");
  QuadratureState r = s;
  r.v11 = eta * s.v11 + (1.0 - eta);
  r.v22 = eta * s.v22 + (1.0 - eta);
  r.v12 = eta * s.v12;
  return r;
}

/// det of the covariance matrix, v11*v22 - v12^2, as a compensated (fma)
/// product.
inline double uncertainty_product(const QuadratureState& s) {
  const double w = s.v12 * s.v12;
  const double e = std::fma(-s.v12, s.v12, w);
  const double f = std::fma(s.v11, s.v22, -w);
  return f + e;
}

/// Positive-definite and above the uncertainty bound (within tol).
inline bool is_physical(const QuadratureState& s, double tol = 1e-9) {
  return s.v11 > 0.0 && s.v22 > 0.0 && uncertainty_product(s) >= 1.0 - tol;
}

/// Noise power of quadrature theta relative to shot noise, dB.
inline double variance_db(const QuadratureState& s, double theta) {
  return 10.0 * std::log10(rotate(s, theta).v11);
}

inline double db_to_ratio(double db) { return std::pow(10.0, db / 10.0); }
inline double ratio_to_db(double r) { return 10.0 * std::log10(r); }

}  // namespace sqz
