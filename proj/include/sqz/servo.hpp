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

// PI servo with a range- and slew-limited piezo actuator.

#include <algorithm>
#include <cmath>
#include <limits>

#include "sqz/error.hpp"

namespace sqz {

struct ServoConfig {
  double kp = 0.5;                ///< proportional gain
  double ki = 500.0;              ///< integral gain, 1/s
  double actuator_range = 12.566370614359172;  ///< total throw (4 pi rad)
  double actuator_rate_limit = std::numeric_limits<double>::infinity();  ///< rad/s
  double setpoint = 0.0;
};

inline void validate(const ServoConfig& c) {
  if (!(c.actuator_range > 0.0)) throw DomainError("actuator range must be positive");
  if (!std::isfinite(c.kp) || !std::isfinite(c.ki)) throw DomainError("servo gains must be finite");
  if (!(c.actuator_rate_limit > 0.0)) throw DomainError("actuator rate limit must be positive");
}

struct ServoState {
  double integral = 0.0;  ///< time integral of the error, error*s
  double command = 0.0;   ///< last actuator command
};

/// One servo update. The command is kp*e + ki*integral(e), clamped to
/// +-actuator_range/2 and slew limited. The integrator is frozen whenever the
/// output is clamped in the direction the error pushes (anti-windup) or the
/// slew limit is active.
inline double servo_step(ServoState& s, double error, const ServoConfig& c, double dt) {
  if (!(dt > 0.0)) throw DomainError("servo time step must be positive");
  const double e = error - c.setpoint;
  const double half = c.actuator_range / 2.0;

  double integral = s.integral + e * dt;
  double u = c.kp * e + c.ki * integral;
  if ((u > half && e * c.ki > 0.0) || (u < -half && e * c.ki < 0.0)) {
    integral = s.integral;
    u = c.kp * e + c.ki * integral;
  }
  u = std::clamp(u, -half, half);

  const double max_step = c.actuator_rate_limit * dt;
  const double du = u - s.command;
  if (std::abs(du) > max_step) {
    u = s.command + std::copysign(max_step, du);
    integral = s.integral;
  }
  s.integral = integral;
  s.command = u;
  return u;
}

/// First-order mechanical response of a piezo-mounted mirror.
struct PztActuator {
  double tau = 0.0;       ///< response time constant, s (0 = instantaneous)
  double position = 0.0;  ///< current displacement, rad

  double step(double target, double dt) {
    if (tau <= 0.0) {
      position = target;
    } else {
      position = target + (position - target) * std::exp(-dt / tau);
    }
    return position;
  }
};

}  // namespace sqz
