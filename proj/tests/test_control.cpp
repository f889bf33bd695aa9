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


#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "sqz/error_signals.hpp"
#include "sqz/lockin.hpp"
#include "sqz/servo.hpp"

using namespace sqz;
using std::numbers::pi;
using cplx = std::complex<double>;

namespace {

std::vector<double> tone(double amp, double f, double phase, double fs, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = amp * std::cos(2.0 * pi * f * static_cast<double>(i) / fs + phase);
  return v;
}

// corner giving exactly `periods` reference periods in the boxcar
DemodConfig demod(double f, double phase, int periods) { return {f, phase, 0.443 * f / periods}; }

double brute_pump_error(const ControlField& field, double g, double phi) {
  const SidebandPair sb = amplify_control_field(field, g, phi);
  const oracle::Photocurrents pc = oracle::photocurrents(sb, 1e-4, 0.0, 40);
  const DemodConfig c = demod(2.0 * sb.detuning, 2.0 * std::arg(field.alpha) + kPumpDemodPhase, 20);
  return kErrorSignalScale * oracle::mean(demodulate(pc.direct, pc.fs, c));
}

double brute_lo_error(const ControlField& field, double g, double phi, const CarrierConfig& lo, double theta) {
  const SidebandPair sb = amplify_control_field(field, g, phi);
  const oracle::Photocurrents pc = oracle::photocurrents(sb, lo.lo_power, theta, 40);
  const DemodConfig c = demod(sb.detuning, std::arg(field.alpha) + kLoDemodPhase, 20);
  return kErrorSignalScale * oracle::mean(demodulate(pc.homodyne_difference, pc.fs, c));
}

}  // namespace

TEST(LockIn, MatchedToneGivesHalfAmplitude) {
  const double fs = 64e3, f = 1e3;
  const auto s = tone(3.0, f, 0.7, fs, 6400);
  for (double v : demodulate(s, fs, demod(f, 0.7, 10))) EXPECT_NEAR(v, 1.5, 1e-12);
  for (double v : demodulate(s, fs, demod(f, 0.7 + pi / 2, 10))) EXPECT_NEAR(v, 0.0, 1e-12);
  for (double v : demodulate(s, fs, demod(f, 0.2, 10))) EXPECT_NEAR(v, 1.5 * std::cos(0.5), 1e-12);
}

TEST(LockIn, HarmonicsAndOffsetsAreRejected) {
  const double fs = 64e3, f = 1e3;
  auto s = tone(1.0, 2.0 * f, 0.3, fs, 6400);
  const auto h3 = tone(0.5, 3.0 * f, 1.0, fs, 6400);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] += h3[i] + 4.0;
  for (double v : demodulate(s, fs, demod(f, 0.0, 10))) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(LockIn, OutputLengthAndLowpassLength) {
  const double fs = 64e3;
  const DemodConfig c = demod(1e3, 0.0, 10);
  EXPECT_EQ(lowpass_length(fs, c), 640u);
  EXPECT_EQ(demodulate(tone(1.0, 1e3, 0.0, fs, 1000), fs, c).size(), 361u);
}

TEST(LockIn, InvalidInputs) {
  const std::vector<double> s(1000, 0.0);
  EXPECT_THROW(demodulate(s, 1.9e3, demod(1e3, 0.0, 1)), SamplingError);
  EXPECT_THROW(demodulate(s, 64e3, demod(1e3, 0.0, 100)), SamplingError);
  EXPECT_THROW(demodulate(s, 64e3, {0.0, 0.0, 1.0}), DomainError);
  EXPECT_THROW(demodulate(s, 64e3, {1e3, 0.0, 600.0}), DomainError);
}

TEST(PumpPhaseError, Examples) {
  const ControlField f{{1.0, 0.0}, 40e6, 0.0};
  for (double phi : {0.0, 0.3, 1.2}) EXPECT_NEAR(pump_phase_error(f, 1.0, phi), 0.0, 1e-15);
  EXPECT_NEAR(pump_phase_error(f, 4.0, 0.0), 0.0, 1e-15);
  EXPECT_GT(pump_phase_error(f, 4.0, 1e-3), 0.0);
  EXPECT_LT(pump_phase_error(f, 4.0, -1e-3), 0.0);
  EXPECT_NEAR(pump_phase_error(f, 4.0, pi / 8), 15.0 / 8.0 * std::sin(pi / 4), 1e-14);
  EXPECT_NEAR(pump_phase_error(f, 4.0, pi / 8), 1.326, 5e-4);
}

TEST(PumpPhaseError, MatchesBruteForceAtReferencePoint) {
  const ControlField f{{1.0, 0.0}, 40e6, 0.0};
  const double ref = pump_phase_error(f, 4.0, pi / 8);
  EXPECT_NEAR(brute_pump_error(f, 4.0, pi / 8), ref, 1e-6 * std::abs(ref));
}

TEST(LoPhaseError, Examples) {
  const CarrierConfig lo{};
  for (double th : {0.0, 1.0, 2.5}) EXPECT_EQ(lo_phase_error({{0.0, 0.0}, 40e6, 0.0}, 4.0, 0.3, lo, th), 0.0);
  // single tone: sinusoidal in theta with a single zero crossing per half turn
  const ControlField f{{1.0, 0.0}, 40e6, 0.0};
  const double a = 2.0 * std::sqrt(lo.lo_power);
  for (double th = 0.0; th < 2.0 * pi; th += 0.1)
    EXPECT_NEAR(lo_phase_error(f, 1.0, 0.0, lo, th), -a * std::cos(th), 1e-14);
  // locked pump: zero with positive slope at the squeezed quadrature
  EXPECT_NEAR(lo_phase_error(f, 4.0, 0.0, lo, kSqueezedQuadrature), 0.0, 1e-15);
  EXPECT_GT(lo_phase_error(f, 4.0, 0.0, lo, kSqueezedQuadrature + 1e-3), 0.0);
  EXPECT_LT(lo_phase_error(f, 4.0, 0.0, lo, kSqueezedQuadrature - 1e-3), 0.0);
}

TEST(LoPhaseError, SweepMatchesBruteForceHomodyne) {
  const CarrierConfig lo{};
  const ControlField f{{1.0, 0.0}, 40e6, 0.0};
  const double scale = 2.0 * std::sqrt(lo.lo_power) * (1.25 + 0.75);
  for (int k = 0; k < 64; ++k) {
    const double th = 2.0 * pi * k / 64.0;
    EXPECT_NEAR(brute_lo_error(f, 4.0, 0.0, lo, th), lo_phase_error(f, 4.0, 0.0, lo, th), 1e-6 * scale) << th;
  }
}

TEST(ErrorSignals, RandomDrawsMatchBruteForce) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double g = 1.0 + 9.0 * u(rng);
    const double phi = 2.0 * pi * u(rng);
    const double theta = 2.0 * pi * u(rng);
    const ControlField f{std::polar(0.1 + 1.9 * u(rng), 2.0 * pi * u(rng)), 1e6 + 1e8 * u(rng), 0.0};
    const CarrierConfig lo{2.8e14, 1e-5 + 1e-3 * u(rng)};

    const double pump_scale = 0.5 * (g - 1.0 / g) * std::norm(f.alpha) + 1e-300;
    const SidebandPair sb = amplify_control_field(f, g, phi);
    const double lo_scale = 2.0 * std::sqrt(lo.lo_power) * (std::abs(sb.upper) + std::abs(sb.lower));
    EXPECT_NEAR(brute_pump_error(f, g, phi), pump_phase_error(f, g, phi), 1e-6 * pump_scale) << i;
    EXPECT_NEAR(brute_lo_error(f, g, phi, lo, theta), lo_phase_error(f, g, phi, lo, theta), 1e-6 * lo_scale) << i;
  }
}

TEST(OpoLengthError, Examples) {
  EXPECT_EQ(opo_length_error(0.0), 0.0);
  for (double d : {0.1, 0.9, 3.0, 40.0}) EXPECT_DOUBLE_EQ(opo_length_error(-d), -opo_length_error(d));
  const double h = 1e-6;
  EXPECT_NEAR((opo_length_error(h) - opo_length_error(-h)) / (2.0 * h), 1.0, 1e-9);
  EXPECT_THROW(opo_length_error(kDefaultFsrInLinewidths), DomainError);
  EXPECT_THROW(opo_length_error(5.0, 4.0), DomainError);
  EXPECT_DOUBLE_EQ(resonance_indicator(0.0), 1.0);
  EXPECT_DOUBLE_EQ(resonance_indicator(1.0), 0.5);
}

TEST(Servo, ZeroErrorGivesZeroCommand) {
  ServoState s;
  const ServoConfig c{};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(servo_step(s, 0.0, c, 1e-4), 0.0);
}

TEST(Servo, ProportionalOnlyAndClamp) {
  ServoConfig c{};
  c.ki = 0.0;
  ServoState s;
  EXPECT_DOUBLE_EQ(servo_step(s, 0.8, c, 1e-4), 0.4);
  EXPECT_DOUBLE_EQ(servo_step(s, 100.0, c, 1e-4), c.actuator_range / 2.0);
  EXPECT_DOUBLE_EQ(servo_step(s, -100.0, c, 1e-4), -c.actuator_range / 2.0);
  EXPECT_THROW(servo_step(s, 1.0, c, 0.0), DomainError);
}

TEST(Servo, AntiWindupKeepsIntegratorBounded) {
  const ServoConfig c{};
  ServoState s;
  for (int i = 0; i < 100000; ++i) servo_step(s, 5.0, c, 1e-4);
  // integration stops within one integrator increment of the clamp
  EXPECT_NEAR(s.command, c.actuator_range / 2.0, c.ki * 5.0 * 1e-4);
  EXPECT_LE(c.ki * s.integral, c.actuator_range / 2.0);
  // recovery begins on the first reversed sample
  const double u = servo_step(s, -0.1, c, 1e-4);
  EXPECT_LT(u, c.actuator_range / 2.0);
}

TEST(Servo, SlewLimit) {
  ServoConfig c{};
  c.actuator_rate_limit = 100.0;
  ServoState s;
  double prev = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double u = servo_step(s, 3.0, c, 1e-4);
    EXPECT_LE(std::abs(u - prev), 100.0 * 1e-4 + 1e-12);
    prev = u;
  }
}

TEST(Servo, PztFirstOrderLag) {
  PztActuator p{1e-3, 0.0};
  EXPECT_NEAR(p.step(1.0, 1e-3), 1.0 - std::exp(-1.0), 1e-12);
  PztActuator q{0.0, 0.0};
  EXPECT_EQ(q.step(2.0, 1e-3), 2.0);
}

TEST(Servo, StepResponseMatchesSecondOrderOracle) {
  const ServoConfig c{};
  const double tau = 5e-4, dt = 1e-6, d = 0.1, t_end = 0.05;
  ServoState s;
  PztActuator pzt{tau, 0.0};
  double sim_settle = 0.0, ref_settle = 0.0;
  const int steps = static_cast<int>(t_end / dt);
  for (int i = 0; i < steps; ++i) {
    const double t = i * dt;
    const double e = d + pzt.position;
    const double ref = oracle::servo_step_response(d, c.kp, c.ki, tau, t);
    ASSERT_NEAR(e, ref, 2e-3 * d) << t;
    if (std::abs(e) > 0.01 * d) sim_settle = t;
    if (std::abs(ref) > 0.01 * d) ref_settle = t;
    pzt.step(-servo_step(s, e, c, dt), dt);
  }
  EXPECT_GT(ref_settle, 0.0);
  EXPECT_LT(ref_settle, t_end / 2.0);
  EXPECT_NEAR(sim_settle, ref_settle, 0.2 * ref_settle);
}
