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

#include <stdexcept>
#include <string>

namespace sqz {

/// Argument outside the mathematical or physical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// OPO pump at or above oscillation threshold.
class AboveThresholdError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Input time series sampled too slowly for the requested demodulation.
class SamplingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Not enough data (or an inconsistent sample rate) for a spectrum window.
class PlanningError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dark-noise subtraction that would yield a non-positive power.
class NonPhysicalSubtraction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration file or flag values violating the schema.
class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sqz
