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

#include "sqz/config.hpp"
#include "sqz/detection.hpp"
#include "sqz/error.hpp"
#include "sqz/error_signals.hpp"
#include "sqz/fft.hpp"
#include "sqz/lock_chain.hpp"
#include "sqz/lockin.hpp"
#include "sqz/michelson.hpp"
#include "sqz/opo.hpp"
#include "sqz/quadrature.hpp"
#include "sqz/rng.hpp"
#include "sqz/scenarios.hpp"
#include "sqz/servo.hpp"
#include "sqz/spectra.hpp"
