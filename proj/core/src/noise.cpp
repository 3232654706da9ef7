// Copyright 2026 The wvqkd Authors
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

#include "wvqkd/noise.hpp"

#include <cmath>
#include <string>

#include "wvqkd/error.hpp"

namespace wvqkd {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

void ChannelNoise::validate() const {
  require(p_a >= 0.0 && p_a <= 0.5, "p_a must lie in [0, 1/2]");
  require(p_b >= 0.0 && p_b <= 0.5, "p_b must lie in [0, 1/2]");
}

void DetectorModel::validate() const {
  require(r_d1 >= 0.0 && r_d2 >= 0.0, "dark count rates must be nonnegative");
  require(t >= 0.0, "detection window must be nonnegative");
  require(eta >= 0.0 && eta <= 1.0, "detector efficiency must lie in [0, 1]");
  require(kappa >= 0.0 && l >= 0.0 && c >= 0.0, "losses and distance must be nonnegative");
  require(r_d1 * t <= 1.0 && r_d2 * t <= 1.0, "dark count probability per window exceeds 1");
}

DarkCountStats dark_params(const DetectorModel& det) {
  det.validate();
  DarkCountStats s;
  s.p_d1 = det.r_d1 * det.t;
  s.p_d2 = det.r_d2 * det.t;
  s.p_dark = s.p_d1 + s.p_d2 - s.p_d1 * s.p_d2;
  s.p_photon = det.eta * std::pow(10.0, -(det.kappa * det.l + det.c) / 10.0);
  s.p_signal = s.p_photon + s.p_dark - s.p_photon * s.p_dark;
  if (!(s.p_signal > 0.0)) {
    throw DeadChannel("dead channel: no photons and no dark counts can produce a click");
  }
  s.d = s.p_dark / s.p_signal;
  return s;
}

DarkCountStats dark_params_with_attenuation(double d) {
  require(in_unit(d), "dark attenuation d must lie in [0, 1]");
  DarkCountStats s;
  s.p_dark = d;
  s.p_d1 = 1.0 - std::sqrt(1.0 - d);
  s.p_d2 = s.p_d1;
  s.p_photon = 1.0;
  s.p_signal = 1.0;
  s.d = d;
  return s;
}

double total_qber(double p_channel, double d) {
  require(in_unit(p_channel) && in_unit(d), "total_qber: inputs must lie in [0, 1]");
  return p_channel + d / 2.0;
}

}  // namespace wvqkd
