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

#pragma once

namespace wvqkd {

/// Bit-error probabilities before (p_a) and after (p_b) Bob's weak measurement.
struct ChannelNoise {
  double p_a = 0.0;
  double p_b = 0.0;

  double p_channel() const { return p_a + p_b; }

  /// Throws DomainError unless both lie in [0, 1/2].
  void validate() const;
};

/// Detector and link parameters. Rates in counts/s, t in s, losses in dB.
struct DetectorModel {
  double r_d1 = 0.0;
  double r_d2 = 0.0;
  double t = 1e-9;
  double eta = 1.0;
  double kappa = 0.0;  // dB/km
  double l = 0.0;      // km
  double c = 0.0;      // dB

  void validate() const;
};

struct DarkCountStats {
  double p_d1 = 0.0;
  double p_d2 = 0.0;
  double p_dark = 0.0;
  double p_photon = 1.0;
  double p_signal = 1.0;
  /// Probability that a click carries a pointer reading uncorrelated with the signal.
  double d = 0.0;
};

/// Dark-count chain: p_d = r_d t, inclusion-exclusion for p_dark,
/// p_photon = eta 10^{-(kappa l + c)/10}, d = p_dark / p_signal.
/// Throws DeadChannel when p_signal is zero.
DarkCountStats dark_params(const DetectorModel& det);

/// Stats for a lossless link whose clicks are dark with fixed probability d.
DarkCountStats dark_params_with_attenuation(double d);

/// QBER = p_channel + d/2.
double total_qber(double p_channel, double d);

}  // namespace wvqkd
