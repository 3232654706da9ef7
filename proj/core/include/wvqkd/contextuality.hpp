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

#include <numbers>
#include <span>
#include <string>
#include <string_view>

#include "wvqkd/weak_values.hpp"

namespace wvqkd {

/// Weight of the classical component in the quantum/classical mixture at which
/// Eve's information matches Bob's; the channel is secure when C > 1 - a.
inline constexpr double kSecurityMixtureWeight = 0.5;
inline constexpr double kSecureContextualityBound = 1.0 - kSecurityMixtureWeight;

/// 1/2 - sqrt(2)/4, the bit-error threshold at d = 0.
inline constexpr double kChannelErrorThreshold = 0.5 - std::numbers::sqrt2 / 4.0;
/// (sqrt2 - 1) / (2 (sqrt2 + 1)): no channel is secure at or above this d.
inline constexpr double kDarkAttenuationThreshold =
    (std::numbers::sqrt2 - 1.0) / (2.0 * (std::numbers::sqrt2 + 1.0));

struct ContextualityReport {
  PpsKey ensemble;
  ProjectorChoice projector;
  double observed_wv = 0.0;
  double ideal_wv = 0.0;
  double c_value = 0.0;
  /// Standard error of c_value; zero for analytic reports.
  double standard_error = 0.0;
};

enum class VerdictStatus { secure, abort, blinding_signature };
std::string_view to_string(VerdictStatus s);

struct SecurityVerdict {
  VerdictStatus status = VerdictStatus::abort;
  double min_c = 0.0;
  /// Mean C over the reports; reported alongside, never gated on.
  double pooled_c = 0.0;
  double margin = 0.0;
  std::string reason;
};

/// Normalized distance of an anomalous observed weak value from the nearest
/// projector eigenvalue, relative to the noiseless value. Zero when the
/// observed value lies in [0, 1] (boundaries included) or on the opposite
/// side of [0, 1] from the ideal; clamped to 1.
/// Throws NonAnomalousReference when ideal_wv is within [0, 1].
double contextuality_measure(double observed_wv, double ideal_wv);

/// Report for an ensemble's designated projector from an observed weak value.
ContextualityReport contextuality_report(PpsKey ensemble, double observed_wv,
                                         double observed_se = 0.0);

/// p_channel (1 - d) + d (1 + 1/sqrt2) < 1/2 - sqrt2/4.
bool secure_noise_region(double p_channel, double d);

/// Secure iff min_k (c_k - margin * se_k) > 1/2; blinding_flag takes precedence.
/// Throws std::invalid_argument on an empty report list.
SecurityVerdict verdict(std::span<const ContextualityReport> reports, double margin,
                        bool blinding_flag);

}  // namespace wvqkd
