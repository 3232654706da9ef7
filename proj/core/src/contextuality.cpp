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

#include "wvqkd/contextuality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wvqkd/error.hpp"

namespace wvqkd {

std::string_view to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::secure: return "secure";
    case VerdictStatus::abort: return "abort";
    default: return "blinding_signature";
  }
}

double contextuality_measure(double observed_wv, double ideal_wv) {
  if (!is_anomalous(ideal_wv)) {
    throw NonAnomalousReference("contextuality_measure: reference weak value lies in [0, 1]");
  }
  const double near = ideal_wv > 1.0 ? 1.0 : 0.0;
  const bool same_side = ideal_wv > 1.0 ? observed_wv > 1.0 : observed_wv < 0.0;
  if (!same_side) return 0.0;
  return std::min(1.0, std::abs(observed_wv - near) / std::abs(ideal_wv - near));
}

ContextualityReport contextuality_report(PpsKey ensemble, double observed_wv, double observed_se) {
  ContextualityReport r;
  r.ensemble = ensemble;
  r.projector = ensemble.designated_projector();
  r.observed_wv = observed_wv;
  r.ideal_wv = pps_weak_value(ensemble, r.projector, ChannelNoise{}, 0.0);
  r.c_value = contextuality_measure(observed_wv, r.ideal_wv);
  const double near = r.ideal_wv > 1.0 ? 1.0 : 0.0;
  r.standard_error = observed_se / std::abs(r.ideal_wv - near);
  return r;
}

bool secure_noise_region(double p_channel, double d) {
  if (!(p_channel >= 0.0 && p_channel <= 1.0 && d >= 0.0 && d <= 1.0)) {
    throw DomainError("secure_noise_region: inputs must lie in [0, 1]");
  }
  return p_channel * (1.0 - d) + d * (1.0 + 1.0 / std::numbers::sqrt2) < kChannelErrorThreshold;
}

SecurityVerdict verdict(std::span<const ContextualityReport> reports, double margin,
                        bool blinding_flag) {
  if (reports.empty()) throw std::invalid_argument("verdict: no contextuality reports");
  SecurityVerdict v;
  v.margin = margin;
  v.min_c = std::numeric_limits<double>::infinity();
  double lower = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (const auto& r : reports) {
    v.min_c = std::min(v.min_c, r.c_value);
    lower = std::min(lower, r.c_value - margin * r.standard_error);
    sum += r.c_value;
  }
  v.pooled_c = sum / static_cast<double>(reports.size());

  if (blinding_flag) {
    v.status = VerdictStatus::blinding_signature;
    v.reason = "weak values match detector-blinding expectation tables";
  } else if (lower > kSecureContextualityBound) {
    v.status = VerdictStatus::secure;
    v.reason = "contextuality above bound in every ensemble";
  } else {
    v.status = VerdictStatus::abort;
    v.reason = "contextuality not certified above 1/2 in every ensemble";
  }
  return v;
}

}  // namespace wvqkd
