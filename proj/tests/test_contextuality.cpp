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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "wvqkd/contextuality.hpp"
#include "wvqkd/error.hpp"
#include "wvqkd/weak_values.hpp"

namespace wvqkd {
namespace {

const double kRt2 = std::sqrt(2.0);
const double kIdeal = 0.5 + 1 / kRt2;

double analytic_c(PpsKey k, double p, double d) {
  const ProjectorChoice des = k.designated_projector();
  return contextuality_measure(pps_weak_value(k, des, {p / 2, p / 2}, d),
                               pps_weak_value(k, des, {}, 0.0));
}

TEST(ContextualityMeasure, Examples) {
  EXPECT_NEAR(contextuality_measure(1.2071068, 1.2071068), 1.0, 1e-12);
  EXPECT_NEAR(contextuality_measure(1.1035534, 1.2071068), 0.5, 1e-7);
  // Seven-digit inputs carry about 5e-7 of rounding into the ratio.
  EXPECT_NEAR(contextuality_measure(1.1275274, 1.2071068), 0.6157563, 1e-6);
  const double exact = (0.98 * (0.5 + 0.92 / kRt2) - 1) / (1 / kRt2 - 0.5);
  EXPECT_NEAR(contextuality_measure(0.98 * (0.5 + 0.92 / kRt2), kIdeal), exact, 1e-12);
  EXPECT_NEAR(exact, 0.6157571, 1e-7);
}

TEST(ContextualityMeasure, BoundaryAndWrongSideAreZero) {
  EXPECT_EQ(contextuality_measure(1.0, kIdeal), 0.0);
  EXPECT_EQ(contextuality_measure(0.5, kIdeal), 0.0);
  EXPECT_EQ(contextuality_measure(-0.3, kIdeal), 0.0);
  EXPECT_EQ(contextuality_measure(0.0, -0.2071068), 0.0);
  EXPECT_EQ(contextuality_measure(1.2, -0.2071068), 0.0);
  EXPECT_EQ(contextuality_measure(1.5, kIdeal), 1.0);
}

TEST(ContextualityMeasure, NonAnomalousReferenceThrows) {
  EXPECT_THROW(contextuality_measure(0.4, 0.5), NonAnomalousReference);
  EXPECT_THROW(contextuality_measure(0.4, 1.0), NonAnomalousReference);
}

TEST(ContextualityMeasure, ThresholdCrossing) {
  const double p_star = 0.5 - kRt2 / 4;
  EXPECT_NEAR(p_star, 0.1464466, 1e-7);
  EXPECT_NEAR(analytic_c(PpsKey::from_index(0), p_star, 0.0), 0.5, 1e-12);
  EXPECT_NEAR(kChannelErrorThreshold, p_star, 1e-15);
  const double d_star = (kRt2 - 1) / (2 * (kRt2 + 1));
  EXPECT_NEAR(d_star, 0.0857864, 1e-7);
  EXPECT_NEAR(kDarkAttenuationThreshold, d_star, 1e-15);
}

TEST(ContextualityMeasure, AnalyticConsistency) {
  // Ensembles with an H value above 1 follow the closed form for every d.
  // Ensembles with an H value below 0 attenuate toward their own nearest
  // eigenvalue 0 and agree with it at d = 0 only.
  for (int i = 0; i <= 30; ++i) {
    for (int j = 0; j <= 12; ++j) {
      const double p = 0.01 * i;
      const double d = 0.01 * j;
      const double upper =
          std::clamp(((1 - d) * (0.5 + (1 - p) / kRt2) - 1) / (1 / kRt2 - 0.5), 0.0, 1.0);
      const double lower =
          std::clamp((1 - d) * ((1 - p) / kRt2 - 0.5) / (1 / kRt2 - 0.5), 0.0, 1.0);
      for (PpsKey k : kAllEnsembles) {
        const double c = analytic_c(k, p, d);
        EXPECT_NEAR(c, k.group() <= 2 ? upper : lower, 1e-12) << k.label() << ' ' << p << ' ' << d;
        if (d == 0.0) EXPECT_NEAR(c, upper, 1e-12);
      }
    }
  }
}

TEST(ContextualityMeasure, ClampAndMonotonicity) {
  for (PpsKey k : kAllEnsembles) {
    double prev_p = 2.0;
    for (int i = 0; i <= 100; ++i) {
      const double c = analytic_c(k, 0.01 * i, 0.0);
      EXPECT_GE(c, 0.0);
      EXPECT_LE(c, 1.0);
      EXPECT_LE(c, prev_p + 1e-15);
      prev_p = c;
    }
    double prev_d = 2.0;
    for (int j = 0; j <= 100; ++j) {
      const double c = analytic_c(k, 0.05, 0.01 * j);
      EXPECT_GE(c, 0.0);
      EXPECT_LE(c, 1.0);
      EXPECT_LE(c, prev_d + 1e-15);
      prev_d = c;
    }
  }
}

TEST(SecureNoiseRegion, Examples) {
  EXPECT_TRUE(secure_noise_region(0.14644, 0.0));
  EXPECT_FALSE(secure_noise_region(0.14645, 0.0));
  const double d_star = (kRt2 - 1) / (2 * (kRt2 + 1));
  EXPECT_FALSE(secure_noise_region(0.0, d_star));
  EXPECT_FALSE(secure_noise_region(0.0, 0.0857865));
  // The seven-digit rounding 0.0857864 lies just below the exact threshold.
  EXPECT_TRUE(secure_noise_region(0.0, 0.0857864));
  EXPECT_TRUE(secure_noise_region(0.0, 0.0));
  EXPECT_THROW(secure_noise_region(1.1, 0.0), DomainError);
}

TEST(SecureNoiseRegion, BoundaryEquivalence) {
  const PpsKey k = PpsKey::from_index(0);
  for (int i = 0; i <= 300; ++i) {
    for (int j = 0; j <= 120; ++j) {
      const double p = 0.001 * i;
      const double d = 0.001 * j;
      EXPECT_EQ(analytic_c(k, p, d) > 0.5, secure_noise_region(p, d)) << p << ' ' << d;
    }
  }
}

std::vector<ContextualityReport> uniform_reports(double c, double se) {
  std::vector<ContextualityReport> out;
  for (PpsKey k : kAllEnsembles) {
    ContextualityReport r;
    r.ensemble = k;
    r.projector = k.designated_projector();
    r.c_value = c;
    r.standard_error = se;
    out.push_back(r);
  }
  return out;
}

TEST(Verdict, Examples) {
  const auto ones = uniform_reports(1.0, 0.0);
  EXPECT_EQ(verdict(ones, 3.0, false).status, VerdictStatus::secure);
  EXPECT_EQ(verdict(ones, 100.0, false).status, VerdictStatus::secure);
  EXPECT_EQ(verdict(uniform_reports(0.0, 0.0), 3.0, true).status,
            VerdictStatus::blinding_signature);
  const auto v = verdict(uniform_reports(0.73, 0.01), 3.0, false);
  EXPECT_EQ(v.status, VerdictStatus::secure);
  EXPECT_DOUBLE_EQ(v.min_c, 0.73);
  EXPECT_NEAR(analytic_c(PpsKey::from_index(0), 0.08, 0.0), 0.7268629, 1e-7);
  EXPECT_GT(0.73 - 3 * 0.01, 0.5);
}

TEST(Verdict, MarginAndMinimum) {
  EXPECT_EQ(verdict(uniform_reports(0.73, 0.1), 3.0, false).status, VerdictStatus::abort);
  auto reports = uniform_reports(0.9, 0.01);
  reports[5].c_value = 0.45;
  const auto v = verdict(reports, 3.0, false);
  EXPECT_EQ(v.status, VerdictStatus::abort);
  EXPECT_DOUBLE_EQ(v.min_c, 0.45);
  EXPECT_THROW(verdict(std::vector<ContextualityReport>{}, 3.0, false), std::invalid_argument);
}

TEST(ContextualityReport, StandardErrorScaling) {
  const PpsKey k = PpsKey::from_index(0);
  const auto r = contextuality_report(k, 1.15, 0.02);
  EXPECT_NEAR(r.ideal_wv, kIdeal, 1e-12);
  EXPECT_NEAR(r.c_value, 0.15 / (kIdeal - 1), 1e-12);
  EXPECT_NEAR(r.standard_error, 0.02 / (kIdeal - 1), 1e-12);
}

}  // namespace
}  // namespace wvqkd
