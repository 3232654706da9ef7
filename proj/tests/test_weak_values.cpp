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

#include <cmath>
#include <set>

#include "wvqkd/error.hpp"
#include "wvqkd/quantum.hpp"
#include "wvqkd/weak_values.hpp"

namespace wvqkd {
namespace {

const ProjectorChoice kHp{Sign::plus, false};
const ProjectorChoice kHm{Sign::minus, false};
const ProjectorChoice kHpPerp{Sign::plus, true};

PpsKey key(const char* label) { return *PpsKey::parse(label); }

TEST(PpsKey, LabelsAndStates) {
  EXPECT_EQ(key("1a").pre(), Bb84State::zero);
  EXPECT_EQ(key("1a").post(), Bb84State::plus);
  EXPECT_EQ(key("1b").pre(), Bb84State::plus);
  EXPECT_EQ(key("4b").pre(), Bb84State::minus);
  EXPECT_EQ(key("4b").post(), Bb84State::one);
  EXPECT_FALSE(PpsKey::parse("5a").has_value());
  EXPECT_FALSE(PpsKey::from_states(Bb84State::zero, Bb84State::one).has_value());
  std::set<std::string> labels;
  for (PpsKey k : kAllEnsembles) {
    labels.insert(std::string(k.label()));
    EXPECT_EQ(PpsKey::from_states(k.pre(), k.post()), k);
    EXPECT_NE(basis_of(k.pre()), basis_of(k.post()));
  }
  EXPECT_EQ(labels.size(), 8u);
}

TEST(PpsWeakValue, Examples) {
  EXPECT_NEAR(pps_weak_value(key("1a"), kHp, {}, 0.0), 1.2071068, 1e-7);
  EXPECT_NEAR(pps_weak_value(key("4a"), kHp, {}, 0.0), -0.2071068, 1e-7);
  EXPECT_NEAR(pps_weak_value(key("1a"), kHp, {0.05, 0.03}, 0.02), 0.98 * 1.1505382, 1e-7);
  EXPECT_NEAR(pps_weak_value(key("1a"), kHp, {0.05, 0.03}, 0.02), 1.1275274, 1e-7);
  EXPECT_NEAR(pps_weak_value(key("1a"), kHm, {0.05, 0.03}, 0.0), 0.5141421, 1e-7);
}

TEST(PpsWeakValue, RejectsBadParameters) {
  EXPECT_THROW(pps_weak_value(key("1a"), kHp, {0.6, 0.0}, 0.0), DomainError);
  EXPECT_THROW(pps_weak_value(key("1a"), kHp, {0.0, 0.0}, 1.5), DomainError);
}

TEST(PpsWeakValue, AnomalyCensus) {
  for (PpsKey k : kAllEnsembles) {
    const double hp = pps_weak_value(k, kHp, {}, 0.0);
    const double hm = pps_weak_value(k, kHm, {}, 0.0);
    EXPECT_NE(is_anomalous(hp), is_anomalous(hm)) << k.label();
    const ProjectorChoice des = k.designated_projector();
    for (ProjectorChoice p : kAllProjectors) {
      const bool expected = p == des || p == des.partner();
      EXPECT_EQ(is_anomalous(pps_weak_value(k, p, {}, 0.0)), expected)
          << k.label() << ' ' << to_string(p);
    }
  }
}

TEST(PpsWeakValue, TimeReversalStructure) {
  const ChannelNoise n{0.07, 0.02};
  const ChannelNoise swapped{0.02, 0.07};
  for (int g = 0; g < 4; ++g) {
    const PpsKey a = PpsKey::from_index(2 * g);
    const PpsKey b = PpsKey::from_index(2 * g + 1);
    ASSERT_EQ(a.designated_projector(), b.designated_projector());
    const ProjectorChoice des = a.designated_projector();
    const ProjectorChoice other{des.sign == Sign::plus ? Sign::minus : Sign::plus, false};
    EXPECT_NEAR(pps_weak_value(a, des, n, 0.0), pps_weak_value(b, des, n, 0.0), 1e-15);
    EXPECT_NEAR(pps_weak_value(a, other, n, 0.0), pps_weak_value(b, other, swapped, 0.0), 1e-15);
    EXPECT_GT(std::abs(pps_weak_value(a, other, n, 0.0) - pps_weak_value(b, other, n, 0.0)),
              1e-3);
  }
}

TEST(PpsWeakValue, ComplementSum) {
  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; j <= 10; ++j) {
      for (double d : {0.0, 0.02, 0.3, 1.0}) {
        const ChannelNoise n{0.05 * i, 0.05 * j};
        for (PpsKey k : kAllEnsembles) {
          for (ProjectorChoice p : {kHp, kHm}) {
            EXPECT_NEAR(pps_weak_value(k, p, n, d) + pps_weak_value(k, p.partner(), n, d), 1 - d,
                        1e-12);
          }
        }
      }
    }
  }
}

TEST(PpsWeakValue, TableLayout) {
  const auto rows = weak_value_table({0.05, 0.03}, 0.0);
  ASSERT_EQ(rows.size(), 32u);
  EXPECT_EQ(rows[0].ensemble, key("1a"));
  EXPECT_EQ(rows[0].projector, kHp);
  EXPECT_EQ(rows[31].ensemble, key("4b"));
  for (const auto& r : rows) {
    EXPECT_EQ(r.anomalous, is_anomalous(r.value));
    EXPECT_DOUBLE_EQ(r.value, pps_weak_value(r.ensemble, r.projector, {0.05, 0.03}, 0.0));
  }
}

TEST(ExpectedPointerMean, Examples) {
  EXPECT_NEAR(expected_pointer_mean(0.1, 1.2071068), 0.12071068, 1e-15);
  EXPECT_EQ(expected_pointer_mean(0.3, 0.0), 0.0);
  EXPECT_NEAR(expected_pointer_mean(0.1, -0.2071068), -0.02071068, 1e-15);
  EXPECT_THROW(expected_pointer_mean(0.0, 1.0), DomainError);
}

TEST(BlindingWeakValue, Examples) {
  EXPECT_NEAR(blinding_weak_value(Bb84State::zero, kHp), 0.8535534, 1e-7);
  EXPECT_NEAR(blinding_weak_value(Bb84State::minus, kHm), 0.1464466, 1e-7);
  EXPECT_NEAR(blinding_weak_value(Bb84State::plus, kHpPerp), 0.1464466, 1e-7);
}

TEST(BlindingWeakValue, EqualsBornProbability) {
  for (Bb84State s : {Bb84State::zero, Bb84State::one, Bb84State::plus, Bb84State::minus}) {
    for (ProjectorChoice p : kAllProjectors) {
      const double v = blinding_weak_value(s, p);
      EXPECT_NEAR(v, born_probability(DensityMatrix::from_pure(to_pure(s)), h_projector(p)),
                  1e-12);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

}  // namespace
}  // namespace wvqkd
