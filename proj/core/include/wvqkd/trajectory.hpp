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

// Photon-by-photon quantum trajectories: exact Gaussian-pointer weak
// measurement, Pauli unraveling of depolarizing noise, dark-count
// replacement, intercept-resend and detector blinding, Born-rule
// post-selection.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "wvqkd/noise.hpp"
#include "wvqkd/quantum.hpp"
#include "wvqkd/rng.hpp"

namespace wvqkd {

struct WeakMeasurementConfig {
  double g = 0.1;
  double sigma = 1.0;

  double weakness() const { return g / sigma; }
  void validate() const;
};

enum class EveKind : std::uint8_t { none, intercept_resend, intercept_resend_blinding };

std::string_view to_string(EveKind k);
std::optional<EveKind> parse_eve_kind(std::string_view s);

struct EveModel {
  EveKind kind = EveKind::none;

  bool intercepts() const { return kind != EveKind::none; }
  bool blinds() const { return kind == EveKind::intercept_resend_blinding; }
};

enum class DarkFlag : std::uint8_t {
  none,
  dark_replaced_signal,
  // Simultaneous clicks are folded into d and p_b and never sampled on their own.
  double_click,
};

struct PhotonRecord {
  std::uint64_t index = 0;
  Basis alice_basis = Basis::Z;
  std::uint8_t alice_bit = 0;
  std::optional<Basis> eve_basis;
  Pauli pauli_a = Pauli::I;
  Pauli pauli_b = Pauli::I;
  ProjectorChoice projector;
  /// Present iff detected.
  std::optional<double> pointer;
  Basis bob_basis = Basis::Z;
  std::uint8_t bob_outcome = 0;
  DarkFlag dark = DarkFlag::none;
  bool detected = false;
};

struct WeakInteraction {
  double pointer;
  PureState post_state;
};

/// Samples the pointer from |alpha|^2 N(0, s^2) + |beta|^2 N(g, s^2), beta
/// being the amplitude on the projector's +1 eigenvector, and returns the
/// conditioned qubit state (alpha e^{-x^2/4s^2}, beta e^{-(x-g)^2/4s^2}).
WeakInteraction weak_interact(const PureState& state, const Effect& projector,
                              const WeakMeasurementConfig& cfg, Rng& rng);

/// Same, with the projector given by its +1 eigenvector.
WeakInteraction weak_interact_eigenvector(const PureState& state, const PureState& eigenvector,
                                          const WeakMeasurementConfig& cfg, Rng& rng);

/// 1/4 [1 - exp(-g^2 / 8 sigma^2)]
double collapse_probability(const WeakMeasurementConfig& cfg);

/// Applies I with probability 1 - 3p/2 and each of X, Y, Z with p/2.
Pauli sample_pauli(double p, Rng& rng);

/// Born-rule projective measurement in `basis`; returns the bit.
int measure(const PureState& state, Basis basis, Rng& rng);

/// One protocol round: prepare, Eve, p_a noise, random H projector weakly
/// measured, p_b noise, random post-selection basis. A detected round is
/// replaced by a dark event (pointer ~ N(0, sigma^2), uniform outcome) with
/// probability dark.d. Under blinding, Bob's detectors only fire when his
/// basis equals Eve's.
PhotonRecord simulate_photon(Basis alice_basis, int alice_bit, const EveModel& eve,
                             const ChannelNoise& noise, const DarkCountStats& dark,
                             const WeakMeasurementConfig& cfg, Rng& rng);

/// Same-basis prepare / weak-measure / re-measure trials, tallied per
/// (prepared BB84 state, projector).
struct BackActionTally {
  std::array<std::array<std::uint64_t, 4>, 4> rounds{};
  std::array<std::array<std::uint64_t, 4>, 4> flips{};

  std::uint64_t total_rounds() const;
  std::uint64_t total_flips() const;
  double flip_rate() const;
  void merge(const BackActionTally& other);
};

BackActionTally run_back_action_trials(const WeakMeasurementConfig& cfg, std::uint64_t rounds,
                                       std::uint64_t seed, unsigned threads = 0);

/// Average qubit state after weakly measuring `projector` on `state`, with
/// no post-selection (sample mean of conditioned pure-state projectors).
Operator2 average_post_measurement_state(const PureState& state, ProjectorChoice projector,
                                         const WeakMeasurementConfig& cfg, std::uint64_t rounds,
                                         std::uint64_t seed);

}  // namespace wvqkd
