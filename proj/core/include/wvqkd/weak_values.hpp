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

// Closed-form weak values of the H projectors for the eight cross-basis
// pre/post-selected (PPS) ensembles, with channel noise and dark-count
// attenuation, plus the expectation-value tables seen under detector blinding.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "wvqkd/noise.hpp"
#include "wvqkd/quantum.hpp"

namespace wvqkd {

/// The four BB84 encoding states.
enum class Bb84State : std::uint8_t { zero, one, plus, minus };

inline Basis basis_of(Bb84State s) {
  return (s == Bb84State::zero || s == Bb84State::one) ? Basis::Z : Basis::X;
}
inline int bit_of(Bb84State s) { return (s == Bb84State::one || s == Bb84State::minus) ? 1 : 0; }
inline Bb84State bb84_state(Basis b, int bit) {
  if (b == Basis::Z) return bit == 0 ? Bb84State::zero : Bb84State::one;
  return bit == 0 ? Bb84State::plus : Bb84State::minus;
}
inline PureState to_pure(Bb84State s) { return PureState::basis_state(basis_of(s), bit_of(s)); }

/// "0", "1", "+", "-".
std::string_view to_string(Bb84State s);

/// Label of one of the eight PPS ensembles 1a..4b. Ensembles (a) and (b)
/// share a state pair with the time order reversed.
class PpsKey {
 public:
  enum class Id : std::uint8_t { k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b };

  constexpr PpsKey() = default;
  constexpr explicit PpsKey(Id id) : id_(id) {}

  static constexpr PpsKey from_index(int i) { return PpsKey(static_cast<Id>(i)); }
  /// Cross-basis (pre, post) pair to its ensemble; nullopt for same-basis pairs.
  static std::optional<PpsKey> from_states(Bb84State pre, Bb84State post);
  static std::optional<PpsKey> parse(std::string_view label);

  constexpr Id id() const { return id_; }
  constexpr int index() const { return static_cast<int>(id_); }
  /// 1..4
  constexpr int group() const { return index() / 2 + 1; }
  constexpr bool time_reversed() const { return index() % 2 == 1; }

  Bb84State pre() const;
  Bb84State post() const;
  std::string_view label() const;

  /// The non-complement projector whose weak value is anomalous at zero noise.
  ProjectorChoice designated_projector() const;

  friend constexpr bool operator==(PpsKey, PpsKey) = default;

 private:
  Id id_ = Id::k1a;
};

inline constexpr std::array<PpsKey, 8> kAllEnsembles = {
    PpsKey::from_index(0), PpsKey::from_index(1), PpsKey::from_index(2), PpsKey::from_index(3),
    PpsKey::from_index(4), PpsKey::from_index(5), PpsKey::from_index(6), PpsKey::from_index(7)};

struct WeakValueReport {
  PpsKey ensemble;
  ProjectorChoice projector;
  double value = 0.0;
  bool anomalous = false;
};

inline bool is_anomalous(double weak_value) { return weak_value < 0.0 || weak_value > 1.0; }

/// Observed weak value (1 - d) H_w(p_a, p_b). Complement projectors use
/// (1 - d)(1 - H_w(p_a, p_b)), i.e. every projector is attenuated uniformly.
double pps_weak_value(PpsKey key, ProjectorChoice proj, const ChannelNoise& noise, double d);

/// All 8 x 4 weak values, ensemble-major, projector order H+, H-, H+perp, H-perp.
std::vector<WeakValueReport> weak_value_table(const ChannelNoise& noise, double d);

/// mu = g H_w. Throws DomainError unless g > 0.
double expected_pointer_mean(double g, double weak_value);

/// Weak value seen when pre- and post-selection coincide on Bob's outcome,
/// i.e. the expectation <outcome|P|outcome>.
double blinding_weak_value(Bb84State bob_outcome, ProjectorChoice proj);

}  // namespace wvqkd
