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

#include "wvqkd/weak_values.hpp"

#include <numbers>

#include "wvqkd/error.hpp"

namespace wvqkd {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

struct EnsembleRow {
  Bb84State pre;
  Bb84State post;
  const char* label;
  // Which of H+ / H- carries the anomalous term (1 - p_channel)/sqrt2 and
  // the signs in front of each term.
  Sign anomalous;
  double anomalous_sign;
  double asymmetric_sign;  // sign of (p_a - p_b)/sqrt2 on the other projector
};

constexpr std::array<EnsembleRow, 8> kRows = {{
    {Bb84State::zero, Bb84State::plus, "1a", Sign::plus, +1.0, +1.0},
    {Bb84State::plus, Bb84State::zero, "1b", Sign::plus, +1.0, -1.0},
    {Bb84State::one, Bb84State::plus, "2a", Sign::minus, +1.0, +1.0},
    {Bb84State::plus, Bb84State::one, "2b", Sign::minus, +1.0, -1.0},
    {Bb84State::zero, Bb84State::minus, "3a", Sign::minus, -1.0, -1.0},
    {Bb84State::minus, Bb84State::zero, "3b", Sign::minus, -1.0, +1.0},
    {Bb84State::one, Bb84State::minus, "4a", Sign::plus, -1.0, -1.0},
    {Bb84State::minus, Bb84State::one, "4b", Sign::plus, -1.0, +1.0},
}};

const EnsembleRow& row(PpsKey k) { return kRows[static_cast<std::size_t>(k.index())]; }

}  // namespace

std::string_view to_string(Bb84State s) {
  switch (s) {
    case Bb84State::zero: return "0";
    case Bb84State::one: return "1";
    case Bb84State::plus: return "+";
    default: return "-";
  }
}

std::optional<PpsKey> PpsKey::from_states(Bb84State pre, Bb84State post) {
  for (int i = 0; i < 8; ++i) {
    if (kRows[i].pre == pre && kRows[i].post == post) return PpsKey::from_index(i);
  }
  return std::nullopt;
}

std::optional<PpsKey> PpsKey::parse(std::string_view label) {
  for (int i = 0; i < 8; ++i) {
    if (label == kRows[i].label) return PpsKey::from_index(i);
  }
  return std::nullopt;
}

Bb84State PpsKey::pre() const { return row(*this).pre; }
Bb84State PpsKey::post() const { return row(*this).post; }
std::string_view PpsKey::label() const { return row(*this).label; }

ProjectorChoice PpsKey::designated_projector() const { return {row(*this).anomalous, false}; }

double pps_weak_value(PpsKey key, ProjectorChoice proj, const ChannelNoise& noise, double d) {
  noise.validate();
  if (!(d >= 0.0 && d <= 1.0)) throw DomainError("dark attenuation d must lie in [0, 1]");
  const EnsembleRow& r = row(key);
  double h;
  if (proj.sign == r.anomalous) {
    h = 0.5 + r.anomalous_sign * (1.0 - noise.p_channel()) * kInvSqrt2;
  } else {
    h = 0.5 + r.asymmetric_sign * (noise.p_a - noise.p_b) * kInvSqrt2;
  }
  if (proj.complement) h = 1.0 - h;
  return (1.0 - d) * h;
}

std::vector<WeakValueReport> weak_value_table(const ChannelNoise& noise, double d) {
  std::vector<WeakValueReport> out;
  out.reserve(32);
  for (PpsKey k : kAllEnsembles) {
    for (ProjectorChoice p : kAllProjectors) {
      const double v = pps_weak_value(k, p, noise, d);
      out.push_back({k, p, v, is_anomalous(v)});
    }
  }
  return out;
}

double expected_pointer_mean(double g, double weak_value) {
  if (!(g > 0.0)) throw DomainError("coupling strength g must be positive");
  return g * weak_value;
}

double blinding_weak_value(Bb84State bob_outcome, ProjectorChoice proj) {
  constexpr double hi = 0.5 + 0.5 * kInvSqrt2;
  constexpr double lo = 0.5 - 0.5 * kInvSqrt2;
  double h;
  switch (bob_outcome) {
    case Bb84State::zero: h = proj.sign == Sign::plus ? hi : lo; break;
    case Bb84State::one: h = proj.sign == Sign::plus ? lo : hi; break;
    case Bb84State::plus: h = hi; break;
    default: h = lo; break;
  }
  return proj.complement ? 1.0 - h : h;
}

}  // namespace wvqkd
