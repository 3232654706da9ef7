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

#include "wvqkd/trajectory.hpp"

#include <cmath>

#include "wvqkd/error.hpp"
#include "wvqkd/parallel.hpp"

namespace wvqkd {

namespace {

const std::array<PureState, 4>& eigenvectors() {
  static const std::array<PureState, 4> table = {
      h_eigenvector(kAllProjectors[0]), h_eigenvector(kAllProjectors[1]),
      h_eigenvector(kAllProjectors[2]), h_eigenvector(kAllProjectors[3])};
  return table;
}

PureState apply_pauli(const PureState& s, Pauli p) {
  return p == Pauli::I ? s : s.apply(pauli_matrix(p));
}

}  // namespace

void WeakMeasurementConfig::validate() const {
  if (!(g >= 0.0) || !std::isfinite(g)) throw DomainError("coupling g must be >= 0");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("pointer sigma must be > 0");
}

std::string_view to_string(EveKind k) {
  switch (k) {
    case EveKind::none: return "none";
    case EveKind::intercept_resend: return "intercept_resend";
    default: return "intercept_resend_blinding";
  }
}

std::optional<EveKind> parse_eve_kind(std::string_view s) {
  if (s == "none") return EveKind::none;
  if (s == "intercept_resend") return EveKind::intercept_resend;
  if (s == "intercept_resend_blinding") return EveKind::intercept_resend_blinding;
  return std::nullopt;
}

WeakInteraction weak_interact_eigenvector(const PureState& state, const PureState& eigenvector,
                                          const WeakMeasurementConfig& cfg, Rng& rng) {
  const PureState& h = eigenvector;
  const PureState hp = h.orthogonal();
  const Complex beta = h.inner(state);
  const Complex alpha = hp.inner(state);

  const bool shifted = rng.uniform() < std::norm(beta);
  const double x = rng.gaussian(shifted ? cfg.g : 0.0, cfg.sigma);

  // Ratio of the two Gaussian envelopes, applied to whichever branch is
  // smaller so nothing overflows.
  const double e = (cfg.g * cfg.g - 2.0 * x * cfg.g) / (4.0 * cfg.sigma * cfg.sigma);
  Complex a = alpha;
  Complex b = beta;
  if (e >= 0.0) {
    b *= std::exp(-e);
  } else {
    a *= std::exp(e);
  }
  const PureState post =
      PureState::normalized(a * hp.alpha() + b * h.alpha(), a * hp.beta() + b * h.beta());
  return {x, post};
}

WeakInteraction weak_interact(const PureState& state, const Effect& projector,
                              const WeakMeasurementConfig& cfg, Rng& rng) {
  const auto ev = projector.op().hermitian_eigenvalues();
  if (std::abs(ev[0]) > 1e-9 || std::abs(ev[1] - 1.0) > 1e-9) {
    throw DomainError("weak_interact: effect is not a rank-1 projector");
  }
  return weak_interact_eigenvector(state, rank_one_eigenvector(projector), cfg, rng);
}

double collapse_probability(const WeakMeasurementConfig& cfg) {
  cfg.validate();
  const double k = cfg.g * cfg.g / (8.0 * cfg.sigma * cfg.sigma);
  return -0.25 * std::expm1(-k);
}

Pauli sample_pauli(double p, Rng& rng) {
  const double u = rng.uniform();
  if (!(u < 1.5 * p)) return Pauli::I;
  const int k = static_cast<int>(u / (0.5 * p));
  return k == 0 ? Pauli::X : (k == 1 ? Pauli::Y : Pauli::Z);
}

int measure(const PureState& state, Basis basis, Rng& rng) {
  const double p0 = std::norm(PureState::basis_state(basis, 0).inner(state));
  return rng.uniform() < p0 ? 0 : 1;
}

PhotonRecord simulate_photon(Basis alice_basis, int alice_bit, const EveModel& eve,
                             const ChannelNoise& noise, const DarkCountStats& dark,
                             const WeakMeasurementConfig& cfg, Rng& rng) {
  PhotonRecord rec;
  rec.alice_basis = alice_basis;
  rec.alice_bit = static_cast<std::uint8_t>(alice_bit);

  PureState psi = PureState::basis_state(alice_basis, alice_bit);

  if (eve.intercepts()) {
    const Basis eb = rng.coin() == 0 ? Basis::Z : Basis::X;
    rec.eve_basis = eb;
    psi = PureState::basis_state(eb, measure(psi, eb, rng));
  }

  rec.pauli_a = sample_pauli(noise.p_a, rng);
  psi = apply_pauli(psi, rec.pauli_a);

  rec.projector = ProjectorChoice::from_index(rng.uniform_pow2(4));
  const auto wm = weak_interact_eigenvector(
      psi, eigenvectors()[static_cast<std::size_t>(rec.projector.index())], cfg, rng);
  psi = wm.post_state;

  rec.pauli_b = sample_pauli(noise.p_b, rng);
  psi = apply_pauli(psi, rec.pauli_b);

  rec.bob_basis = rng.coin() == 0 ? Basis::Z : Basis::X;
  rec.bob_outcome = static_cast<std::uint8_t>(measure(psi, rec.bob_basis, rng));

  rec.detected = dark.p_signal >= 1.0 || rng.bernoulli(dark.p_signal);
  double pointer = wm.pointer;
  if (rec.detected && dark.d > 0.0 && rng.bernoulli(dark.d)) {
    rec.dark = DarkFlag::dark_replaced_signal;
    pointer = rng.gaussian(0.0, cfg.sigma);
    rec.bob_outcome = static_cast<std::uint8_t>(rng.coin());
  }
  if (eve.blinds() && rec.bob_basis != *rec.eve_basis) rec.detected = false;
  if (rec.detected) rec.pointer = pointer;
  return rec;
}

// ---------------------------------------------------------------------------

std::uint64_t BackActionTally::total_rounds() const {
  std::uint64_t n = 0;
  for (const auto& row : rounds)
    for (auto v : row) n += v;
  return n;
}

std::uint64_t BackActionTally::total_flips() const {
  std::uint64_t n = 0;
  for (const auto& row : flips)
    for (auto v : row) n += v;
  return n;
}

double BackActionTally::flip_rate() const {
  const auto n = total_rounds();
  return n == 0 ? 0.0 : static_cast<double>(total_flips()) / static_cast<double>(n);
}

void BackActionTally::merge(const BackActionTally& other) {
  for (std::size_t s = 0; s < 4; ++s) {
    for (std::size_t p = 0; p < 4; ++p) {
      rounds[s][p] += other.rounds[s][p];
      flips[s][p] += other.flips[s][p];
    }
  }
}

BackActionTally run_back_action_trials(const WeakMeasurementConfig& cfg, std::uint64_t rounds,
                                       std::uint64_t seed, unsigned threads) {
  cfg.validate();
  auto parts = for_each_chunk<BackActionTally>(
      rounds, threads, [&](std::uint64_t chunk, std::uint64_t begin, std::uint64_t end) {
        Rng rng(stream_seed(seed, chunk));
        BackActionTally t;
        for (std::uint64_t i = begin; i < end; ++i) {
          const int s = rng.uniform_pow2(4);
          const int p = rng.uniform_pow2(4);
          const Basis basis = s < 2 ? Basis::Z : Basis::X;
          const int bit = s % 2;
          const auto wm = weak_interact_eigenvector(PureState::basis_state(basis, bit),
                                                    eigenvectors()[p], cfg, rng);
          ++t.rounds[s][p];
          if (measure(wm.post_state, basis, rng) != bit) ++t.flips[s][p];
        }
        return t;
      });
  BackActionTally total;
  for (const auto& t : parts) total.merge(t);
  return total;
}

Operator2 average_post_measurement_state(const PureState& state, ProjectorChoice projector,
                                         const WeakMeasurementConfig& cfg, std::uint64_t rounds,
                                         std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  const PureState& h = eigenvectors()[static_cast<std::size_t>(projector.index())];
  Operator2 sum;
  for (std::uint64_t i = 0; i < rounds; ++i) {
    sum += weak_interact_eigenvector(state, h, cfg, rng).post_state.projector();
  }
  return sum * Complex(1.0 / static_cast<double>(rounds));
}

}  // namespace wvqkd
