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

// End-to-end protocol: block simulation, sifting, PPS ensemble separation,
// coupling / weak-value / noise estimators, blinding detection and the
// security verdict. Error reconciliation and privacy amplification are out of
// scope; the transcript hands over the raw sifted keys and the verdict.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wvqkd/contextuality.hpp"
#include "wvqkd/noise.hpp"
#include "wvqkd/running_stats.hpp"
#include "wvqkd/trajectory.hpp"
#include "wvqkd/weak_values.hpp"

namespace wvqkd {

inline constexpr std::uint64_t kRecommendedBlockSize = 10'000;

struct ProtocolConfig {
  /// Raw key length 2N (photons sent).
  std::uint64_t block_size = 1'000'000;
  ChannelNoise noise;
  DetectorModel detector;
  /// When set, replaces the d derived from `detector` (lossless link).
  std::optional<double> dark_attenuation;
  WeakMeasurementConfig wm;
  EveModel eve;
  std::uint64_t seed = 1;
  /// Standard-error multiples required above the contextuality bound.
  double margin = 3.0;
  /// Bob blocks the path for a random half of the slots to calibrate dark counts.
  bool dark_calibration = false;
  /// Keep per-photon index lists of the sifted and disclosed rounds.
  bool keep_public_log = false;
  /// Worker threads; 0 = hardware concurrency. Does not affect results.
  unsigned threads = 0;

  void validate() const;
  DarkCountStats dark_stats() const;
  std::vector<std::string> warnings() const;
};

/// FNV-1a over a canonical text rendering of every result-affecting field.
std::string config_fingerprint(const ProtocolConfig& cfg);

/// Pointer statistics per (ensemble, projector) for cross-basis rounds and per
/// projector over every detected round.
struct PPSAccumulator {
  std::array<std::array<RunningStats, 4>, 8> conditioned{};
  std::array<RunningStats, 4> unconditioned{};

  const RunningStats& at(PpsKey k, ProjectorChoice p) const {
    return conditioned[static_cast<std::size_t>(k.index())][static_cast<std::size_t>(p.index())];
  }
  RunningStats& at(PpsKey k, ProjectorChoice p) {
    return conditioned[static_cast<std::size_t>(k.index())][static_cast<std::size_t>(p.index())];
  }
  std::uint64_t conditioned_count() const;
  std::uint64_t unconditioned_count() const;
  void merge(const PPSAccumulator& other);
};

struct KeyPair {
  std::uint64_t index = 0;
  std::uint8_t alice_bit = 0;
  std::uint8_t bob_bit = 0;
  ProjectorChoice projector;
  double pointer = 0.0;
};

/// A cross-basis detection after Alice disclosed her bit for it.
struct CrossBasisRecord {
  std::uint64_t index = 0;
  Bb84State pre = Bb84State::zero;
  Bb84State post = Bb84State::zero;
  ProjectorChoice projector;
  double pointer = 0.0;
};

struct SiftResult {
  std::vector<KeyPair> key;
  std::vector<CrossBasisRecord> cross;
};

/// Splits detected rounds by basis agreement using Alice's announced bases and
/// bits. Throws std::invalid_argument when the three streams differ in length.
SiftResult sift(std::span<const PhotonRecord> records, std::span<const Basis> alice_bases,
                std::span<const std::uint8_t> alice_bits);

/// Routes cross-basis rounds into their PPS ensemble and every detected round
/// into the unconditioned per-projector statistics.
PPSAccumulator separate_ensembles(const SiftResult& sifted);

struct Estimate {
  double value = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
};

struct ProbabilityEstimate {
  double value = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  double raw = std::numeric_limits<double>::quiet_NaN();
  bool clamped = false;
};

struct Estimates {
  double d = 0.0;
  Estimate g_plus;
  Estimate g_minus;
  /// mu / (mu + mu_perp) per (ensemble, projector); free of d.
  std::array<std::array<Estimate, 4>, 8> h_w{};
  /// Per ensemble group 1..4, (a) and (b) pooled.
  std::array<ProbabilityEstimate, 4> p_channel{};
  std::array<ProbabilityEstimate, 8> p_a{};
  std::array<ProbabilityEstimate, 8> p_b{};
  /// Mean group p_channel + d/2.
  ProbabilityEstimate qber;
  /// max - min of the group p_channel values.
  double p_channel_spread = 0.0;

  const Estimate& weak_value(PpsKey k, ProjectorChoice p) const {
    return h_w[static_cast<std::size_t>(k.index())][static_cast<std::size_t>(p.index())];
  }
  bool any_clamped() const;
};

/// Estimator chain with delta-method standard errors. Throws
/// InsufficientStatistics when a needed bucket has fewer than two samples and
/// DegenerateCoupling when mu + mu_perp <= 0 or d >= 1.
Estimates estimate(const PPSAccumulator& acc, double d);

/// One report per ensemble for its designated projector, using (1 - d) h_w.
std::vector<ContextualityReport> empirical_contextuality(const Estimates& est);

/// True when no designated weak value is significantly anomalous and the
/// H+/H- weak values of all ensembles match the expectation values for Bob's
/// outcome, both per value (|z| <= margin) and jointly
/// (sum z^2 / k <= 1 + margin sqrt(2/k)).
bool detect_blinding(const Estimates& est, double margin);

struct TranscriptCounts {
  std::uint64_t photons = 0;
  std::uint64_t detected = 0;
  std::uint64_t sifted = 0;
  std::uint64_t cross_basis = 0;
  std::uint64_t dark_events = 0;
  std::uint64_t key_mismatches = 0;
  std::uint64_t calibration_slots = 0;
  std::uint64_t calibration_clicks = 0;
};

struct ProtocolTranscript {
  ProtocolConfig config;
  std::string config_hash;
  DarkCountStats dark;
  TranscriptCounts counts;

  std::vector<std::uint8_t> sifted_key_alice;
  std::vector<std::uint8_t> sifted_key_bob;

  /// Public log (only with keep_public_log): indices of sifted rounds and of
  /// rounds whose bit Alice disclosed, with the disclosed bits.
  std::vector<std::uint64_t> sifted_indices;
  std::vector<std::uint64_t> disclosed_indices;
  std::vector<std::uint8_t> disclosed_bits;

  PPSAccumulator accumulator;
  std::optional<Estimates> estimates;
  std::vector<ContextualityReport> contextuality;
  bool blinding_detected = false;
  SecurityVerdict verdict;
  /// Dark-count probability measured in blocked slots, when enabled.
  std::optional<double> calibrated_p_dark;
  std::vector<std::string> warnings;
};

/// Records of one kChunkSize slice of the block, exactly as run_protocol sees
/// them (calibration slots omitted).
std::vector<PhotonRecord> simulate_chunk(const ProtocolConfig& cfg, std::uint64_t chunk);

/// Throws DeadChannel when nothing is detected.
ProtocolTranscript run_protocol(const ProtocolConfig& cfg);

}  // namespace wvqkd
