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

// Run configuration, machine-readable outputs, parameter sweeps and the
// self-validation suite behind the command-line tool. Column orders of every
// CSV produced here are part of the interface (see docs/formats.md).

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wvqkd/protocol.hpp"

namespace wvqkd {

inline constexpr std::uint64_t kDefaultMaxSweepCells = 1'000'000;

struct SweepAxis {
  /// One of p_channel, d, g_over_sigma, photons.
  std::string name;
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  std::uint64_t points() const;
  double value(std::uint64_t i) const { return start + static_cast<double>(i) * step; }
};

struct SweepSpec {
  std::vector<SweepAxis> axes;
  std::uint64_t max_cells = kDefaultMaxSweepCells;
  /// Photons per cell when no photons axis is given; 0 = analytic only.
  std::uint64_t photons = 0;

  std::uint64_t cells() const;
};

struct RunConfig {
  ProtocolConfig protocol;
  std::string out_dir = ".";
  bool emit_key = false;
  /// Number of leading per-photon records to dump as CSV (0 = none).
  std::uint64_t dump_records = 0;
  std::optional<SweepSpec> sweep;
};

/// Parses the JSON run configuration. Unknown keys, wrong types and invalid
/// probabilities raise ConfigError.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);

/// Protocol part of the configuration in the same schema parse_run_config reads.
nlohmann::json protocol_config_to_json(const ProtocolConfig& cfg);

/// Summary transcript: config, fingerprint, counts, estimates, contextuality,
/// verdict. Key bits are never included; the public log is, when kept.
nlohmann::json transcript_to_json(const ProtocolTranscript& tr);

/// ensemble,pre,post,projector,weak_value,anomalous,contextuality
std::string tables_csv(const ChannelNoise& noise, double d);

/// ensemble,projector,count,mean,se,h_w,h_w_se,contextuality,contextuality_se
std::string statistics_csv(const ProtocolTranscript& tr);

/// index,alice_basis,alice_bit,eve_basis,pauli_a,projector,pointer,pauli_b,
/// bob_basis,bob_outcome,dark,detected
std::string records_csv(std::span<const PhotonRecord> records);

/// Two lines, "alice <bits>" and "bob <bits>".
std::string sifted_key_text(const ProtocolTranscript& tr);

/// Writes one CSV row per grid cell:
/// p_channel,d,g_over_sigma,photons,analytic_c,secure_region,empirical_min_c,empirical_se,verdict
/// Throws ConfigError when the grid exceeds max_cells and allow_large is false.
void run_sweep(const SweepSpec& spec, const ProtocolConfig& base, std::ostream& out,
               bool allow_large = false);

/// 0 secure, 2 abort, 3 blinding signature.
int exit_code_for(VerdictStatus s);

/// Exact means g H_w for every bucket, with `per_bucket` samples of variance
/// sigma^2 each, as if produced by a noise-free estimator run.
PPSAccumulator analytic_accumulator(const ChannelNoise& noise, double d, double g, double sigma,
                                    std::uint64_t per_bucket);

/// Oracle-equivalence, threshold, closure and short convergence checks.
/// Prints one [PASS]/[FAIL] line per check; returns true when all pass.
bool run_validation(std::ostream& log, unsigned threads = 0);

}  // namespace wvqkd
