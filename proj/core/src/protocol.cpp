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

#include "wvqkd/protocol.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "wvqkd/error.hpp"
#include "wvqkd/parallel.hpp"

namespace wvqkd {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

ProbabilityEstimate make_probability(double raw, double se) {
  ProbabilityEstimate p;
  p.raw = raw;
  p.se = se;
  p.value = std::clamp(raw, 0.0, 1.0);
  p.clamped = !(raw >= 0.0 && raw <= 1.0);
  return p;
}

void require_samples(const RunningStats& s, const char* what) {
  if (s.count() < 2) {
    throw InsufficientStatistics(std::string("insufficient statistics: ") + what);
  }
}

/// a / (a + b) with its delta-method standard error.
Estimate ratio_estimate(const RunningStats& a, const RunningStats& b) {
  const double sum = a.mean() + b.mean();
  if (!(sum > 0.0)) {
    throw DegenerateCoupling("degenerate coupling estimate: mu + mu_perp <= 0");
  }
  const double sa = a.standard_error();
  const double sb = b.standard_error();
  Estimate e;
  e.value = a.mean() / sum;
  e.se = std::hypot(b.mean() * sa, a.mean() * sb) / (sum * sum);
  return e;
}

// Inversion coefficients for one ensemble: with S = H+ + H- and D = H+ - H-,
//   sum-side probability  = sum_offset + sum_sign * S / sqrt2
//   diff-side probability = 1/2        + diff_sign * D / sqrt2
// For (a) ensembles the sum side is p_b, for (b) ensembles it is p_a.
struct Inversion {
  double sum_offset;
  double sum_sign;
  double diff_sign;
};

Inversion inversion_for(PpsKey k) {
  const int g = k.group();
  const bool low = g <= 2;
  return {low ? (1.0 + kSqrt2) / 2.0 : (1.0 - kSqrt2) / 2.0, low ? -1.0 : 1.0,
          (g == 1 || g == 3) ? -1.0 : 1.0};
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct ChunkResult {
  PPSAccumulator acc;
  TranscriptCounts counts;
  std::vector<std::uint8_t> key_alice;
  std::vector<std::uint8_t> key_bob;
  std::vector<std::uint64_t> sifted_indices;
  std::vector<std::uint64_t> disclosed_indices;
  std::vector<std::uint8_t> disclosed_bits;
};

struct ChunkSimulation {
  std::vector<PhotonRecord> records;
  std::uint64_t calibration_slots = 0;
  std::uint64_t calibration_clicks = 0;
};

ChunkSimulation simulate_chunk_impl(const ProtocolConfig& cfg, const DarkCountStats& dark,
                                    std::uint64_t chunk) {
  const std::uint64_t begin = chunk * kChunkSize;
  const std::uint64_t end = std::min(cfg.block_size, begin + kChunkSize);
  ChunkSimulation out;
  if (begin >= end) return out;
  out.records.reserve(end - begin);
  Rng rng(stream_seed(cfg.seed, chunk));
  for (std::uint64_t i = begin; i < end; ++i) {
    if (cfg.dark_calibration && rng.coin() == 1) {
      ++out.calibration_slots;
      if (rng.bernoulli(dark.p_dark)) ++out.calibration_clicks;
      continue;
    }
    const Basis basis = rng.coin() == 0 ? Basis::Z : Basis::X;
    const int bit = rng.coin();
    PhotonRecord r = simulate_photon(basis, bit, cfg.eve, cfg.noise, dark, cfg.wm, rng);
    r.index = i;
    out.records.push_back(r);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void ProtocolConfig::validate() const {
  if (block_size == 0) throw DomainError("block size must be positive");
  noise.validate();
  detector.validate();
  if (dark_attenuation && !(*dark_attenuation >= 0.0 && *dark_attenuation <= 1.0)) {
    throw DomainError("dark attenuation must lie in [0, 1]");
  }
  wm.validate();
  if (!(wm.g > 0.0)) throw DomainError("coupling g must be positive for a protocol run");
  if (!(margin >= 0.0) || !std::isfinite(margin)) throw DomainError("margin must be >= 0");
}

DarkCountStats ProtocolConfig::dark_stats() const {
  return dark_attenuation ? dark_params_with_attenuation(*dark_attenuation) : dark_params(detector);
}

std::vector<std::string> ProtocolConfig::warnings() const {
  std::vector<std::string> w;
  if (block_size < kRecommendedBlockSize) {
    w.push_back("block size below 10^4; estimators may be unstable");
  }
  if (wm.sigma > 0.0 && wm.weakness() > 0.5) {
    w.push_back("g/sigma above 0.5; finite-coupling bias in weak values is no longer negligible");
  }
  return w;
}

std::string config_fingerprint(const ProtocolConfig& cfg) {
  char buf[512];
  const auto& d = cfg.detector;
  std::snprintf(buf, sizeof(buf),
                "block=%" PRIu64 ";pa=%.17g;pb=%.17g;rd1=%.17g;rd2=%.17g;t=%.17g;eta=%.17g;"
                "kappa=%.17g;l=%.17g;c=%.17g;datt=%s%.17g;g=%.17g;sigma=%.17g;eve=%d;seed=%" PRIu64
                ";margin=%.17g;cal=%d",
                cfg.block_size, cfg.noise.p_a, cfg.noise.p_b, d.r_d1, d.r_d2, d.t, d.eta, d.kappa,
                d.l, d.c, cfg.dark_attenuation ? "" : "none", cfg.dark_attenuation.value_or(0.0),
                cfg.wm.g, cfg.wm.sigma, static_cast<int>(cfg.eve.kind), cfg.seed, cfg.margin,
                cfg.dark_calibration ? 1 : 0);
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016" PRIx64, fnv1a(buf));
  return hex;
}

// ---------------------------------------------------------------------------
// Accumulators

std::uint64_t PPSAccumulator::conditioned_count() const {
  std::uint64_t n = 0;
  for (const auto& row : conditioned)
    for (const auto& s : row) n += s.count();
  return n;
}

std::uint64_t PPSAccumulator::unconditioned_count() const {
  std::uint64_t n = 0;
  for (const auto& s : unconditioned) n += s.count();
  return n;
}

void PPSAccumulator::merge(const PPSAccumulator& other) {
  for (std::size_t e = 0; e < 8; ++e)
    for (std::size_t p = 0; p < 4; ++p) conditioned[e][p].merge(other.conditioned[e][p]);
  for (std::size_t p = 0; p < 4; ++p) unconditioned[p].merge(other.unconditioned[p]);
}

SiftResult sift(std::span<const PhotonRecord> records, std::span<const Basis> alice_bases,
                std::span<const std::uint8_t> alice_bits) {
  if (records.size() != alice_bases.size() || records.size() != alice_bits.size()) {
    throw std::invalid_argument("sift: record and announcement streams are misaligned");
  }
  SiftResult out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const PhotonRecord& r = records[i];
    if (!r.detected || !r.pointer) continue;
    if (r.bob_basis == alice_bases[i]) {
      out.key.push_back({r.index, alice_bits[i], r.bob_outcome, r.projector, *r.pointer});
    } else {
      out.cross.push_back({r.index, bb84_state(alice_bases[i], alice_bits[i]),
                           bb84_state(r.bob_basis, r.bob_outcome), r.projector, *r.pointer});
    }
  }
  return out;
}

PPSAccumulator separate_ensembles(const SiftResult& sifted) {
  PPSAccumulator acc;
  for (const auto& k : sifted.key) {
    acc.unconditioned[static_cast<std::size_t>(k.projector.index())].push(k.pointer);
  }
  for (const auto& c : sifted.cross) {
    acc.unconditioned[static_cast<std::size_t>(c.projector.index())].push(c.pointer);
    const auto key = PpsKey::from_states(c.pre, c.post);
    if (!key) throw std::logic_error("separate_ensembles: same-basis record in estimation set");
    acc.at(*key, c.projector).push(c.pointer);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Estimators

bool Estimates::any_clamped() const {
  auto clamped = [](const ProbabilityEstimate& p) { return p.clamped; };
  return std::any_of(p_channel.begin(), p_channel.end(), clamped) ||
         std::any_of(p_a.begin(), p_a.end(), clamped) ||
         std::any_of(p_b.begin(), p_b.end(), clamped) || qber.clamped;
}

Estimates estimate(const PPSAccumulator& acc, double d) {
  if (!(d >= 0.0 && d <= 1.0)) throw DomainError("dark attenuation d must lie in [0, 1]");
  if (!(d < 1.0)) throw DegenerateCoupling("degenerate coupling estimate: d = 1");
  Estimates est;
  est.d = d;

  // Coupling from every detected round: mu + mu_perp = g (1 - d).
  for (Sign s : {Sign::plus, Sign::minus}) {
    const ProjectorChoice p{s, false};
    const auto& a = acc.unconditioned[static_cast<std::size_t>(p.index())];
    const auto& b = acc.unconditioned[static_cast<std::size_t>(p.partner().index())];
    require_samples(a, "unconditioned projector bucket");
    require_samples(b, "unconditioned projector bucket");
    const double sum = a.mean() + b.mean();
    if (!(sum > 0.0)) throw DegenerateCoupling("degenerate coupling estimate: mu + mu_perp <= 0");
    Estimate g{sum / (1.0 - d), std::hypot(a.standard_error(), b.standard_error()) / (1.0 - d)};
    (s == Sign::plus ? est.g_plus : est.g_minus) = g;
  }

  for (PpsKey k : kAllEnsembles) {
    for (ProjectorChoice p : kAllProjectors) {
      require_samples(acc.at(k, p), "empty PPS ensemble bucket");
    }
    for (ProjectorChoice p : kAllProjectors) {
      est.h_w[static_cast<std::size_t>(k.index())][static_cast<std::size_t>(p.index())] =
          ratio_estimate(acc.at(k, p), acc.at(k, p.partner()));
    }
  }

  // Total channel error per group, (a) and (b) pooled.
  for (int group = 1; group <= 4; ++group) {
    const PpsKey ka = PpsKey::from_index(2 * (group - 1));
    const PpsKey kb = PpsKey::from_index(2 * (group - 1) + 1);
    const ProjectorChoice p = ka.designated_projector();
    RunningStats mu = acc.at(ka, p);
    mu.merge(acc.at(kb, p));
    RunningStats mu_perp = acc.at(ka, p.partner());
    mu_perp.merge(acc.at(kb, p.partner()));
    const double orient = group <= 2 ? 1.0 : -1.0;
    const double a = mu.mean();
    const double b = mu_perp.mean();
    const double sum = a + b;
    if (!(sum > 0.0)) throw DegenerateCoupling("degenerate coupling estimate: mu + mu_perp <= 0");
    const double raw = 1.0 - orient * (a - b) / (sum * kSqrt2);
    const double da = -orient * 2.0 * b / (kSqrt2 * sum * sum);
    const double db = orient * 2.0 * a / (kSqrt2 * sum * sum);
    const double se = std::hypot(da * mu.standard_error(), db * mu_perp.standard_error());
    est.p_channel[static_cast<std::size_t>(group - 1)] = make_probability(raw, se);
  }

  // Separate p_a / p_b per ensemble from the H+ and H- weak values.
  for (PpsKey k : kAllEnsembles) {
    const Estimate& hp = est.weak_value(k, {Sign::plus, false});
    const Estimate& hm = est.weak_value(k, {Sign::minus, false});
    const Inversion inv = inversion_for(k);
    const double se = std::hypot(hp.se, hm.se) / kSqrt2;
    const auto sum_side =
        make_probability(inv.sum_offset + inv.sum_sign * (hp.value + hm.value) / kSqrt2, se);
    const auto diff_side = make_probability(0.5 + inv.diff_sign * (hp.value - hm.value) / kSqrt2, se);
    const auto e = static_cast<std::size_t>(k.index());
    est.p_b[e] = k.time_reversed() ? diff_side : sum_side;
    est.p_a[e] = k.time_reversed() ? sum_side : diff_side;
  }

  double mean = 0.0;
  double var = 0.0;
  double lo = 1.0;
  double hi = 0.0;
  for (const auto& p : est.p_channel) {
    mean += p.value / 4.0;
    var += p.se * p.se / 16.0;
    lo = std::min(lo, p.value);
    hi = std::max(hi, p.value);
  }
  est.p_channel_spread = hi - lo;
  est.qber = make_probability(mean + d / 2.0, std::sqrt(var));
  return est;
}

std::vector<ContextualityReport> empirical_contextuality(const Estimates& est) {
  std::vector<ContextualityReport> out;
  out.reserve(8);
  for (PpsKey k : kAllEnsembles) {
    const Estimate& h = est.weak_value(k, k.designated_projector());
    out.push_back(contextuality_report(k, (1.0 - est.d) * h.value, (1.0 - est.d) * h.se));
  }
  return out;
}

bool detect_blinding(const Estimates& est, double margin) {
  // No ensemble may show a significantly anomalous designated weak value.
  for (PpsKey k : kAllEnsembles) {
    const Estimate& h = est.weak_value(k, k.designated_projector());
    const double v = (1.0 - est.d) * h.value;
    const double se = (1.0 - est.d) * h.se;
    if (!std::isfinite(v) || !std::isfinite(se)) return false;
    const double excess = std::max({0.0, v - 1.0, -v});
    if (excess > margin * se) return false;
  }
  // Values must cluster by Bob's outcome as expectation values.
  double chi2 = 0.0;
  int k_values = 0;
  for (PpsKey k : kAllEnsembles) {
    for (Sign s : {Sign::plus, Sign::minus}) {
      const ProjectorChoice p{s, false};
      const Estimate& h = est.weak_value(k, p);
      if (!(h.se > 0.0) || !std::isfinite(h.se)) return false;
      const double z = (h.value - blinding_weak_value(k.post(), p)) / h.se;
      if (std::abs(z) > margin) return false;
      chi2 += z * z;
      ++k_values;
    }
  }
  const double k = static_cast<double>(k_values);
  return chi2 / k <= 1.0 + margin * std::sqrt(2.0 / k);
}

// ---------------------------------------------------------------------------
// Full run

std::vector<PhotonRecord> simulate_chunk(const ProtocolConfig& cfg, std::uint64_t chunk) {
  cfg.validate();
  return simulate_chunk_impl(cfg, cfg.dark_stats(), chunk).records;
}

ProtocolTranscript run_protocol(const ProtocolConfig& cfg) {
  cfg.validate();
  ProtocolTranscript tr;
  tr.config = cfg;
  tr.config_hash = config_fingerprint(cfg);
  tr.dark = cfg.dark_stats();
  tr.warnings = cfg.warnings();

  const DarkCountStats dark = tr.dark;
  auto chunks = for_each_chunk<ChunkResult>(
      cfg.block_size, cfg.threads, [&](std::uint64_t chunk, std::uint64_t, std::uint64_t) {
        ChunkSimulation sim = simulate_chunk_impl(cfg, dark, chunk);
        std::vector<Basis> bases;
        std::vector<std::uint8_t> bits;
        bases.reserve(sim.records.size());
        bits.reserve(sim.records.size());
        for (const auto& r : sim.records) {
          bases.push_back(r.alice_basis);
          bits.push_back(r.alice_bit);
        }
        const SiftResult s = sift(sim.records, bases, bits);

        ChunkResult out;
        out.acc = separate_ensembles(s);
        out.counts.photons = sim.records.size() + sim.calibration_slots;
        out.counts.calibration_slots = sim.calibration_slots;
        out.counts.calibration_clicks = sim.calibration_clicks;
        for (const auto& r : sim.records) {
          if (!r.detected) continue;
          ++out.counts.detected;
          if (r.dark != DarkFlag::none) ++out.counts.dark_events;
        }
        out.counts.sifted = s.key.size();
        out.counts.cross_basis = s.cross.size();
        out.key_alice.reserve(s.key.size());
        out.key_bob.reserve(s.key.size());
        for (const auto& k : s.key) {
          out.key_alice.push_back(k.alice_bit);
          out.key_bob.push_back(k.bob_bit);
          if (k.alice_bit != k.bob_bit) ++out.counts.key_mismatches;
          if (cfg.keep_public_log) out.sifted_indices.push_back(k.index);
        }
        if (cfg.keep_public_log) {
          for (const auto& c : s.cross) {
            out.disclosed_indices.push_back(c.index);
            out.disclosed_bits.push_back(static_cast<std::uint8_t>(bit_of(c.pre)));
          }
        }
        return out;
      });

  for (auto& c : chunks) {
    tr.accumulator.merge(c.acc);
    auto& n = tr.counts;
    n.photons += c.counts.photons;
    n.detected += c.counts.detected;
    n.sifted += c.counts.sifted;
    n.cross_basis += c.counts.cross_basis;
    n.dark_events += c.counts.dark_events;
    n.key_mismatches += c.counts.key_mismatches;
    n.calibration_slots += c.counts.calibration_slots;
    n.calibration_clicks += c.counts.calibration_clicks;
    tr.sifted_key_alice.insert(tr.sifted_key_alice.end(), c.key_alice.begin(), c.key_alice.end());
    tr.sifted_key_bob.insert(tr.sifted_key_bob.end(), c.key_bob.begin(), c.key_bob.end());
    tr.sifted_indices.insert(tr.sifted_indices.end(), c.sifted_indices.begin(),
                             c.sifted_indices.end());
    tr.disclosed_indices.insert(tr.disclosed_indices.end(), c.disclosed_indices.begin(),
                                c.disclosed_indices.end());
    tr.disclosed_bits.insert(tr.disclosed_bits.end(), c.disclosed_bits.begin(),
                             c.disclosed_bits.end());
    c = ChunkResult{};
  }
  if (cfg.dark_calibration && tr.counts.calibration_slots > 0) {
    tr.calibrated_p_dark = static_cast<double>(tr.counts.calibration_clicks) /
                           static_cast<double>(tr.counts.calibration_slots);
  }

  if (tr.counts.detected == 0) throw DeadChannel("dead channel: no photons were detected");

  tr.verdict.margin = cfg.margin;
  try {
    tr.estimates = estimate(tr.accumulator, dark.d);
  } catch (const InsufficientStatistics& e) {
    tr.verdict.status = VerdictStatus::abort;
    tr.verdict.reason = e.what();
    return tr;
  } catch (const DegenerateCoupling& e) {
    tr.verdict.status = VerdictStatus::abort;
    tr.verdict.reason = e.what();
    return tr;
  }

  tr.contextuality = empirical_contextuality(*tr.estimates);
  tr.blinding_detected = detect_blinding(*tr.estimates, cfg.margin);
  tr.verdict = verdict(tr.contextuality, cfg.margin, tr.blinding_detected);
  return tr;
}

}  // namespace wvqkd
