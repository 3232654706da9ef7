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

// Acceptance gate: one PASS/FAIL line per criterion. Usage:
//   acceptance <path-to-wvqkd-cli> <scratch-dir>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <nlohmann/json.hpp>

#include "wvqkd/contextuality.hpp"
#include "wvqkd/harness.hpp"
#include "wvqkd/protocol.hpp"
#include "wvqkd/quantum.hpp"
#include "wvqkd/running_stats.hpp"
#include "wvqkd/trajectory.hpp"
#include "wvqkd/weak_values.hpp"

namespace fs = std::filesystem;
using namespace wvqkd;

namespace {

constexpr double kAnalyticTol = 1e-12;
constexpr double kPrintedDigitsTol = 1e-7;
constexpr double kSigmas = 3.0;
constexpr double kScalingTol = 0.10;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.7g", v);
  return buf;
}

Outcome oracle_equivalence() {
  Outcome o;
  double worst = 0.0;
  for (int i = 0; i <= 25; ++i) {
    for (int j = 0; j <= 25; ++j) {
      const ChannelNoise n{0.01 * i, 0.01 * j};
      for (PpsKey k : kAllEnsembles) {
        const auto pre = depolarize(DensityMatrix::from_pure(to_pure(k.pre())), n.p_a);
        const auto post = depolarize(Effect::from_pure(to_pure(k.post())), n.p_b);
        for (ProjectorChoice p : kAllProjectors) {
          const Complex w = weak_value(pre, post, h_projector(p).op());
          worst = std::max({worst, std::abs(w.real() - pps_weak_value(k, p, n, 0.0)),
                            std::abs(w.imag())});
        }
      }
    }
  }
  o.require(worst <= kAnalyticTol, "max deviation " + num(worst));
  o.detail = o.pass ? "max deviation " + num(worst) + " over 26x26x8x4" : o.detail;
  return o;
}

Outcome threshold_exactness() {
  Outcome o;
  const PpsKey k = PpsKey::from_index(0);
  const ProjectorChoice des = k.designated_projector();
  const double ideal = pps_weak_value(k, des, {}, 0.0);
  auto c_at = [&](double p) {
    return contextuality_measure(pps_weak_value(k, des, {p / 2, p / 2}, 0.0), ideal);
  };
  // Bisection on the measure itself, independent of the closed-form constant.
  double lo = 0.0;
  double hi = 0.5;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (c_at(mid) > 0.5 ? lo : hi) = mid;
  }
  const double p_cross = 0.5 * (lo + hi);
  double dlo = 0.0;
  double dhi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (dlo + dhi);
    (secure_noise_region(0.0, mid) ? dlo : dhi) = mid;
  }
  const double d_flip = 0.5 * (dlo + dhi);
  o.require(std::abs(p_cross - 0.1464466) <= kPrintedDigitsTol, "C crosses 1/2 at " + num(p_cross));
  o.require(std::abs(p_cross - (0.5 - std::sqrt(2.0) / 4)) <= kAnalyticTol, "crossing off closed form");
  o.require(std::abs(d_flip - 0.0857864) <= kPrintedDigitsTol, "region flips at d = " + num(d_flip));
  if (o.pass) o.detail = "p* = " + num(p_cross) + ", d* = " + num(d_flip);
  return o;
}

Outcome back_action() {
  Outcome o;
  const WeakMeasurementConfig cfg{0.1, 1.0};
  const auto t = run_back_action_trials(cfg, 10'000'000, 20260101, 0);
  const double p = collapse_probability(cfg);
  const double n = static_cast<double>(t.total_rounds());
  const double se = std::sqrt(p * (1 - p) / n);
  const double rate = t.flip_rate();
  o.require(std::abs(rate - p) <= kSigmas * se, "flip rate " + num(rate) + " vs " + num(p));
  o.require(rate < 0.0004, "flip rate not below 0.0004");
  o.require(std::abs(p - 3.1230e-4) <= 5e-8, "p_wm = " + num(p));
  if (o.pass) o.detail = "flip rate " + num(rate) + " vs p_wm " + num(p) + " (SE " + num(se) + ")";
  return o;
}

Outcome convergence() {
  Outcome o;
  const ChannelNoise noise{0.05, 0.03};
  // g * SE * sqrt(N) / sigma of the pointer-mean estimate mu / g, which the
  // scaling law describes, and g * SE of the ratio estimator for reference.
  std::vector<double> scaled_se;
  std::vector<double> ratio_se;
  for (double g : {0.05, 0.1, 0.2}) {
    ProtocolConfig cfg;
    cfg.block_size = 1'000'000;
    cfg.noise = noise;
    cfg.wm = {g, 1.0};
    cfg.seed = 1;
    const auto tr = run_protocol(cfg);
    if (!tr.estimates) {
      o.require(false, "no estimates at g/sigma " + num(g));
      continue;
    }
    const Estimates& e = *tr.estimates;
    double se_sum = 0.0;
    double law_sum = 0.0;
    for (PpsKey k : kAllEnsembles) {
      const ProjectorChoice des = k.designated_projector();
      const Estimate& h = e.weak_value(k, des);
      se_sum += h.se;
      const RunningStats& bucket = tr.accumulator.at(k, des);
      const double se_mean_over_g = bucket.standard_error() / g;
      law_sum += g * se_mean_over_g * std::sqrt(static_cast<double>(bucket.count())) / cfg.wm.sigma;
      if (g != 0.1) continue;
      const double truth = pps_weak_value(k, des, noise, 0.0);
      o.require(std::abs(h.value - truth) <= kSigmas * h.se,
                std::string(k.label()) + " weak value " + num(h.value) + " vs " + num(truth));
      const auto& pa = e.p_a[static_cast<std::size_t>(k.index())];
      const auto& pb = e.p_b[static_cast<std::size_t>(k.index())];
      o.require(std::abs(pa.raw - noise.p_a) <= kSigmas * pa.se,
                std::string(k.label()) + " p_a " + num(pa.raw) + " +- " + num(pa.se));
      o.require(std::abs(pb.raw - noise.p_b) <= kSigmas * pb.se,
                std::string(k.label()) + " p_b " + num(pb.raw) + " +- " + num(pb.se));
    }
    scaled_se.push_back(law_sum / 8.0);
    ratio_se.push_back(g * se_sum / 8.0);
  }
  if (scaled_se.size() == 3) {
    const auto [mn, mx] = std::minmax_element(scaled_se.begin(), scaled_se.end());
    const std::string law = num(scaled_se[0]) + ", " + num(scaled_se[1]) + ", " + num(scaled_se[2]);
    const std::string ratio = num(ratio_se[0]) + ", " + num(ratio_se[1]) + ", " + num(ratio_se[2]);
    o.require(*mx / *mn <= 1.0 + kScalingTol, "g*SE*sqrt(N)/sigma not constant: " + law);
    if (o.pass) {
      o.detail = "all 8 ensembles and p_a, p_b within 3 SE; g*SE*sqrt(N)/sigma = " + law +
                 "; ratio-estimator g*SE = " + ratio;
    }
  }
  return o;
}

Outcome estimator_closure() {
  Outcome o;
  const ChannelNoise n{0.05, 0.03};
  double worst = 0.0;
  for (double d : {0.0, 0.02}) {
    const Estimates e = estimate(analytic_accumulator(n, d, 0.1, 1.0, 1000), d);
    worst = std::max({worst, std::abs(e.g_plus.value - 0.1), std::abs(e.g_minus.value - 0.1)});
    for (std::size_t i = 0; i < 8; ++i) {
      worst = std::max({worst, std::abs(e.p_a[i].value - n.p_a), std::abs(e.p_b[i].value - n.p_b)});
    }
    for (const auto& p : e.p_channel) worst = std::max(worst, std::abs(p.value - n.p_channel()));
  }
  o.require(worst <= kAnalyticTol, "max deviation " + num(worst));
  if (o.pass) o.detail = "max deviation " + num(worst) + " at d = 0 and 0.02";
  return o;
}

int run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome attacks(const std::string& cli, const fs::path& scratch) {
  Outcome o;
  {
    ProtocolConfig cfg;
    cfg.block_size = 1'000'000;
    cfg.eve.kind = EveKind::intercept_resend;
    cfg.seed = 1;
    const auto tr = run_protocol(cfg);
    o.require(tr.verdict.status == VerdictStatus::abort, "intercept-resend verdict not abort");
    if (tr.estimates) {
      const auto& q = tr.estimates->qber;
      o.require(std::abs(q.value - 0.25) <= kSigmas * q.se,
                "intercept-resend p_channel " + num(q.value) + " +- " + num(q.se));
      o.detail = "intercept-resend p_channel " + num(q.value) + " +- " + num(q.se);
    } else {
      o.require(false, "intercept-resend produced no estimates");
    }
  }
  const fs::path out = scratch / "blinding";
  const int code = run_cli(cli, "attack --eve intercept_resend_blinding --photons 10000000 --seed 1 --out \"" +
                                    out.string() + "\"");
  o.require(code == 3, "blinding exit code " + std::to_string(code));
  std::ifstream in(out / "transcript.json");
  if (!in) {
    o.require(false, "no blinding transcript");
    return o;
  }
  const auto j = nlohmann::json::parse(in);
  int outside = 0;
  for (PpsKey k : kAllEnsembles) {
    for (ProjectorChoice p : kAllProjectors) {
      const auto& h = j["estimates"]["weak_values"][std::string(k.label())][std::string(to_string(p))];
      const double expect = blinding_weak_value(k.post(), p);
      if (std::abs(h["value"].get<double>() - expect) > kSigmas * h["se"].get<double>()) {
        ++outside;
        o.require(false, std::string(k.label()) + " " + std::string(to_string(p)) + " = " +
                             num(h["value"].get<double>()) + " vs " + num(expect));
      }
    }
  }
  int nonzero = 0;
  for (const auto& c : j["contextuality"]) nonzero += c["c"].get<double>() != 0.0;
  o.require(nonzero == 0, std::to_string(nonzero) + " blinding C values above 0");
  if (o.pass) o.detail += "; blinding: 32/32 weak values within 3 SE, all C = 0, exit 3";
  return o;
}

Outcome key_rate(const std::string& cli, const fs::path& scratch) {
  Outcome o;
  ProtocolConfig cfg;
  cfg.block_size = 1'000'000;
  cfg.keep_public_log = true;
  cfg.seed = 1;
  const auto tr = run_protocol(cfg);
  const double det = static_cast<double>(tr.counts.detected);
  const double frac = static_cast<double>(tr.counts.sifted) / det;
  const double se = std::sqrt(0.25 / det);
  o.require(std::abs(frac - 0.5) <= kSigmas * se, "sifted fraction " + num(frac));

  const std::set<std::uint64_t> sifted(tr.sifted_indices.begin(), tr.sifted_indices.end());
  o.require(sifted.size() == tr.sifted_key_alice.size(), "sifted index list incomplete");
  std::size_t leaked = 0;
  for (auto i : tr.disclosed_indices) leaked += sifted.count(i);
  o.require(leaked == 0, std::to_string(leaked) + " sifted rounds disclosed");

  // The written transcript may contain the public log but never key material.
  const fs::path out = scratch / "keyrate";
  const int code = run_cli(cli, "simulate --photons 200000 --seed 5 --out \"" + out.string() + "\"");
  o.require(code == 0 || code == 2, "simulate exit code " + std::to_string(code));
  o.require(!fs::exists(out / "sifted_key.txt"), "sifted key written without emit_key");
  const auto j = transcript_to_json(tr);
  std::function<void(const nlohmann::json&, const std::string&)> walk =
      [&](const nlohmann::json& node, const std::string& path) {
        if (node.is_object()) {
          for (auto it = node.begin(); it != node.end(); ++it) {
            const bool key_like = it.key().find("bits") != std::string::npos ||
                                  it.key().find("key_alice") != std::string::npos ||
                                  it.key().find("key_bob") != std::string::npos;
            if (key_like && path + "/" + it.key() != "/public_log/disclosed_alice_bits") {
              o.require(false, "key-like field " + path + "/" + it.key());
            }
            walk(*it, path + "/" + it.key());
          }
        }
      };
  walk(j, "");
  o.require(j["public_log"]["disclosed_alice_bits"].size() == tr.counts.cross_basis,
            "disclosed bits cover more than cross-basis rounds");
  if (o.pass) {
    o.detail = "sifted fraction " + num(frac) + " +- " + num(se) + "; 0 of " +
               std::to_string(tr.disclosed_indices.size()) + " disclosed rounds are sifted";
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <wvqkd-cli> <scratch-dir>\n", argv[0]);
    return 1;
  }
  const std::string cli = argv[1];
  const fs::path scratch = argv[2];
  fs::create_directories(scratch);

  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1 analytic oracle equivalence", oracle_equivalence},
      {"2 threshold exactness", threshold_exactness},
      {"3 back-action law", back_action},
      {"4 Monte Carlo convergence", convergence},
      {"5 estimator closure", estimator_closure},
      {"6 attack reproduction", [&] { return attacks(cli, scratch); }},
      {"7 key-rate property", [&] { return key_rate(cli, scratch); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
