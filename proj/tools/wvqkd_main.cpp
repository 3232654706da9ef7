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


// wvqkd command-line tool: tables, simulate, attack, sweep, validate.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wvqkd/error.hpp"
#include "wvqkd/harness.hpp"
#include "wvqkd/parallel.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitError = 1;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::uint64_t> photons;
  std::string eve;
  std::optional<double> margin;
  std::optional<unsigned> threads;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration")
      ->envname("WVQKD_CONFIG")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "64-bit master seed")->envname("WVQKD_SEED");
  cmd->add_option("--out", f.out, "Output directory")->envname("WVQKD_OUT");
  cmd->add_option("--photons", f.photons, "Block size 2N")->envname("WVQKD_PHOTONS");
  cmd->add_option("--eve", f.eve, "none | intercept_resend | intercept_resend_blinding")
      ->envname("WVQKD_EVE");
  cmd->add_option("--margin", f.margin, "Standard-error margin of the verdict")
      ->envname("WVQKD_MARGIN");
  cmd->add_option("--threads", f.threads, "Worker threads (0 = all cores)")
      ->envname("WVQKD_THREADS");
}

wvqkd::RunConfig resolve(const CommonFlags& f) {
  wvqkd::RunConfig rc = f.config.empty() ? wvqkd::parse_run_config(nlohmann::json::object())
                                         : wvqkd::load_run_config(f.config);
  auto& pc = rc.protocol;
  if (f.seed) pc.seed = *f.seed;
  if (!f.out.empty()) rc.out_dir = f.out;
  if (f.photons) pc.block_size = *f.photons;
  if (f.margin) pc.margin = *f.margin;
  if (f.threads) pc.threads = *f.threads;
  if (!f.eve.empty()) {
    const auto kind = wvqkd::parse_eve_kind(f.eve);
    if (!kind) throw wvqkd::ConfigError("unknown attacker model '" + f.eve + "'");
    pc.eve.kind = *kind;
  }
  try {
    pc.validate();
  } catch (const std::exception& e) {
    throw wvqkd::ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return rc;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("error writing '" + path.string() + "'");
}

std::string records_for(const wvqkd::ProtocolConfig& cfg, std::uint64_t limit) {
  std::vector<wvqkd::PhotonRecord> records;
  const std::uint64_t chunks = (cfg.block_size + wvqkd::kChunkSize - 1) / wvqkd::kChunkSize;
  for (std::uint64_t c = 0; c < chunks && records.size() < limit; ++c) {
    auto part = wvqkd::simulate_chunk(cfg, c);
    const std::size_t take = std::min<std::size_t>(part.size(), limit - records.size());
    records.insert(records.end(), part.begin(), part.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return wvqkd::records_csv(records);
}

int run_block(const wvqkd::RunConfig& rc) {
  for (const auto& w : rc.protocol.warnings()) std::cerr << "warning: " << w << '\n';
  const wvqkd::ProtocolTranscript tr = wvqkd::run_protocol(rc.protocol);
  const fs::path dir(rc.out_dir);
  fs::create_directories(dir);
  write_file(dir / "transcript.json", wvqkd::transcript_to_json(tr).dump(2) + "\n");
  write_file(dir / "statistics.csv", wvqkd::statistics_csv(tr));
  if (rc.emit_key) write_file(dir / "sifted_key.txt", wvqkd::sifted_key_text(tr));
  if (rc.dump_records > 0) {
    write_file(dir / "records.csv", records_for(rc.protocol, rc.dump_records));
  }
  std::printf("verdict: %s (min C = %.6f)%s%s\n",
              std::string(wvqkd::to_string(tr.verdict.status)).c_str(), tr.verdict.min_c,
              tr.verdict.reason.empty() ? "" : ": ", tr.verdict.reason.c_str());
  return wvqkd::exit_code_for(tr.verdict.status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak-value QKD simulator"};
  app.require_subcommand(1);

  double pa = 0.0;
  double pb = 0.0;
  double d = 0.0;
  std::string tables_out;
  auto* tables = app.add_subcommand("tables", "Analytic weak values of all PPS ensembles as CSV");
  tables->add_option("--pa", pa, "Depolarizing probability before the weak measurement");
  tables->add_option("--pb", pb, "Depolarizing probability after the weak measurement");
  tables->add_option("--d", d, "Dark attenuation");
  tables->add_option("--out", tables_out, "Output file (default stdout)");

  CommonFlags sim_flags;
  auto* simulate = app.add_subcommand("simulate", "Run one protocol block");
  add_common_flags(simulate, sim_flags);

  CommonFlags attack_flags;
  auto* attack = app.add_subcommand("attack", "Run one block against an eavesdropper");
  add_common_flags(attack, attack_flags);

  CommonFlags sweep_flags;
  bool allow_large = false;
  auto* sweep = app.add_subcommand("sweep", "Parameter grid over p_channel, d, g/sigma, photons");
  add_common_flags(sweep, sweep_flags);
  sweep->add_flag("--allow-large", allow_large, "Lift the grid-size cap");

  unsigned validate_threads = 0;
  auto* validate = app.add_subcommand("validate", "Oracle, closure and convergence checks");
  validate->add_option("--threads", validate_threads, "Worker threads (0 = all cores)")
      ->envname("WVQKD_THREADS");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*tables) {
      wvqkd::ChannelNoise noise{pa, pb};
      noise.validate();
      if (!(d >= 0.0 && d <= 1.0)) throw wvqkd::DomainError("d must lie in [0, 1]");
      const std::string csv = wvqkd::tables_csv(noise, d);
      if (tables_out.empty()) {
        std::cout << csv;
      } else {
        write_file(tables_out, csv);
      }
      return 0;
    }
    if (*simulate) return run_block(resolve(sim_flags));
    if (*attack) {
      wvqkd::RunConfig rc = resolve(attack_flags);
      if (attack_flags.eve.empty() && rc.protocol.eve.kind == wvqkd::EveKind::none) {
        rc.protocol.eve.kind = wvqkd::EveKind::intercept_resend_blinding;
      }
      return run_block(rc);
    }
    if (*sweep) {
      const wvqkd::RunConfig rc = resolve(sweep_flags);
      wvqkd::SweepSpec spec = rc.sweep.value_or(wvqkd::SweepSpec{});
      if (sweep_flags.photons) spec.photons = *sweep_flags.photons;
      const fs::path dir(rc.out_dir);
      fs::create_directories(dir);
      std::ofstream out(dir / "sweep.csv", std::ios::binary);
      if (!out) throw std::runtime_error("cannot write sweep.csv");
      wvqkd::run_sweep(spec, rc.protocol, out, allow_large);
      return 0;
    }
    if (*validate) return wvqkd::run_validation(std::cout, validate_threads) ? 0 : kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
