// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment driver: `run` executes a sweep from a JSON config, `audit`
// re-checks the feasibility of a records file, `plotdata` emits per-figure
// series from a records file.
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "cranhb/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitTrialFailure = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint fronthaul and hybrid beamforming design experiments"};
  app.require_subcommand(1);

  std::string config_path, records_path, out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0, threads = 0;
  std::string scheme_filter, csi_override;

  auto* run = app.add_subcommand("run", "run a sweep from a config file");
  run->add_option("config", config_path, "JSON experiment config")->required();
  run->add_option("--seed", seed, "override the master seed")
      ->each([&](const std::string&) { seed_set = true; });
  run->add_option("--trials", trials, "override trials per point");
  run->add_option("--out-dir", out_dir, "output directory");
  run->add_option("--threads", threads, "worker threads");
  run->add_option("--scheme", scheme_filter, "run only this scheme");
  run->add_option("--csi", csi_override, "override CSI mode (perfect|imperfect)");

  auto* audit = app.add_subcommand("audit", "re-check feasibility of a records file");
  audit->add_option("config", config_path, "JSON experiment config")->required();
  audit->add_option("records", records_path, "records CSV")->required();

  auto* plotdata = app.add_subcommand("plotdata", "emit per-figure series");
  plotdata->add_option("records", records_path, "records CSV")->required();
  plotdata->add_option("--out-dir", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      auto cfg = cranhb::harness::ExperimentConfig::from_json_file(config_path);
      if (seed_set) cfg.seed = seed;
      if (trials > 0) cfg.trials = trials;
      if (threads > 0) cfg.threads = threads;
      if (!scheme_filter.empty()) {
        cfg.schemes = {cranhb::harness::parse_scheme(scheme_filter)};
      }
      if (!csi_override.empty()) {
        if (csi_override == "perfect") {
          cfg.csi_mode = cranhb::harness::CsiMode::Perfect;
        } else if (csi_override == "imperfect") {
          cfg.csi_mode = cranhb::harness::CsiMode::Imperfect;
        } else {
          throw std::invalid_argument("--csi must be perfect or imperfect");
        }
      }
      cfg.validate();
      const auto records = cranhb::harness::run_experiment(cfg);
      const std::string path = cranhb::harness::emit_outputs(records, cfg, out_dir);
      std::cout << "wrote " << records.size() << " records to " << path << "\n";
      for (const auto& a : cranhb::harness::aggregate(records)) {
        std::printf("%-14s %s=%-8g sum_rate=%.4f +/- %.4f  ee=%.5f +/- %.5f (n=%d)\n",
                    cranhb::harness::scheme_name(a.scheme).c_str(),
                    cranhb::harness::sweep_variable_name(cfg.sweep_variable).c_str(),
                    a.sweep_value, a.mean_sum_rate, a.stderr_sum_rate, a.mean_ee,
                    a.stderr_ee, a.trials);
      }
      for (const auto& r : records) {
        if (r.status != "ok") return kExitTrialFailure;
      }
      return kExitOk;
    }
    if (audit->parsed()) {
      const auto cfg = cranhb::harness::ExperimentConfig::from_json_file(config_path);
      const auto records = cranhb::harness::load_csv_file(records_path);
      const auto res = cranhb::harness::audit_records(records, cfg);
      std::cout << "audited " << res.checked << " records, " << res.violations
                << " violations\n";
      for (const auto& m : res.messages) std::cout << "  " << m << "\n";
      return res.ok() ? kExitOk : kExitTrialFailure;
    }
    if (plotdata->parsed()) {
      const auto records = cranhb::harness::load_csv_file(records_path);
      cranhb::harness::emit_plotdata(records, out_dir);
      std::cout << "wrote plot data to " << out_dir << "\n";
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
