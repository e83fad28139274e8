// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cranhb/optimizer.hpp"
#include "cranhb/saa.hpp"
#include "cranhb/types.hpp"

namespace cranhb::harness {

enum class Scheme { ProposedWsr, ProposedEe, FullyDigital, ReducedRank, RandomRf };

std::string scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

enum class SweepVariable { Snr, RfChains, Fronthaul, Antennas };

std::string sweep_variable_name(SweepVariable v);
SweepVariable parse_sweep_variable(const std::string& name);

enum class CsiMode { Perfect, Imperfect };

struct ExperimentConfig {
  SweepVariable sweep_variable = SweepVariable::Snr;
  std::vector<double> sweep_values;
  int trials = 20;
  SystemConfig base;
  std::vector<Scheme> schemes;
  CsiMode csi_mode = CsiMode::Perfect;
  std::uint64_t seed = 1;
  int saa_samples = 10;
  optimizer::BcdConfig bcd;
  int threads = 1;

  void validate() const;
  static ExperimentConfig from_json_file(const std::string& path);
  static ExperimentConfig from_json_text(const std::string& text);

  /// Base config with the sweep variable applied (SNR in dB maps to the
  /// per-RRH power limit; N, C, M map to their fields directly).
  SystemConfig config_at(double sweep_value) const;
};

struct ExperimentRecord {
  Scheme scheme = Scheme::ProposedWsr;
  SweepVariable sweep_var = SweepVariable::Snr;
  double sweep_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;  // derived stream id of the trial
  std::vector<double> ue_rates;
  double sum_rate = 0.0;
  std::vector<double> rrh_powers;
  double total_power = 0.0;
  double ee = 0.0;
  int iters = 0;
  std::string status = "ok";
  double wall_ms = 0.0;
};

struct TrialOutcome {
  ExperimentRecord record;
  HybridSolution solution;
  SystemConfig cfg_used;
  bool require_unit_modulus = true;
};

/// Runs one (scheme, sweep point, trial) cell. Never throws: solver errors
/// are captured in record.status.
TrialOutcome run_trial(const ExperimentConfig& cfg, Scheme scheme,
                       double sweep_value, int trial);

/// Full sweep over (scheme, point, trial) with a bounded worker pool;
/// records are sorted by (scheme, point, trial) so output is deterministic
/// under a fixed seed regardless of thread count.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg);

struct Aggregate {
  Scheme scheme;
  double sweep_value;
  int trials;
  double mean_sum_rate, stderr_sum_rate, median_sum_rate;
  double mean_ee, stderr_ee, median_ee;
};
std::vector<Aggregate> aggregate(const std::vector<ExperimentRecord>& records);

// CSV emission. Header (bit-exact):
//   scheme,sweep_var,sweep_value,trial,seed,sum_rate_bpshz,ee_bpshz_per_watt,
//   total_power,iters,status,wall_ms,rate_ue_<k>...,power_rrh_<i>...
std::string csv_header(int num_ue, int num_rrh);
void write_csv(const std::vector<ExperimentRecord>& records, int num_ue,
               int num_rrh, std::ostream& out);
void write_csv_file(const std::vector<ExperimentRecord>& records, int num_ue,
                    int num_rrh, const std::string& path);
std::vector<ExperimentRecord> load_csv_file(const std::string& path);

/// Per-figure plot data: one file per metric with x, mean, stderr per scheme.
void emit_plotdata(const std::vector<ExperimentRecord>& records,
                   const std::string& out_dir);

/// Writes records plus plot data under out_dir; returns the records path.
std::string emit_outputs(const std::vector<ExperimentRecord>& records,
                         const ExperimentConfig& cfg,
                         const std::string& out_dir);

struct AuditResult {
  int checked = 0;
  int violations = 0;
  std::vector<std::string> messages;
  bool ok() const { return violations == 0; }
};

/// Re-runs every record's trial deterministically from its coordinates and
/// verifies the solution feasibility audit plus the recorded metrics.
AuditResult audit_records(const std::vector<ExperimentRecord>& records,
                          const ExperimentConfig& cfg);

}  // namespace cranhb::harness
