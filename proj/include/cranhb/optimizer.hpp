// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "cranhb/convex.hpp"
#include "cranhb/rng.hpp"
#include "cranhb/types.hpp"

namespace cranhb::optimizer {

enum class ObjectiveKind { Wsr, Ee };

struct BcdConfig {
  int outer_max_iters = 100;
  int inner_max_iters = 50;
  double rel_tol = 1e-5;
  ObjectiveKind objective = ObjectiveKind::Wsr;
  bool capture_trace = true;
};

enum class Phase { DigitalStep, RfStep, Projection };

struct TraceEntry {
  double objective = 0.0;
  Phase phase = Phase::DigitalStep;
  double max_fronthaul_slack = 0.0;  // max_i (g_i - C_i), from the original g_i
  double max_power_slack = 0.0;      // max_i (p_i - P_i)
};

struct OptimizationTrace {
  std::vector<TraceEntry> entries;
  bool converged = false;
  bool oscillation = false;  // last 10 outer objectives spread > 1e-4 relative
  int outer_iters = 0;
};

/// Channel knowledge handed to the digital design: the stacked channel (true
/// or estimated) per UE, plus per-(UE, RRH) estimation error covariance
/// blocks when the CSI is imperfect (leave empty for perfect CSI).
struct DigitalDesignInput {
  std::vector<Vec> h_stacked;              // [ue], M*N_R
  std::vector<std::vector<Mat>> err_cov;   // [ue][rrh], M x M; may be empty
  bool imperfect() const { return !err_cov.empty(); }
};

/// One sample inside the (possibly SAA-coupled) RF update.
struct RfDesignSample {
  std::vector<Vec> h_stacked;
  convex::DigitalVars vars;
};

// True objective of one sample at a full solution: weighted sum rate in WSR
// mode (error-aware when the input is imperfect) or WSR/P_T in EE mode.
double true_objective(ObjectiveKind kind, const DigitalDesignInput& input,
                      const HybridSolution& sol, const SystemConfig& cfg);

/// Inner block-coordinate loop over {v_D, Omega} at fixed RF: refresh
/// (u, w~, Sigma[, rho]) at the current point, solve the convex subproblem,
/// repeat until the objective stalls. The objective sequence is
/// nondecreasing up to solver tolerance.
std::pair<convex::DigitalVars, OptimizationTrace> algorithm1(
    const DigitalDesignInput& input, const std::vector<Mat>& rf,
    const SystemConfig& cfg, const BcdConfig& bcd,
    const convex::DigitalVars* warm_start = nullptr);

/// Inner loop over the relaxed RF matrices at fixed digital variables,
/// coupled across all samples (the SAA average); |entries| <= 1 and the
/// per-RRH power constraint holds for every sample.
std::pair<std::vector<Mat>, OptimizationTrace> algorithm2(
    const std::vector<RfDesignSample>& samples, const std::vector<Mat>& rf_init,
    const SystemConfig& cfg, const BcdConfig& bcd);

/// Entrywise projection exp(j*angle(z)) onto the constant-modulus set; a
/// zero entry maps to 1 (phase-0 tie break). Idempotent.
Mat project_constant_modulus(const Mat& rf_i);
std::vector<Mat> project_constant_modulus(const std::vector<Mat>& rf);

/// After projection the RRH powers may exceed their budgets: scale all v_D
/// by tau and all Omega by tau^2 (common tau in (0,1]) so that p_i <= P_i;
/// this leaves every g_i unchanged. Returns tau^2. The fronthaul constraints
/// are re-verified and Omega inflated in the (numerically unreachable) case
/// that scaling drift violates one.
double restore_feasibility(HybridSolution& sol, const SystemConfig& cfg);

/// RF matrices with i.i.d. uniform phases, |entry| = 1.
std::vector<Mat> random_phase_rf(const SystemConfig& cfg, Rng& rng);

struct AlternationResult {
  std::vector<Mat> rf;                        // best-so-far RF
  std::vector<convex::DigitalVars> digitals;  // per sample, matching rf
  double best_objective = 0.0;
  OptimizationTrace trace;
};

/// The outer alternation shared by the perfect-CSI designs (T = 1) and the
/// SAA designs (T > 1): algorithm1 per sample, coupled algorithm2,
/// constant-modulus projection (unless `project` is false, the reduced-rank
/// variant), feasibility restoration, best-so-far tracking. Nonmonotone
/// steps can appear only at projection-tagged trace entries.
AlternationResult run_alternation(const std::vector<DigitalDesignInput>& samples,
                                  const std::vector<Mat>& rf_init,
                                  const SystemConfig& cfg, const BcdConfig& bcd,
                                  bool project);

/// Joint WSR design under perfect CSI; RF phases initialized i.i.d. uniform
/// from `rng`. Returns the best feasible solution encountered.
std::pair<HybridSolution, OptimizationTrace> optimize_wsr_perfect(
    const ChannelRealization& ch, const SystemConfig& cfg,
    const BcdConfig& bcd, Rng& rng);

/// Joint network-EE design under perfect CSI.
std::pair<HybridSolution, OptimizationTrace> optimize_ee_perfect(
    const ChannelRealization& ch, const SystemConfig& cfg,
    const BcdConfig& bcd, Rng& rng);

}  // namespace cranhb::optimizer
