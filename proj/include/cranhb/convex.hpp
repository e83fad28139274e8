// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "cranhb/types.hpp"

namespace cranhb::convex {

enum class ObjectiveMode { WsrSurrogate, EeSurrogate };

enum class SolveStatus { Converged, MaxIter, Infeasible, Failed };

struct KktBreakdown {
  double stationarity = 0.0;
  double primal_feasibility = 0.0;
  double complementary_slackness = 0.0;
  double total() const;
};

struct SolveReport {
  std::vector<double> objective_trace;
  KktBreakdown kkt;
  double kkt_residual = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::Converged;
  // Final multipliers: fronthaul lambda[i], power mu[i] (digital mode) or
  // mu[i*T + t] per (RRH, sample) in RF mode.
  std::vector<double> lambda;
  std::vector<double> mu;
  // Set on Infeasible: which constraint cannot be met and by how much at the
  // best interior candidate.
  std::string infeasible_certificate;
};

/// Digital-mode decision variables.
struct DigitalVars {
  std::vector<Vec> digital;  // v_{D,k}, stacked N*N_R per UE
  std::vector<Mat> omega;    // Omega_i per RRH, N x N
};

/// Convex subproblem over {v_D, Omega} at frozen RF beamformers and frozen
/// surrogate state. Channels enter only through the effective vectors
/// a_k = Vbar_R^H h_k; imperfect CSI adds the effective error covariance
/// blocks Ebar_k = Vbar_R^H E_k Vbar_R (empty when the CSI is perfect).
struct DigitalSubproblem {
  std::vector<Mat> rf;                        // [rrh], M x N
  std::vector<Vec> eff_channel;               // [ue], N*N_R
  std::vector<std::vector<Mat>> eff_err_cov;  // [ue][rrh], N x N; may be empty
  SurrogateState state;
  SystemConfig cfg;
  ObjectiveMode mode = ObjectiveMode::WsrSurrogate;

  bool imperfect() const { return !eff_err_cov.empty(); }
};

/// One channel sample with its frozen digital variables inside the RF
/// subproblem. `weight` is 1/T in WSR mode and beta_t/T in SAA-EE mode.
struct RfSample {
  std::vector<Vec> h;        // [ue], stacked M*N_R true channel
  std::vector<Vec> digital;  // [ue], frozen v_{D,k}
  std::vector<Mat> omega;    // [rrh], frozen Omega_i
  SurrogateState state;      // u, w_tilde (+ rho in EE mode)
  double weight = 1.0;
};

/// Convex subproblem over the relaxed RF matrices (|entry| <= 1) at frozen
/// digital variables; the objective averages the per-sample surrogates and
/// the per-RRH power constraint is enforced for every sample.
struct RfSubproblem {
  std::vector<RfSample> samples;
  SystemConfig cfg;
  ObjectiveMode mode = ObjectiveMode::WsrSurrogate;
};

/// Strictly feasible digital starting point: v = 0 and Omega_i = c_i * I,
/// c_i sized to keep the power at half budget. Throws std::invalid_argument
/// when no interior point exists (negative fronthaul capacity).
DigitalVars feasible_digital_init(const std::vector<Mat>& rf,
                                  const SystemConfig& cfg);

/// Lagrangian dual solver for the digital subproblem: closed-form
/// stationarity updates for each v_k (Hermitian solve) and each Omega_i
/// (matrix inversion), with per-constraint bisection of the multipliers to
/// complementary slackness in RRH index order (lambda_i, then mu_i).
/// EE mode adds one scalar auxiliary (the reciprocal of the rate surrogate)
/// resolved by bisection inside every multiplier evaluation. Falls back to a
/// log-barrier ascent when the dual loop misses the KKT tolerance.
std::pair<DigitalVars, SolveReport> solve_digital(
    const DigitalSubproblem& spec,
    const DigitalVars* warm_start = nullptr);

/// Dual solver for the relaxed RF subproblem: power multipliers bisected per
/// (RRH, sample), inner solves by cyclic coordinate descent over the entries
/// of V_R (each entry has a closed-form disk-constrained minimizer).
std::pair<std::vector<Mat>, SolveReport> solve_rf_relaxed(
    const RfSubproblem& spec, const std::vector<Mat>& warm_start);

/// KKT residual of a candidate point for either subproblem. Multipliers are
/// fitted internally by nonnegative least squares on the stationarity
/// system; components are reported separately in the breakdown.
KktBreakdown kkt_residual(const DigitalSubproblem& spec,
                          const DigitalVars& candidate);
KktBreakdown kkt_residual(const RfSubproblem& spec,
                          const std::vector<Mat>& candidate);

// Surrogate objective values used by the solvers and the tests.
double digital_objective(const DigitalSubproblem& spec,
                         const DigitalVars& vars);
double rf_objective(const RfSubproblem& spec, const std::vector<Mat>& rf);

}  // namespace cranhb::convex
