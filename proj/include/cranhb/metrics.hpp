// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cranhb/types.hpp"

namespace cranhb::metrics {

// Interference-plus-noise power at UE k:
//   zeta_k = sum_{l != k} |h^H Vbar v_l|^2 + h^H Vbar Omegabar Vbar^H h
//            + dl_noise_var.
double interference_power(const Vec& h_stacked, const HybridSolution& sol,
                          int ue, double dl_noise_var);

// Achievable rate log2(1 + |h^H Vbar v_k|^2 / zeta_k), bits/s/Hz.
double user_rate(const Vec& h_stacked, const HybridSolution& sol, int ue,
                 double dl_noise_var);

// Weighted sum rate over all UEs of a channel given as stacked vectors.
double weighted_sum_rate(const std::vector<Vec>& h_stacked,
                         const HybridSolution& sol,
                         const std::vector<double>& weights,
                         double dl_noise_var);

// Fronthaul load of RRH i:
//   g_i = log2 det(sum_k Xi_i^H v_k v_k^H Xi_i + Omega_i) - log2 det(Omega_i).
// Omega_i must be PD after the standard 1e-12 nudge; otherwise throws
// NumericalFailure.
double fronthaul_rate(const std::vector<Vec>& digital, const Mat& omega_i,
                      int rrh, int rf_chains);

// Transmit power of RRH i:
//   p_i = sum_k ||V_{R,i} Xi_i^H v_k||^2 + tr(V_{R,i} Omega_i V_{R,i}^H).
double rrh_power(const Mat& rf_i, const std::vector<Vec>& digital,
                 const Mat& omega_i, int rrh);

// Total consumed power: sum_i p_i + N_U*P_NU + N*N_R*P_RF.
double total_power(const HybridSolution& sol, const SystemConfig& cfg);

// MMSE receive scalar u~_k = (h^H Vbar v_k) / (|h^H Vbar v_k|^2 + zeta_k).
Cplx mmse_receiver(const Vec& h_stacked, const HybridSolution& sol, int ue,
                   double dl_noise_var);

// MSE e_k = |1 - u^* h^H Vbar v_k|^2 + |u|^2 zeta_k for a given receiver u.
double mse(const Vec& h_stacked, const HybridSolution& sol, int ue, Cplx u,
           double dl_noise_var);

// Rate lower bound sum_k (w_k/ln2) gamma_k with
// gamma_k = ln w~_k - w~_k e_k + 1; <= weighted_sum_rate for any state with
// w~_k > 0, tight at u = u~ and w~ = 1/e.
double surrogate_wsr(const std::vector<Vec>& h_stacked,
                     const HybridSolution& sol, const SurrogateState& state,
                     const std::vector<double>& weights, double dl_noise_var);

// Fronthaul upper bound
//   g~_i = log2 det(Sigma_i) - log2 det(Omega_i)
//          + tr(Sigma_i^{-1}(S_i + Omega_i))/ln2 - N/ln2,
// >= g_i for any PD Sigma_i, tight at Sigma_i = S_i + Omega_i.
double fronthaul_surrogate(const std::vector<Vec>& digital, const Mat& omega_i,
                           const Mat& sigma_i, int rrh, int rf_chains);

// The Sigma that makes the fronthaul bound tight: S_i + Omega_i.
Mat tight_sigma(const std::vector<Vec>& digital, const Mat& omega_i, int rrh,
                int rf_chains);

// EE lower bound
//   eps = ln(sum_k (w_k/ln2) gamma_k) - ln rho - P_T/rho + 1
// <= ln(WSR) - ln(P_T); returns the largest-negative finite double when the
// inner sum is nonpositive so that line searches stay total.
double ee_surrogate(const std::vector<Vec>& h_stacked,
                    const HybridSolution& sol, const SurrogateState& state,
                    const std::vector<double>& weights,
                    const SystemConfig& cfg);

// Rate with channel estimation error treated as extra Gaussian noise. The
// error covariance enters as the per-RRH blocks E[k][i]; reduces to
// user_rate on (h_hat, sol) when every block is zero.
double user_rate_imperfect(const Vec& h_hat_stacked,
                           const std::vector<Mat>& err_cov_blocks,
                           const HybridSolution& sol, int ue,
                           double dl_noise_var);

double interference_power_imperfect(const Vec& h_hat_stacked,
                                    const std::vector<Mat>& err_cov_blocks,
                                    const HybridSolution& sol, int ue,
                                    double dl_noise_var);

// Feasibility audit of a finished solution against the original constraints.
struct FeasibilityReport {
  bool unit_modulus_ok = true;   // checked only if require_unit_modulus
  bool fronthaul_ok = true;      // g_i <= C_i + 1e-6
  bool power_ok = true;          // p_i <= P_i + 1e-6
  bool omega_pd_ok = true;       // eigmin(Omega_i) > -1e-10
  double max_fronthaul_slack = 0.0;  // max_i (g_i - C_i)
  double max_power_slack = 0.0;      // max_i (p_i - P_i)
  bool ok() const {
    return unit_modulus_ok && fronthaul_ok && power_ok && omega_pd_ok;
  }
};
FeasibilityReport audit_solution(const HybridSolution& sol,
                                 const SystemConfig& cfg,
                                 bool require_unit_modulus);

}  // namespace cranhb::metrics
