// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#include "cranhb/metrics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "cranhb/linalg.hpp"

namespace cranhb::metrics {

namespace {

constexpr double kLn2 = std::numbers::ln2;

double log2_safe(double x) { return std::log(x) / kLn2; }

// sum_k Xi_i^H v_k v_k^H Xi_i, the covariance of the RRH-i digital signal.
Mat signal_covariance(const std::vector<Vec>& digital, int rrh, int rf_chains) {
  Mat s = Mat::Zero(rf_chains, rf_chains);
  for (const Vec& v : digital) {
    const auto d = v.segment(rrh * rf_chains, rf_chains);
    s.noalias() += d * d.adjoint();
  }
  return s;
}

}  // namespace

double interference_power(const Vec& h_stacked, const HybridSolution& sol,
                          int ue, double dl_noise_var) {
  const Vec a = sol.effective_channel(h_stacked);
  double acc = dl_noise_var;
  for (int l = 0; l < sol.num_ue(); ++l) {
    if (l == ue) continue;
    acc += std::norm(a.dot(sol.digital[l]));
  }
  const int n = sol.rf_chains();
  for (int i = 0; i < sol.num_rrh(); ++i) {
    const auto a_i = a.segment(i * n, n);
    acc += (a_i.adjoint() * sol.omega[i] * a_i).real()(0, 0);
  }
  return acc;
}

double user_rate(const Vec& h_stacked, const HybridSolution& sol, int ue,
                 double dl_noise_var) {
  const Vec a = sol.effective_channel(h_stacked);
  const double sig = std::norm(a.dot(sol.digital[ue]));
  const double zeta = interference_power(h_stacked, sol, ue, dl_noise_var);
  return log2_safe(1.0 + sig / zeta);
}

double weighted_sum_rate(const std::vector<Vec>& h_stacked,
                         const HybridSolution& sol,
                         const std::vector<double>& weights,
                         double dl_noise_var) {
  double acc = 0.0;
  for (int k = 0; k < sol.num_ue(); ++k) {
    acc += weights[k] * user_rate(h_stacked[k], sol, k, dl_noise_var);
  }
  return acc;
}

double fronthaul_rate(const std::vector<Vec>& digital, const Mat& omega_i,
                      int rrh, int rf_chains) {
  const Mat s = signal_covariance(digital, rrh, rf_chains);
  const double ld_total = linalg::logdet_hermitian(s + omega_i);
  const double ld_omega = linalg::logdet_hermitian(omega_i);
  return (ld_total - ld_omega) / kLn2;
}

double rrh_power(const Mat& rf_i, const std::vector<Vec>& digital,
                 const Mat& omega_i, int rrh) {
  const int n = static_cast<int>(rf_i.cols());
  double acc = 0.0;
  for (const Vec& v : digital) {
    acc += (rf_i * v.segment(rrh * n, n)).squaredNorm();
  }
  acc += (rf_i * omega_i * rf_i.adjoint()).trace().real();
  return acc;
}

double total_power(const HybridSolution& sol, const SystemConfig& cfg) {
  double acc = cfg.static_power();
  for (int i = 0; i < sol.num_rrh(); ++i) {
    acc += rrh_power(sol.rf[i], sol.digital, sol.omega[i], i);
  }
  return acc;
}

Cplx mmse_receiver(const Vec& h_stacked, const HybridSolution& sol, int ue,
                   double dl_noise_var) {
  const Vec a = sol.effective_channel(h_stacked);
  const Cplx sig = a.dot(sol.digital[ue]);  // h^H Vbar v_k
  const double zeta = interference_power(h_stacked, sol, ue, dl_noise_var);
  return sig / (std::norm(sig) + zeta);
}

double mse(const Vec& h_stacked, const HybridSolution& sol, int ue, Cplx u,
           double dl_noise_var) {
  const Vec a = sol.effective_channel(h_stacked);
  const Cplx sig = a.dot(sol.digital[ue]);
  const double zeta = interference_power(h_stacked, sol, ue, dl_noise_var);
  return std::norm(1.0 - std::conj(u) * sig) + std::norm(u) * zeta;
}

double surrogate_wsr(const std::vector<Vec>& h_stacked,
                     const HybridSolution& sol, const SurrogateState& state,
                     const std::vector<double>& weights, double dl_noise_var) {
  double acc = 0.0;
  for (int k = 0; k < sol.num_ue(); ++k) {
    const double e_k = mse(h_stacked[k], sol, k, state.u[k], dl_noise_var);
    const double gamma =
        std::log(state.w_tilde[k]) - state.w_tilde[k] * e_k + 1.0;
    acc += weights[k] * gamma;
  }
  return acc / kLn2;
}

double fronthaul_surrogate(const std::vector<Vec>& digital, const Mat& omega_i,
                           const Mat& sigma_i, int rrh, int rf_chains) {
  if (linalg::eig_min(sigma_i) <= 0.0) {
    throw std::invalid_argument("fronthaul_surrogate: Sigma must be PD");
  }
  const Mat s = signal_covariance(digital, rrh, rf_chains);
  const double ld_sigma = linalg::logdet_hermitian(sigma_i);
  const double ld_omega = linalg::logdet_hermitian(omega_i);
  const Mat sigma_inv = linalg::ridge_inverse(sigma_i);
  const double tr = (sigma_inv * (s + omega_i)).trace().real();
  return (ld_sigma - ld_omega + tr) / kLn2 -
         static_cast<double>(rf_chains) / kLn2;
}

Mat tight_sigma(const std::vector<Vec>& digital, const Mat& omega_i, int rrh,
                int rf_chains) {
  return signal_covariance(digital, rrh, rf_chains) + omega_i;
}

double ee_surrogate(const std::vector<Vec>& h_stacked,
                    const HybridSolution& sol, const SurrogateState& state,
                    const std::vector<double>& weights,
                    const SystemConfig& cfg) {
  const double inner =
      surrogate_wsr(h_stacked, sol, state, weights, cfg.dl_noise_var);
  if (inner <= 0.0) return -std::numeric_limits<double>::max();
  const double pt = total_power(sol, cfg);
  return std::log(inner) - std::log(state.rho) - pt / state.rho + 1.0;
}

double interference_power_imperfect(const Vec& h_hat_stacked,
                                    const std::vector<Mat>& err_cov_blocks,
                                    const HybridSolution& sol, int ue,
                                    double dl_noise_var) {
  double acc = interference_power(h_hat_stacked, sol, ue, dl_noise_var);
  // Estimation-error terms: sum_l v_l^H Vbar^H E_k Vbar v_l and
  // tr(Vbar^H E_k Vbar Omegabar), assembled per RRH block.
  const int n = sol.rf_chains();
  for (int i = 0; i < sol.num_rrh(); ++i) {
    const Mat eff = sol.rf[i].adjoint() * err_cov_blocks[i] * sol.rf[i];
    for (int l = 0; l < sol.num_ue(); ++l) {
      const auto d = sol.digital[l].segment(i * n, n);
      acc += (d.adjoint() * eff * d).real()(0, 0);
    }
    acc += (eff * sol.omega[i]).trace().real();
  }
  return acc;
}

double user_rate_imperfect(const Vec& h_hat_stacked,
                           const std::vector<Mat>& err_cov_blocks,
                           const HybridSolution& sol, int ue,
                           double dl_noise_var) {
  const Vec a = sol.effective_channel(h_hat_stacked);
  const double sig = std::norm(a.dot(sol.digital[ue]));
  const double zeta = interference_power_imperfect(h_hat_stacked,
                                                   err_cov_blocks, sol, ue,
                                                   dl_noise_var);
  return log2_safe(1.0 + sig / zeta);
}

FeasibilityReport audit_solution(const HybridSolution& sol,
                                 const SystemConfig& cfg,
                                 bool require_unit_modulus) {
  FeasibilityReport rep;
  if (require_unit_modulus) {
    for (const Mat& v : sol.rf) {
      if (((v.cwiseAbs().array() - 1.0).abs() > 1e-12).any()) {
        rep.unit_modulus_ok = false;
        break;
      }
    }
  }
  rep.max_fronthaul_slack = -std::numeric_limits<double>::infinity();
  rep.max_power_slack = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < sol.num_rrh(); ++i) {
    if (linalg::eig_min(sol.omega[i]) <= -1e-10) rep.omega_pd_ok = false;
    double g = 0.0;
    try {
      g = fronthaul_rate(sol.digital, sol.omega[i], i, sol.rf_chains());
    } catch (const NumericalFailure&) {
      rep.omega_pd_ok = false;
      g = std::numeric_limits<double>::infinity();
    }
    const double p = rrh_power(sol.rf[i], sol.digital, sol.omega[i], i);
    rep.max_fronthaul_slack =
        std::max(rep.max_fronthaul_slack, g - cfg.fronthaul_capacity[i]);
    rep.max_power_slack = std::max(rep.max_power_slack, p - cfg.tx_power_limit[i]);
  }
  rep.fronthaul_ok = rep.max_fronthaul_slack <= 1e-6;
  rep.power_ok = rep.max_power_slack <= 1e-6;
  return rep;
}

}  // namespace cranhb::metrics
