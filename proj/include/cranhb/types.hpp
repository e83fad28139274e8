// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cranhb {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;

/// Thrown when a linear-algebra step cannot be completed even after
/// regularization. Carries a condition-number diagnostic when available.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what, double condition = -1.0)
      : std::runtime_error(what), condition_number(condition) {}
  double condition_number;
};

/// All scalar parameters of one deployment: a BBU driving num_rrh radio
/// heads, each with antennas_per_rrh antennas fed by rf_chains RF chains,
/// serving num_ue single-antenna UEs over finite-capacity fronthaul links.
struct SystemConfig {
  int num_rrh = 1;           // N_R
  int num_ue = 1;            // N_U
  int antennas_per_rrh = 1;  // M
  int rf_chains = 1;         // N, must satisfy N <= M

  std::vector<double> fronthaul_capacity;  // C_i [bits/s/Hz], one per RRH
  std::vector<double> tx_power_limit;      // P_i [linear], one per RRH

  double dl_noise_var = 1.0;  // sigma_D^2
  double ul_noise_var = 1.0;  // sigma_U^2

  int pilot_length = 1;             // L, must satisfy L >= num_ue
  std::vector<double> ul_tx_power;  // p_k [linear], one per UE

  double circuit_power_per_rf = 1.0;  // P_RF
  double circuit_power_per_ue = 1.0;  // P_NU

  std::vector<double> weights;  // w_k >= 0, one per UE

  // Dimension of the stacked digital beamformer (N * N_R).
  int digital_dim() const { return rf_chains * num_rrh; }
  // Static circuit power N_U*P_NU + N*N_R*P_RF.
  double static_power() const {
    return num_ue * circuit_power_per_ue +
           static_cast<double>(rf_chains) * num_rrh * circuit_power_per_rf;
  }

  /// Throws std::invalid_argument on any violated structural invariant.
  void validate() const;

  /// Uniform-parameter convenience constructor used throughout the tests.
  static SystemConfig uniform(int n_rrh, int n_ue, int m_antennas,
                              int n_chains, double fronthaul, double tx_power,
                              double dl_noise = 1.0, double ul_noise = 1.0);
};

/// Long-term transmit-side correlation matrices R[k][i], one M x M
/// Hermitian PSD matrix per (UE k, RRH i). Unit diagonal by construction.
struct CovarianceSet {
  std::vector<std::vector<Mat>> r;  // [ue][rrh]

  int num_ue() const { return static_cast<int>(r.size()); }
  int num_rrh() const { return r.empty() ? 0 : static_cast<int>(r[0].size()); }
  int antennas() const {
    return (num_ue() == 0 || num_rrh() == 0) ? 0
                                             : static_cast<int>(r[0][0].rows());
  }
  void validate() const;
};

/// One instantaneous channel draw: h[k][i] is the M-dim vector from RRH i
/// to UE k. stacked(k) is the (M*N_R)-dim concatenation in RRH index order.
struct ChannelRealization {
  std::vector<std::vector<Vec>> h;  // [ue][rrh]

  int num_ue() const { return static_cast<int>(h.size()); }
  int num_rrh() const { return h.empty() ? 0 : static_cast<int>(h[0].size()); }
  Vec stacked(int ue) const;
};

/// MMSE channel estimate with per-(UE, RRH) error covariance blocks.
/// The stacked error covariance E[k] is block-diagonal in the RRH blocks.
struct ChannelEstimate {
  std::vector<std::vector<Vec>> h_hat;    // [ue][rrh], M-dim estimates
  std::vector<std::vector<Mat>> err_cov;  // [ue][rrh], M x M Hermitian PSD

  int num_ue() const { return static_cast<int>(h_hat.size()); }
  int num_rrh() const {
    return h_hat.empty() ? 0 : static_cast<int>(h_hat[0].size());
  }
  Vec stacked(int ue) const;
};

/// The joint optimization variables: per-RRH analog RF matrix (M x N),
/// per-UE stacked digital beamformer (N*N_R), per-RRH quantization noise
/// covariance (N x N Hermitian PSD).
struct HybridSolution {
  std::vector<Mat> rf;       // V_{R,i}, [rrh]
  std::vector<Vec> digital;  // v_{D,k}, [ue]
  std::vector<Mat> omega;    // Omega_i, [rrh]

  int num_rrh() const { return static_cast<int>(rf.size()); }
  int num_ue() const { return static_cast<int>(digital.size()); }
  int rf_chains() const { return rf.empty() ? 0 : static_cast<int>(rf[0].cols()); }
  int antennas() const { return rf.empty() ? 0 : static_cast<int>(rf[0].rows()); }

  // Block i of the stacked digital beamformer for UE k (the Xi_i^H v_k
  // selector).
  Eigen::VectorBlock<const Vec> digital_block(int ue, int rrh) const {
    const int n = rf_chains();
    return digital[ue].segment(rrh * n, n);
  }

  // Effective channel a_k = Vbar_R^H h_k for a stacked channel vector,
  // assembled per RRH block without forming the block-diagonal matrix.
  Vec effective_channel(const Vec& h_stacked) const;

  static HybridSolution zero(const SystemConfig& cfg);
};

/// WMMSE auxiliary variables frozen during one inner convex solve:
/// scalar receivers u_k, positive weights w~_k, per-RRH fronthaul
/// linearization points Sigma_i, and the scalar power linearization rho
/// (EE objective only). alpha/beta appear only in the SAA-EE design.
struct SurrogateState {
  std::vector<Cplx> u;            // [ue]
  std::vector<double> w_tilde;    // [ue], > 0
  std::vector<Mat> sigma;         // [rrh], N x N Hermitian PD
  double rho = 0.0;               // > 0 in EE mode
  std::vector<double> alpha;      // [sample], SAA-EE only
  std::vector<double> beta;       // [sample], > 0, SAA-EE only
};

}  // namespace cranhb
