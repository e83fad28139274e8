// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cranhb/rng.hpp"
#include "cranhb/types.hpp"

namespace cranhb::channel {

/// Transmit correlation of a half-wavelength ULA seen under a scatter ring
/// at angle `theta` with spread `delta`:
///   R(a,b) = (1/2 delta) * integral_{theta-delta}^{theta+delta}
///            exp(-j*pi*(a-b)*sin(phi)) d phi.
/// Evaluated entrywise by 64-node Gauss-Legendre quadrature; the result is
/// Hermitian Toeplitz with exactly unit diagonal and PSD up to roundoff.
Mat build_covariance(double theta, double delta, int m_antennas);

/// Draws the per-(UE, RRH) correlation matrices with theta ~ U(-pi/3, pi/3)
/// and delta ~ U(pi/18, 2pi/9).
CovarianceSet draw_covariance_set(const SystemConfig& cfg, Rng& rng);

/// h[k][i] = R[k][i]^{1/2} g with g ~ CN(0, I); the square root comes from
/// an eigendecomposition with negative eigenvalues clamped to zero.
ChannelRealization sample_channel(const CovarianceSet& cov, Rng& rng);

/// L x N_U orthogonal pilot matrix: column k is the k-th column of the
/// L-point unitary DFT scaled by sqrt(L p_k), so Psi^H Psi = diag(L p_k).
Mat pilot_matrix(int pilot_length, const std::vector<double>& ul_tx_power);

/// Received training block per RRH: Y_i = V_{R,i}^H H_i Psi^T + V_{R,i}^H N_i
/// with N_i i.i.d. CN(0, sigma_U^2).
std::vector<Mat> uplink_train(const ChannelRealization& ch,
                              const std::vector<Mat>& rf,
                              const SystemConfig& cfg, Rng& rng);

/// Closed-form MMSE error covariance for one (UE, RRH) pair:
///   E = (I + (L p / sigma_U^2) R V (V^H V)^{-1} V^H)^{-1} R,
/// evaluated in the symmetric form R^{1/2}(I + c R^{1/2} P R^{1/2})^{-1} R^{1/2}
/// so the result is Hermitian PSD with E <= R by construction.
Mat error_covariance(const Mat& rf_i, const Mat& r_ki, int pilot_length,
                     double ul_power, double ul_noise_var);

/// Per-RRH linear MMSE estimation of all UE channels from the vectorized
/// training block, plus the closed-form error covariances.
/// The NL x NL inner matrix is ridge-regularized when ill-conditioned
/// (noiseless training with L > N_U makes it singular).
ChannelEstimate mmse_estimate(const std::vector<Mat>& train_rx,
                              const std::vector<Mat>& rf,
                              const CovarianceSet& cov,
                              const SystemConfig& cfg);

}  // namespace cranhb::channel
