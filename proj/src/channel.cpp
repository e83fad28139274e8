// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#include "cranhb/channel.hpp"

#include <cmath>
#include <numbers>

#include "cranhb/linalg.hpp"

namespace cranhb::channel {

namespace {

constexpr int kQuadratureNodes = 64;

struct GaussLegendre {
  std::array<double, kQuadratureNodes> node;
  std::array<double, kQuadratureNodes> weight;
};

// Nodes and weights on [-1, 1] by Newton iteration on P_n; accurate to
// machine precision for n = 64.
const GaussLegendre& gauss_legendre() {
  static const GaussLegendre table = [] {
    GaussLegendre t{};
    const int n = kQuadratureNodes;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      t.node[i] = -x;
      t.node[n - 1 - i] = x;
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      t.weight[i] = w;
      t.weight[n - 1 - i] = w;
    }
    return t;
  }();
  return table;
}

}  // namespace

Mat build_covariance(double theta, double delta, int m_antennas) {
  if (delta <= 0.0) throw std::invalid_argument("build_covariance: delta must be > 0");
  if (m_antennas < 1) throw std::invalid_argument("build_covariance: M must be >= 1");

  const auto& gl = gauss_legendre();
  // Toeplitz: entry (a,b) depends only on a-b. Precompute the weighted
  // phase samples once per lag.
  std::array<double, kQuadratureNodes> sin_phi;
  for (int j = 0; j < kQuadratureNodes; ++j) {
    sin_phi[j] = std::sin(theta + delta * gl.node[j]);
  }
  std::vector<Cplx> lag(m_antennas);
  lag[0] = Cplx(1.0, 0.0);  // unit-magnitude integrand on the diagonal
  for (int m = 1; m < m_antennas; ++m) {
    Cplx acc(0.0, 0.0);
    for (int j = 0; j < kQuadratureNodes; ++j) {
      const double phase = -std::numbers::pi * m * sin_phi[j];
      acc += gl.weight[j] * Cplx(std::cos(phase), std::sin(phase));
    }
    lag[m] = 0.5 * acc;  // (delta / (2 delta)) * sum w_j f(phi_j)
  }

  Mat r(m_antennas, m_antennas);
  for (int a = 0; a < m_antennas; ++a) {
    for (int b = 0; b < m_antennas; ++b) {
      const int m = a - b;
      r(a, b) = (m >= 0) ? lag[m] : std::conj(lag[-m]);
    }
  }
  return r;
}

CovarianceSet draw_covariance_set(const SystemConfig& cfg, Rng& rng) {
  const double pi = std::numbers::pi;
  CovarianceSet cov;
  cov.r.resize(cfg.num_ue);
  for (int k = 0; k < cfg.num_ue; ++k) {
    cov.r[k].resize(cfg.num_rrh);
    for (int i = 0; i < cfg.num_rrh; ++i) {
      const double theta = rng.uniform(-pi / 3.0, pi / 3.0);
      const double delta = rng.uniform(pi / 18.0, 2.0 * pi / 9.0);
      cov.r[k][i] = build_covariance(theta, delta, cfg.antennas_per_rrh);
    }
  }
  return cov;
}

ChannelRealization sample_channel(const CovarianceSet& cov, Rng& rng) {
  ChannelRealization ch;
  ch.h.resize(cov.num_ue());
  for (int k = 0; k < cov.num_ue(); ++k) {
    ch.h[k].resize(cov.num_rrh());
    for (int i = 0; i < cov.num_rrh(); ++i) {
      const Mat& r = cov.r[k][i];
      if ((r - r.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw std::invalid_argument("sample_channel: covariance not Hermitian");
      }
      Vec g(r.rows());
      rng.fill_cnormal(g);
      ch.h[k][i] = linalg::sqrt_psd(r) * g;
    }
  }
  return ch;
}

Mat pilot_matrix(int pilot_length, const std::vector<double>& ul_tx_power) {
  const int l = pilot_length;
  const int n_ue = static_cast<int>(ul_tx_power.size());
  if (l < n_ue) {
    throw std::invalid_argument("pilot_matrix: pilot_length must be >= num_ue");
  }
  // psi_k = sqrt(L p_k) * (unitary DFT column k), so Psi^H Psi = diag(L p_k).
  Mat psi(l, n_ue);
  for (int k = 0; k < n_ue; ++k) {
    const double amp = std::sqrt(ul_tx_power[k]);
    for (int m = 0; m < l; ++m) {
      const double phase = -2.0 * std::numbers::pi * m * k / l;
      psi(m, k) = amp * Cplx(std::cos(phase), std::sin(phase));
    }
  }
  return psi;
}

std::vector<Mat> uplink_train(const ChannelRealization& ch,
                              const std::vector<Mat>& rf,
                              const SystemConfig& cfg, Rng& rng) {
  if (cfg.pilot_length < cfg.num_ue) {
    throw std::invalid_argument("uplink_train: pilot_length must be >= num_ue");
  }
  const int m = cfg.antennas_per_rrh;
  const int l = cfg.pilot_length;
  const Mat psi = pilot_matrix(l, cfg.ul_tx_power);
  const double noise_amp = std::sqrt(cfg.ul_noise_var);

  std::vector<Mat> rx(cfg.num_rrh);
  for (int i = 0; i < cfg.num_rrh; ++i) {
    Mat h_i(m, cfg.num_ue);
    for (int k = 0; k < cfg.num_ue; ++k) h_i.col(k) = ch.h[k][i];
    Mat noise(m, l);
    rng.fill_cnormal(noise);
    rx[i] = rf[i].adjoint() * (h_i * psi.transpose() + noise_amp * noise);
  }
  return rx;
}

Mat error_covariance(const Mat& rf_i, const Mat& r_ki, int pilot_length,
                     double ul_power, double ul_noise_var) {
  const Mat gram = rf_i.adjoint() * rf_i;
  if (linalg::eig_min(gram) < 1e-12 * std::max(1.0, linalg::eig_max(gram))) {
    throw std::invalid_argument("error_covariance: rank-deficient RF matrix");
  }
  const Mat proj = rf_i * linalg::ridge_solve(gram, Mat(rf_i.adjoint()));
  const Mat r_half = linalg::sqrt_psd(r_ki);
  const Mat x = linalg::hermitize(r_half * proj * r_half);
  const Eigen::Index n = r_ki.rows();

  if (ul_noise_var <= 0.0) {
    // Infinite training SNR: (I + cX)^{-1} -> projector onto null(X); the
    // error that remains lives outside the RF-observable subspace.
    Eigen::SelfAdjointEigenSolver<Mat> es(x);
    RealVec gains(n);
    const double tol = 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff());
    for (Eigen::Index j = 0; j < n; ++j)
      gains(j) = (es.eigenvalues()(j) > tol) ? 0.0 : 1.0;
    const Mat inner = es.eigenvectors() *
                      gains.asDiagonal().toDenseMatrix().cast<Cplx>() *
                      es.eigenvectors().adjoint();
    return linalg::hermitize(r_half * inner * r_half);
  }

  const double c = pilot_length * ul_power / ul_noise_var;
  Mat inner = Mat::Identity(n, n) + c * x;
  const Mat inv = linalg::ridge_inverse(inner);
  return linalg::hermitize(r_half * inv * r_half);
}

ChannelEstimate mmse_estimate(const std::vector<Mat>& train_rx,
                              const std::vector<Mat>& rf,
                              const CovarianceSet& cov,
                              const SystemConfig& cfg) {
  const int m = cfg.antennas_per_rrh;
  const int n = cfg.rf_chains;
  const int l = cfg.pilot_length;
  const int n_ue = cfg.num_ue;
  const Mat psi = pilot_matrix(l, cfg.ul_tx_power);

  ChannelEstimate est;
  est.h_hat.assign(n_ue, std::vector<Vec>(cfg.num_rrh));
  est.err_cov.assign(n_ue, std::vector<Mat>(cfg.num_rrh));

  for (int i = 0; i < cfg.num_rrh; ++i) {
    // Per-RRH prior: vec(H_i) ~ CN(0, diag(R_{1,i}, ..., R_{N_U,i})).
    Mat r_i = Mat::Zero(m * n_ue, m * n_ue);
    for (int k = 0; k < n_ue; ++k)
      r_i.block(k * m, k * m, m, m) = cov.r[k][i];

    const Mat a = linalg::kron(psi, rf[i].adjoint());  // (LN) x (M N_U)
    Mat inner = a * r_i * a.adjoint() +
                linalg::kron(Mat::Identity(l, l),
                             cfg.ul_noise_var * (rf[i].adjoint() * rf[i]));
    Mat w;
    try {
      w = r_i * a.adjoint() * linalg::ridge_inverse(inner);
    } catch (const NumericalFailure& e) {
      throw NumericalFailure(
          "mmse_estimate: singular inner matrix after regularization (cond=" +
              std::to_string(e.condition_number) + ")",
          e.condition_number);
    }

    Vec y(n * l);
    for (int col = 0; col < l; ++col)
      y.segment(col * n, n) = train_rx[i].col(col);
    const Vec h_hat_i = w * y;
    for (int k = 0; k < n_ue; ++k) {
      est.h_hat[k][i] = h_hat_i.segment(k * m, m);
      est.err_cov[k][i] = error_covariance(rf[i], cov.r[k][i], l,
                                           cfg.ul_tx_power[k], cfg.ul_noise_var);
    }
  }
  return est;
}

}  // namespace cranhb::channel
