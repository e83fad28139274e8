// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#include "cranhb/types.hpp"

#include "cranhb/linalg.hpp"

namespace cranhb {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void SystemConfig::validate() const {
  require(num_rrh >= 1, "num_rrh must be positive");
  require(num_ue >= 1, "num_ue must be positive");
  require(antennas_per_rrh >= 1, "antennas_per_rrh must be positive");
  require(rf_chains >= 1, "rf_chains must be positive");
  require(rf_chains <= antennas_per_rrh, "rf_chains must not exceed antennas_per_rrh");
  require(pilot_length >= num_ue, "pilot_length must be at least num_ue");
  require(static_cast<int>(fronthaul_capacity.size()) == num_rrh,
          "fronthaul_capacity must have one entry per RRH");
  require(static_cast<int>(tx_power_limit.size()) == num_rrh,
          "tx_power_limit must have one entry per RRH");
  require(static_cast<int>(ul_tx_power.size()) == num_ue,
          "ul_tx_power must have one entry per UE");
  require(static_cast<int>(weights.size()) == num_ue,
          "weights must have one entry per UE");
  for (double c : fronthaul_capacity) require(c >= 0.0, "fronthaul capacity must be >= 0");
  for (double p : tx_power_limit) require(p >= 0.0, "tx power limit must be >= 0");
  for (double p : ul_tx_power) require(p >= 0.0, "uplink tx power must be >= 0");
  for (double w : weights) require(w >= 0.0, "weights must be >= 0");
  require(dl_noise_var >= 0.0, "dl_noise_var must be >= 0");
  require(ul_noise_var >= 0.0, "ul_noise_var must be >= 0");
  require(circuit_power_per_rf >= 0.0, "circuit_power_per_rf must be >= 0");
  require(circuit_power_per_ue >= 0.0, "circuit_power_per_ue must be >= 0");
}

SystemConfig SystemConfig::uniform(int n_rrh, int n_ue, int m_antennas,
                                   int n_chains, double fronthaul,
                                   double tx_power, double dl_noise,
                                   double ul_noise) {
  SystemConfig cfg;
  cfg.num_rrh = n_rrh;
  cfg.num_ue = n_ue;
  cfg.antennas_per_rrh = m_antennas;
  cfg.rf_chains = n_chains;
  cfg.fronthaul_capacity.assign(n_rrh, fronthaul);
  cfg.tx_power_limit.assign(n_rrh, tx_power);
  cfg.dl_noise_var = dl_noise;
  cfg.ul_noise_var = ul_noise;
  cfg.pilot_length = n_ue;
  cfg.ul_tx_power.assign(n_ue, 1.0);
  cfg.weights.assign(n_ue, 1.0);
  cfg.validate();
  return cfg;
}

void CovarianceSet::validate() const {
  for (const auto& per_ue : r) {
    for (const auto& m : per_ue) {
      require(m.rows() == m.cols(), "covariance blocks must be square");
      const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
      require(asym <= 1e-12, "covariance block not Hermitian");
      require(linalg::eig_min(m) >= -1e-10, "covariance block not PSD");
      for (Eigen::Index d = 0; d < m.rows(); ++d) {
        require(std::abs(m(d, d) - Cplx(1.0, 0.0)) <= 1e-10,
                "covariance diagonal must be unit");
      }
    }
  }
}

Vec ChannelRealization::stacked(int ue) const {
  const auto& blocks = h[ue];
  Eigen::Index total = 0;
  for (const auto& b : blocks) total += b.size();
  Vec out(total);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.segment(at, b.size()) = b;
    at += b.size();
  }
  return out;
}

Vec ChannelEstimate::stacked(int ue) const {
  const auto& blocks = h_hat[ue];
  Eigen::Index total = 0;
  for (const auto& b : blocks) total += b.size();
  Vec out(total);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.segment(at, b.size()) = b;
    at += b.size();
  }
  return out;
}

Vec HybridSolution::effective_channel(const Vec& h_stacked) const {
  const int m = antennas();
  const int n = rf_chains();
  Vec eff(n * num_rrh());
  for (int i = 0; i < num_rrh(); ++i) {
    eff.segment(i * n, n) = rf[i].adjoint() * h_stacked.segment(i * m, m);
  }
  return eff;
}

HybridSolution HybridSolution::zero(const SystemConfig& cfg) {
  HybridSolution sol;
  sol.rf.assign(cfg.num_rrh, Mat::Zero(cfg.antennas_per_rrh, cfg.rf_chains));
  sol.digital.assign(cfg.num_ue, Vec::Zero(cfg.digital_dim()));
  sol.omega.assign(cfg.num_rrh, Mat::Zero(cfg.rf_chains, cfg.rf_chains));
  return sol;
}

}  // namespace cranhb
