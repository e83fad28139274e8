// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cranhb/channel.hpp"
#include "cranhb/linalg.hpp"
#include "oracles.hpp"

using namespace cranhb;
namespace ch = cranhb::channel;

namespace {

constexpr double kPi = std::numbers::pi;

Mat empirical_covariance(const std::vector<Vec>& draws) {
  const Eigen::Index n = draws[0].size();
  Mat acc = Mat::Zero(n, n);
  for (const Vec& v : draws) acc.noalias() += v * v.adjoint();
  return acc / static_cast<double>(draws.size());
}

}  // namespace

TEST_CASE("build_covariance: unit diagonal and Hermitian structure") {
  const Mat r = ch::build_covariance(0.7, 0.2, 5);
  for (int d = 0; d < 5; ++d) {
    CHECK(r(d, d) == Cplx(1.0, 0.0));  // unit-magnitude integrand on diagonal
  }
  CHECK((r - r.adjoint()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("build_covariance: vanishing spread collapses to a steering outer product") {
  const double theta = -0.4;
  const Mat r = ch::build_covariance(theta, 1e-9, 4);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const double phase = -kPi * (a - b) * std::sin(theta);
      CHECK(std::abs(r(a, b) - Cplx(std::cos(phase), std::sin(phase))) <= 1e-8);
    }
  }
  // Rank-one: second eigenvalue ~ 0.
  Eigen::SelfAdjointEigenSolver<Mat> es(r);
  CHECK(es.eigenvalues()(2) <= 1e-8);
}

TEST_CASE("build_covariance: matches adaptive quadrature entrywise") {
  const double theta = 0.5, delta = 0.3;
  const int m = 4;
  const Mat r = ch::build_covariance(theta, delta, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const Cplx expect =
          oracle::adaptive_simpson(
              [&](double phi) {
                const double p = -kPi * (a - b) * std::sin(phi);
                return Cplx(std::cos(p), std::sin(p));
              },
              theta - delta, theta + delta) /
          (2.0 * delta);
      CHECK(std::abs(r(a, b) - expect) <= 1e-10);
    }
  }
}

TEST_CASE("build_covariance: rejects bad parameters") {
  CHECK_THROWS_AS(ch::build_covariance(0.1, 0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(ch::build_covariance(0.1, -0.2, 4), std::invalid_argument);
  CHECK_THROWS_AS(ch::build_covariance(0.1, 0.2, 0), std::invalid_argument);
}

TEST_CASE("build_covariance: randomized Hermitian/unit-diagonal/PSD property") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const double theta = rng.uniform(-kPi / 2 + 0.01, kPi / 2 - 0.01);
    const double delta = rng.uniform(1e-3, kPi / 2 - 1e-3);
    const int m = 2 + static_cast<int>(rng.uniform(0.0, 5.0));
    const Mat r = ch::build_covariance(theta, delta, m);
    CHECK((r - r.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
    for (int d = 0; d < m; ++d) CHECK(std::abs(r(d, d) - Cplx(1, 0)) <= 1e-10);
    CHECK(linalg::eig_min(r) >= -1e-10);
  }
}

TEST_CASE("sample_channel: zero covariance gives zero channels") {
  CovarianceSet cov;
  cov.r = {{Mat::Zero(3, 3)}};
  Rng rng(5);
  const auto draw = ch::sample_channel(cov, rng);
  CHECK(draw.h[0][0].norm() == 0.0);
}

TEST_CASE("sample_channel: rejects non-Hermitian input") {
  CovarianceSet cov;
  Mat bad = Mat::Zero(2, 2);
  bad(0, 1) = Cplx(1.0, 0.0);  // asymmetric
  cov.r = {{bad}};
  Rng rng(5);
  CHECK_THROWS_AS(ch::sample_channel(cov, rng), std::invalid_argument);
}

TEST_CASE("sample_channel: empirical covariance concentrates (identity and generic)") {
  const int m = 4;
  const int draws = 100000;
  for (int which = 0; which < 2; ++which) {
    const Mat r = (which == 0) ? Mat(Mat::Identity(m, m))
                               : ch::build_covariance(0.3, 0.25, m);
    CovarianceSet cov;
    cov.r = {{r}};
    Rng rng(1000 + which);
    std::vector<Vec> hs;
    hs.reserve(draws);
    for (int d = 0; d < draws; ++d) hs.push_back(ch::sample_channel(cov, rng).h[0][0]);
    const Mat emp = empirical_covariance(hs);
    CHECK((emp - r).norm() <= 0.05 * m);
  }
}

TEST_CASE("pilot_matrix: exact column orthogonality Psi^H Psi = diag(L p_k)") {
  const std::vector<double> p = {1.0, 2.5, 0.5};
  const int l = 5;
  const Mat psi = ch::pilot_matrix(l, p);
  const Mat gram = psi.adjoint() * psi;
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < 3; ++j) {
      const Cplx expect = (k == j) ? Cplx(l * p[k], 0.0) : Cplx(0.0, 0.0);
      CHECK(std::abs(gram(k, j) - expect) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(ch::pilot_matrix(2, p), std::invalid_argument);
}

namespace {

SystemConfig small_training_config(double ul_noise) {
  SystemConfig cfg = SystemConfig::uniform(/*n_rrh=*/1, /*n_ue=*/2,
                                           /*m=*/4, /*n=*/2,
                                           /*fronthaul=*/5.0, /*power=*/10.0,
                                           /*dl_noise=*/1.0, ul_noise);
  cfg.pilot_length = 3;
  cfg.ul_tx_power = {1.0, 1.7};
  return cfg;
}

std::vector<Mat> unit_modulus_rf(const SystemConfig& cfg, Rng& rng) {
  std::vector<Mat> rf(cfg.num_rrh);
  for (int i = 0; i < cfg.num_rrh; ++i) {
    Mat v(cfg.antennas_per_rrh, cfg.rf_chains);
    for (int a = 0; a < cfg.antennas_per_rrh; ++a) {
      for (int b = 0; b < cfg.rf_chains; ++b) {
        const double ph = rng.uniform(0.0, 2 * kPi);
        v(a, b) = Cplx(std::cos(ph), std::sin(ph));
      }
    }
    rf[i] = v;
  }
  return rf;
}

}  // namespace

TEST_CASE("uplink_train: noiseless pilots invert exactly") {
  SystemConfig cfg = small_training_config(0.0);
  Rng rng(42);
  Rng cov_rng = rng.child("cov");
  const auto cov = ch::draw_covariance_set(cfg, cov_rng);
  Rng ch_rng = rng.child("ch");
  const auto draw = ch::sample_channel(cov, ch_rng);
  Rng rf_rng = rng.child("rf");
  const auto rf = unit_modulus_rf(cfg, rf_rng);
  Rng tr_rng = rng.child("train");
  const auto rx = ch::uplink_train(draw, rf, cfg, tr_rng);

  const Mat psi = ch::pilot_matrix(cfg.pilot_length, cfg.ul_tx_power);
  // Y Psi^* (Psi^H Psi)^{-1} recovers V^H H when the noise is zero.
  const Mat gram_inv = (psi.adjoint() * psi).inverse();
  const Mat recovered = rx[0] * psi.conjugate() * gram_inv;
  Mat h0(cfg.antennas_per_rrh, cfg.num_ue);
  for (int k = 0; k < cfg.num_ue; ++k) h0.col(k) = draw.h[k][0];
  const Mat expect = rf[0].adjoint() * h0;
  CHECK((recovered - expect).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("uplink_train: zero channel leaves pure projected noise") {
  SystemConfig cfg = small_training_config(2.0);
  CovarianceSet cov;
  cov.r.assign(cfg.num_ue, std::vector<Mat>(1, Mat::Zero(4, 4)));
  Rng rng(7);
  const auto draw = ch::sample_channel(cov, rng);
  Rng rf_rng = rng.child("rf");
  const auto rf = unit_modulus_rf(cfg, rf_rng);

  const int reps = 10000;
  Mat acc = Mat::Zero(cfg.rf_chains, cfg.rf_chains);
  Rng tr_rng = rng.child("train");
  for (int r = 0; r < reps; ++r) {
    Rng rr = tr_rng.child(static_cast<std::uint64_t>(r));
    const auto rx = ch::uplink_train(draw, rf, cfg, rr);
    for (int col = 0; col < cfg.pilot_length; ++col) {
      acc.noalias() += rx[0].col(col) * rx[0].col(col).adjoint();
    }
  }
  acc /= static_cast<double>(reps * cfg.pilot_length);
  const Mat expect = cfg.ul_noise_var * (rf[0].adjoint() * rf[0]);
  CHECK((acc - expect).norm() <= 0.05 * expect.norm());
}

TEST_CASE("error_covariance: no-information limit returns R") {
  Rng rng(9);
  SystemConfig cfg = small_training_config(1e18);
  Rng rf_rng = rng.child("rf");
  const auto rf = unit_modulus_rf(cfg, rf_rng);
  const Mat r = ch::build_covariance(0.2, 0.3, 4);
  const Mat e = ch::error_covariance(rf[0], r, cfg.pilot_length, 1.0, 1e18);
  CHECK((e - r).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("error_covariance: identity prior with orthonormal RF matches Woodbury form") {
  const int m = 4, n = 2;
  // Orthonormal columns.
  Mat v(m, n);
  v.setZero();
  v(0, 0) = 1.0;
  v(2, 1) = 1.0;
  const double lp = 3.0, sigma2 = 0.5;
  const double c = lp / sigma2;
  const Mat e = ch::error_covariance(v, Mat::Identity(m, m),
                                     /*pilot_length=*/3, /*ul_power=*/1.0, sigma2);
  const Mat expect = Mat::Identity(m, m) - (c / (1.0 + c)) * (v * v.adjoint());
  CHECK((e - expect).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("error_covariance: rejects rank-deficient RF") {
  Mat v(3, 2);
  v.setZero();
  v.col(0).setOnes();
  v.col(1) = 2.0 * v.col(0);
  CHECK_THROWS_AS(ch::error_covariance(v, Mat::Identity(3, 3), 2, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("error_covariance: 0 <= E <= R for random unit-modulus RF") {
  Rng rng(1234);
  for (int trial = 0; trial < 30; ++trial) {
    SystemConfig cfg = small_training_config(rng.uniform(0.1, 3.0));
    Rng rf_rng = rng.child(static_cast<std::uint64_t>(trial));
    const auto rf = unit_modulus_rf(cfg, rf_rng);
    const Mat r = ch::build_covariance(rng.uniform(-1.0, 1.0),
                                       rng.uniform(0.1, 0.6), 4);
    const Mat e = ch::error_covariance(rf[0], r, cfg.pilot_length, 1.0,
                                       cfg.ul_noise_var);
    CHECK(linalg::eig_min(e) >= -1e-8);
    CHECK(linalg::eig_min(Mat(r - e)) >= -1e-8);
  }
}

TEST_CASE("mmse_estimate: estimator gain vanishes as the noise explodes") {
  // The estimate magnitude scales like 1/sigma_U, so push the variance far
  // enough that the relative norm is unambiguous.
  for (double noise_var : {1e12, 1e16}) {
    SystemConfig cfg = small_training_config(noise_var);
    Rng rng(11);
    Rng cov_rng = rng.child("cov");
    const auto cov = ch::draw_covariance_set(cfg, cov_rng);
    Rng ch_rng = rng.child("ch");
    const auto draw = ch::sample_channel(cov, ch_rng);
    Rng rf_rng = rng.child("rf");
    const auto rf = unit_modulus_rf(cfg, rf_rng);
    Rng tr_rng = rng.child("train");
    const auto rx = ch::uplink_train(draw, rf, cfg, tr_rng);
    const auto est = ch::mmse_estimate(rx, rf, cov, cfg);
    const double rel_bound = (noise_var >= 1e16) ? 1e-6 : 1e-4;
    for (int k = 0; k < cfg.num_ue; ++k) {
      CHECK(est.h_hat[k][0].norm() <= rel_bound * draw.h[k][0].norm());
    }
  }
}

TEST_CASE("mmse_estimate: noiseless limit recovers the effective channel") {
  SystemConfig cfg = small_training_config(1e-14);
  Rng rng(13);
  Rng cov_rng = rng.child("cov");
  const auto cov = ch::draw_covariance_set(cfg, cov_rng);
  Rng ch_rng = rng.child("ch");
  const auto draw = ch::sample_channel(cov, ch_rng);
  Rng rf_rng = rng.child("rf");
  const auto rf = unit_modulus_rf(cfg, rf_rng);
  Rng tr_rng = rng.child("train");
  const auto rx = ch::uplink_train(draw, rf, cfg, tr_rng);
  const auto est = ch::mmse_estimate(rx, rf, cov, cfg);

  // Independent recovery through the pilot pseudo-inverse.
  const Mat psi = ch::pilot_matrix(cfg.pilot_length, cfg.ul_tx_power);
  const Mat gram_inv = (psi.adjoint() * psi).inverse();
  const Mat direct = rx[0] * psi.conjugate() * gram_inv;  // = V^H H exactly

  for (int k = 0; k < cfg.num_ue; ++k) {
    const Vec eff_est = rf[0].adjoint() * est.h_hat[k][0];
    const Vec eff_true = rf[0].adjoint() * draw.h[k][0];
    CHECK((eff_est - eff_true).norm() <= 1e-6 * eff_true.norm());
    CHECK((Vec(direct.col(k)) - eff_true).norm() <= 1e-6 * eff_true.norm());
  }
}

TEST_CASE("mmse_estimate: linear in the received signal") {
  SystemConfig cfg = small_training_config(0.8);
  Rng rng(17);
  Rng cov_rng = rng.child("cov");
  const auto cov = ch::draw_covariance_set(cfg, cov_rng);
  Rng ch_rng = rng.child("ch");
  const auto draw = ch::sample_channel(cov, ch_rng);
  Rng rf_rng = rng.child("rf");
  const auto rf = unit_modulus_rf(cfg, rf_rng);
  Rng tr_rng = rng.child("train");
  auto rx = ch::uplink_train(draw, rf, cfg, tr_rng);
  const auto est1 = ch::mmse_estimate(rx, rf, cov, cfg);
  const Cplx scale(2.0, -1.0);
  for (auto& y : rx) y *= scale;
  const auto est2 = ch::mmse_estimate(rx, rf, cov, cfg);
  for (int k = 0; k < cfg.num_ue; ++k) {
    CHECK((est2.h_hat[k][0] - scale * est1.h_hat[k][0]).cwiseAbs().maxCoeff() <=
          1e-12 * (1.0 + est1.h_hat[k][0].norm()));
  }
}

TEST_CASE("mmse_estimate: orthogonality principle and closed-form error covariance") {
  SystemConfig cfg = small_training_config(0.5);
  Rng rng(19);
  Rng cov_rng = rng.child("cov");
  const auto cov = ch::draw_covariance_set(cfg, cov_rng);
  Rng rf_rng = rng.child("rf");
  const auto rf = unit_modulus_rf(cfg, rf_rng);

  const int m = cfg.antennas_per_rrh;
  const int nl = cfg.rf_chains * cfg.pilot_length;
  const int draws = 100000;
  std::vector<Mat> err_acc(cfg.num_ue, Mat::Zero(m, m));
  std::vector<Mat> cross_acc(cfg.num_ue, Mat::Zero(m, nl));
  std::vector<Mat> hy_acc(cfg.num_ue, Mat::Zero(m, nl));
  Rng mc = rng.child("mc");
  for (int d = 0; d < draws; ++d) {
    Rng dr = mc.child(static_cast<std::uint64_t>(d));
    Rng ch_rng = dr.child("ch");
    const auto draw = ch::sample_channel(cov, ch_rng);
    Rng tr_rng = dr.child("train");
    const auto rx = ch::uplink_train(draw, rf, cfg, tr_rng);
    const auto est = ch::mmse_estimate(rx, rf, cov, cfg);
    Vec y(nl);
    for (int col = 0; col < cfg.pilot_length; ++col) {
      y.segment(col * cfg.rf_chains, cfg.rf_chains) = rx[0].col(col);
    }
    for (int k = 0; k < cfg.num_ue; ++k) {
      const Vec err = draw.h[k][0] - est.h_hat[k][0];
      err_acc[k].noalias() += err * err.adjoint();
      cross_acc[k].noalias() += err * y.adjoint();
      hy_acc[k].noalias() += draw.h[k][0] * y.adjoint();
    }
  }
  for (int k = 0; k < cfg.num_ue; ++k) {
    err_acc[k] /= draws;
    cross_acc[k] /= draws;
    hy_acc[k] /= draws;
    // Orthogonality: E[(h - h_hat) y^H] ~ 0 at the scale of E[h y^H].
    CHECK(cross_acc[k].cwiseAbs().maxCoeff() <=
          0.05 * hy_acc[k].cwiseAbs().maxCoeff());
    // Monte Carlo error covariance matches the closed form.
    const Mat e = ch::error_covariance(rf[0], cov.r[k][0], cfg.pilot_length,
                                       cfg.ul_tx_power[k], cfg.ul_noise_var);
    CHECK((err_acc[k] - e).norm() <= 0.05 * e.norm());
  }
}
