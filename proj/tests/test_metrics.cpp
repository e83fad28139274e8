// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cranhb/channel.hpp"
#include "cranhb/linalg.hpp"
#include "cranhb/metrics.hpp"

using namespace cranhb;
namespace mt = cranhb::metrics;

namespace {

constexpr double kLn2 = std::numbers::ln2;

// Explicit block-diagonal assembly used by the term-by-term oracle below,
// independent of the per-block evaluation inside the library.
Mat block_diag(const std::vector<Mat>& blocks) {
  Eigen::Index rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Mat out = Mat::Zero(rows, cols);
  Eigen::Index r = 0, c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

struct Instance {
  SystemConfig cfg;
  std::vector<Vec> h;  // stacked per UE
  HybridSolution sol;
};

Instance random_instance(Rng rng, int n_rrh = 2, int n_ue = 3, int m = 4,
                         int n = 2, bool unit_modulus = true) {
  Instance inst;
  inst.cfg = SystemConfig::uniform(n_rrh, n_ue, m, n, /*fronthaul=*/5.0,
                                   /*power=*/10.0);
  inst.h.resize(n_ue);
  Rng hr = rng.child("h");
  for (int k = 0; k < n_ue; ++k) {
    Vec h(m * n_rrh);
    hr.fill_cnormal(h);
    inst.h[k] = h;
  }
  inst.sol.rf.resize(n_rrh);
  Rng vr = rng.child("rf");
  for (int i = 0; i < n_rrh; ++i) {
    Mat v(m, n);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < n; ++b) {
        const double ph = vr.uniform(0.0, 2 * std::numbers::pi);
        const double mag = unit_modulus ? 1.0 : vr.uniform(0.2, 1.0);
        v(a, b) = mag * Cplx(std::cos(ph), std::sin(ph));
      }
    }
    inst.sol.rf[i] = v;
  }
  inst.sol.digital.resize(n_ue);
  Rng dr = rng.child("d");
  for (int k = 0; k < n_ue; ++k) {
    Vec v(n * n_rrh);
    dr.fill_cnormal(v);
    inst.sol.digital[k] = 0.5 * v;
  }
  inst.sol.omega.resize(n_rrh);
  Rng orr = rng.child("om");
  for (int i = 0; i < n_rrh; ++i) {
    Mat g(n, n);
    orr.fill_cnormal(g);
    inst.sol.omega[i] = 0.1 * (g * g.adjoint()) +
                        0.01 * Mat::Identity(n, n);
  }
  return inst;
}

// Term-by-term rate evaluation straight from the received-signal model with
// the full Vbar and Omegabar matrices.
double oracle_rate(const Instance& inst, int ue) {
  const Mat vbar = block_diag(inst.sol.rf);
  const Mat obar = block_diag(inst.sol.omega);
  const Vec hk = inst.h[ue];
  double zeta = inst.cfg.dl_noise_var;
  for (int l = 0; l < inst.cfg.num_ue; ++l) {
    if (l == ue) continue;
    zeta += std::norm((hk.adjoint() * vbar * inst.sol.digital[l])(0, 0));
  }
  zeta += (hk.adjoint() * vbar * obar * vbar.adjoint() * hk).real()(0, 0);
  const double sig = std::norm((hk.adjoint() * vbar * inst.sol.digital[ue])(0, 0));
  return std::log2(1.0 + sig / zeta);
}

SurrogateState tight_state(const Instance& inst) {
  SurrogateState st;
  const int n_ue = inst.cfg.num_ue;
  st.u.resize(n_ue);
  st.w_tilde.resize(n_ue);
  for (int k = 0; k < n_ue; ++k) {
    st.u[k] = mt::mmse_receiver(inst.h[k], inst.sol, k, inst.cfg.dl_noise_var);
    st.w_tilde[k] =
        1.0 / mt::mse(inst.h[k], inst.sol, k, st.u[k], inst.cfg.dl_noise_var);
  }
  st.sigma.resize(inst.cfg.num_rrh);
  for (int i = 0; i < inst.cfg.num_rrh; ++i) {
    st.sigma[i] = mt::tight_sigma(inst.sol.digital, inst.sol.omega[i], i,
                                  inst.cfg.rf_chains);
  }
  st.rho = mt::total_power(inst.sol, inst.cfg);
  return st;
}

SurrogateState random_state(const Instance& inst, Rng rng) {
  SurrogateState st;
  const int n_ue = inst.cfg.num_ue;
  const int n = inst.cfg.rf_chains;
  st.u.resize(n_ue);
  st.w_tilde.resize(n_ue);
  for (int k = 0; k < n_ue; ++k) {
    st.u[k] = 0.5 * rng.cnormal();
    st.w_tilde[k] = rng.uniform(0.05, 4.0);
  }
  st.sigma.resize(inst.cfg.num_rrh);
  for (int i = 0; i < inst.cfg.num_rrh; ++i) {
    Mat g(n, n);
    rng.fill_cnormal(g);
    st.sigma[i] = g * g.adjoint() + 0.05 * Mat::Identity(n, n);
  }
  st.rho = rng.uniform(0.3, 3.0) * mt::total_power(inst.sol, inst.cfg);
  return st;
}

}  // namespace

TEST_CASE("user_rate: zero beamformer, scalar AWGN form, and the term-by-term oracle") {
  Instance inst = random_instance(Rng(21));
  inst.sol.digital[1].setZero();
  CHECK(mt::user_rate(inst.h[1], inst.sol, 1, 1.0) == 0.0);

  // Scalar single-UE AWGN: N_R = N = M = 1, h = 1, V_R = 1, v = sqrt(P).
  Instance scalar;
  scalar.cfg = SystemConfig::uniform(1, 1, 1, 1, 5.0, 10.0);
  scalar.h = {Vec::Ones(1)};
  scalar.sol.rf = {Mat::Ones(1, 1)};
  const double p = 3.7;
  scalar.sol.digital = {Vec(std::sqrt(p) * Vec::Ones(1))};
  scalar.sol.omega = {Mat::Zero(1, 1)};
  CHECK(mt::user_rate(scalar.h[0], scalar.sol, 0, 1.0) ==
        doctest::Approx(std::log2(1.0 + p)).epsilon(1e-12));

  for (int trial = 0; trial < 10; ++trial) {
    Instance r = random_instance(Rng(100 + trial));
    for (int k = 0; k < r.cfg.num_ue; ++k) {
      CHECK(std::abs(mt::user_rate(r.h[k], r.sol, k, r.cfg.dl_noise_var) -
                     oracle_rate(r, k)) <= 1e-10);
    }
  }
}

TEST_CASE("fronthaul_rate: zero signal, rank-one lemma, eigenvalue oracle") {
  Instance inst = random_instance(Rng(23));
  const int n = inst.cfg.rf_chains;
  std::vector<Vec> zeros(inst.cfg.num_ue, Vec::Zero(n * inst.cfg.num_rrh));
  CHECK(mt::fronthaul_rate(zeros, inst.sol.omega[0], 0, n) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // One UE with Xi^H v = e_1 against identity Omega: log2 det(I + e1 e1^H) = 1.
  std::vector<Vec> one(1, Vec::Zero(n * inst.cfg.num_rrh));
  one[0](0) = 1.0;
  CHECK(mt::fronthaul_rate(one, Mat::Identity(n, n), 0, n) ==
        doctest::Approx(1.0).epsilon(1e-12));

  for (int trial = 0; trial < 10; ++trial) {
    Instance r = random_instance(Rng(200 + trial));
    for (int i = 0; i < r.cfg.num_rrh; ++i) {
      Mat s = Mat::Zero(n, n);
      for (const Vec& v : r.sol.digital) {
        s += v.segment(i * n, n) * v.segment(i * n, n).adjoint();
      }
      Eigen::SelfAdjointEigenSolver<Mat> e1(s + r.sol.omega[i]);
      Eigen::SelfAdjointEigenSolver<Mat> e2(r.sol.omega[i]);
      double expect = 0.0;
      for (int d = 0; d < n; ++d) {
        expect += std::log2(e1.eigenvalues()(d)) - std::log2(e2.eigenvalues()(d));
      }
      CHECK(std::abs(mt::fronthaul_rate(r.sol.digital, r.sol.omega[i], i, n) -
                     expect) <= 1e-9);
    }
  }
}

TEST_CASE("rrh_power: closed cases and Monte Carlo against the transmit model") {
  Instance inst = random_instance(Rng(29));
  const int n = inst.cfg.rf_chains;
  const int m = inst.cfg.antennas_per_rrh;
  std::vector<Vec> zeros(inst.cfg.num_ue, Vec::Zero(n * inst.cfg.num_rrh));
  CHECK(mt::rrh_power(inst.sol.rf[0], zeros, Mat::Zero(n, n), 0) == 0.0);
  CHECK(mt::rrh_power(inst.sol.rf[0], zeros, Mat::Identity(n, n), 0) ==
        doctest::Approx(static_cast<double>(m) * n).epsilon(1e-12));

  // E||x_i||^2 with x_i = V_R,i (Xi^H sum_k v_k s_k + q_i).
  const int i = 1;
  const double p_closed =
      mt::rrh_power(inst.sol.rf[i], inst.sol.digital, inst.sol.omega[i], i);
  Rng mc(31);
  const Mat omega_half = linalg::sqrt_psd(inst.sol.omega[i]);
  double acc = 0.0;
  const int draws = 100000;
  for (int d = 0; d < draws; ++d) {
    Vec xd = Vec::Zero(n);
    for (int k = 0; k < inst.cfg.num_ue; ++k) {
      xd += inst.sol.digital[k].segment(i * n, n) * mc.cnormal();
    }
    Vec q(n);
    mc.fill_cnormal(q);
    acc += (inst.sol.rf[i] * (xd + omega_half * q)).squaredNorm();
  }
  acc /= draws;
  CHECK(std::abs(acc - p_closed) <= 0.02 * p_closed);
}

TEST_CASE("total_power: static term arithmetic and decomposition") {
  SystemConfig cfg = SystemConfig::uniform(2, 4, 3, 2, 5.0, 10.0);
  HybridSolution sol = HybridSolution::zero(cfg);
  CHECK(mt::total_power(sol, cfg) == doctest::Approx(8.0).epsilon(1e-15));

  Instance inst = random_instance(Rng(37));
  const double before = mt::total_power(inst.sol, inst.cfg);
  const double dynamic = before - inst.cfg.static_power();
  for (Vec& v : inst.sol.digital) v *= 2.0;
  const double after = mt::total_power(inst.sol, inst.cfg);
  // Quantization part unchanged, beamformer part quadruples.
  double omega_part = 0.0;
  for (int i = 0; i < inst.cfg.num_rrh; ++i) {
    omega_part +=
        (inst.sol.rf[i] * inst.sol.omega[i] * inst.sol.rf[i].adjoint()).trace().real();
  }
  CHECK(after - inst.cfg.static_power() - omega_part ==
        doctest::Approx(4.0 * (dynamic - omega_part)).epsilon(1e-10));

  double sum = inst.cfg.static_power();
  for (int i = 0; i < inst.cfg.num_rrh; ++i) {
    sum += mt::rrh_power(inst.sol.rf[i], inst.sol.digital, inst.sol.omega[i], i);
  }
  CHECK(std::abs(sum - after) <= 1e-12 * std::max(1.0, after));
}

TEST_CASE("mmse_receiver: closed forms and local minimality of the MSE") {
  Instance inst = random_instance(Rng(41));
  Vec zero_h = Vec::Zero(inst.h[0].size());
  CHECK(mt::mmse_receiver(zero_h, inst.sol, 0, 1.0) == Cplx(0.0, 0.0));

  // Interference-free scalar case: u = a / (|a|^2 + sigma^2).
  Instance scalar;
  scalar.cfg = SystemConfig::uniform(1, 1, 1, 1, 5.0, 10.0);
  scalar.h = {Vec::Ones(1)};
  scalar.sol.rf = {Mat::Ones(1, 1)};
  scalar.sol.digital = {Vec(2.0 * Vec::Ones(1))};
  scalar.sol.omega = {Mat::Zero(1, 1)};
  const Cplx a(2.0, 0.0);
  CHECK(std::abs(mt::mmse_receiver(scalar.h[0], scalar.sol, 0, 1.0) -
                 a / (std::norm(a) + 1.0)) <= 1e-14);

  Rng rng(43);
  for (int k = 0; k < inst.cfg.num_ue; ++k) {
    const Cplx u = mt::mmse_receiver(inst.h[k], inst.sol, k, 1.0);
    const double e0 = mt::mse(inst.h[k], inst.sol, k, u, 1.0);
    for (int dir = 0; dir < 8; ++dir) {
      const double ph = rng.uniform(0.0, 2 * std::numbers::pi);
      const Cplx du = 1e-3 * Cplx(std::cos(ph), std::sin(ph));
      CHECK(mt::mse(inst.h[k], inst.sol, k, u + du, 1.0) >= e0 - 1e-15);
    }
  }
}

TEST_CASE("mse: closed values and tightness of the rate bound") {
  Instance inst = random_instance(Rng(47));
  CHECK(mt::mse(inst.h[0], inst.sol, 0, Cplx(0, 0), 1.0) == 1.0);

  for (int k = 0; k < inst.cfg.num_ue; ++k) {
    const Vec a = inst.sol.effective_channel(inst.h[k]);
    const Cplx sig = a.dot(inst.sol.digital[k]);
    const double zeta = mt::interference_power(inst.h[k], inst.sol, k, 1.0);
    const Cplx u = mt::mmse_receiver(inst.h[k], inst.sol, k, 1.0);
    const double e = mt::mse(inst.h[k], inst.sol, k, u, 1.0);
    const double expect = 1.0 - std::norm(sig) / (std::norm(sig) + zeta);
    CHECK(std::abs(e - expect) <= 1e-12);

    // gamma_k at the tight state equals ln2 * f_k.
    const double gamma = std::log(1.0 / e) - (1.0 / e) * e + 1.0;
    const double f = mt::user_rate(inst.h[k], inst.sol, k, 1.0);
    CHECK(std::abs(f * kLn2 - gamma) <= 1e-10);
  }
}

TEST_CASE("surrogate_wsr: equality at closed forms, bound for random states") {
  Instance inst = random_instance(Rng(53));
  const double wsr =
      mt::weighted_sum_rate(inst.h, inst.sol, inst.cfg.weights, 1.0);

  const SurrogateState tight = tight_state(inst);
  CHECK(std::abs(mt::surrogate_wsr(inst.h, inst.sol, tight, inst.cfg.weights,
                                   1.0) -
                 wsr) <= 1e-9);

  Rng rng(59);
  for (int trial = 0; trial < 1000; ++trial) {
    const SurrogateState st = random_state(inst, rng.child(trial));
    const double s = mt::surrogate_wsr(inst.h, inst.sol, st, inst.cfg.weights, 1.0);
    CHECK(s <= wsr + 1e-9);
  }

  // u = 0, w~ = 1 collapses every gamma to zero.
  SurrogateState zero = tight;
  for (auto& u : zero.u) u = Cplx(0, 0);
  for (auto& w : zero.w_tilde) w = 1.0;
  CHECK(std::abs(mt::surrogate_wsr(inst.h, inst.sol, zero, inst.cfg.weights,
                                   1.0)) <= 1e-12);
  CHECK(0.0 <= wsr);
}

TEST_CASE("fronthaul_surrogate: equality at Sigma~, upper bound elsewhere") {
  Instance inst = random_instance(Rng(61));
  const int n = inst.cfg.rf_chains;
  for (int i = 0; i < inst.cfg.num_rrh; ++i) {
    const double g = mt::fronthaul_rate(inst.sol.digital, inst.sol.omega[i], i, n);
    const Mat sigma = mt::tight_sigma(inst.sol.digital, inst.sol.omega[i], i, n);
    CHECK(std::abs(mt::fronthaul_surrogate(inst.sol.digital, inst.sol.omega[i],
                                           sigma, i, n) -
                   g) <= 1e-9);
    CHECK(mt::fronthaul_surrogate(inst.sol.digital, inst.sol.omega[i],
                                  Mat(2.0 * sigma), i, n) > g);
    CHECK_THROWS_AS(mt::fronthaul_surrogate(inst.sol.digital, inst.sol.omega[i],
                                            Mat(Mat::Zero(n, n)), i, n),
                    std::invalid_argument);
  }
  // All-zero beamformers with Sigma = Omega: both sides vanish.
  std::vector<Vec> zeros(inst.cfg.num_ue,
                         Vec::Zero(n * inst.cfg.num_rrh));
  CHECK(std::abs(mt::fronthaul_surrogate(zeros, inst.sol.omega[0],
                                         inst.sol.omega[0], 0, n)) <= 1e-9);
}

TEST_CASE("ee_surrogate: equality at closed forms, bound and sentinel") {
  Instance inst = random_instance(Rng(67));
  const double wsr =
      mt::weighted_sum_rate(inst.h, inst.sol, inst.cfg.weights, 1.0);
  const double pt = mt::total_power(inst.sol, inst.cfg);

  SurrogateState tight = tight_state(inst);
  const double eps =
      mt::ee_surrogate(inst.h, inst.sol, tight, inst.cfg.weights, inst.cfg);
  CHECK(std::abs(eps - (std::log(wsr) - std::log(pt))) <= 1e-9);

  SurrogateState rho2 = tight;
  rho2.rho = 2.0 * pt;
  CHECK(mt::ee_surrogate(inst.h, inst.sol, rho2, inst.cfg.weights, inst.cfg) <
        eps);

  Rng rng(71);
  for (int trial = 0; trial < 1000; ++trial) {
    const SurrogateState st = random_state(inst, rng.child(trial));
    const double e = mt::ee_surrogate(inst.h, inst.sol, st, inst.cfg.weights,
                                      inst.cfg);
    CHECK(e <= std::log(wsr) - std::log(pt) + 1e-9);
  }

  // Scalar inequality ln a <= ln b + a/b - 1 with equality iff a = b.
  for (int trial = 0; trial < 100; ++trial) {
    const double a = rng.uniform(0.01, 10.0);
    const double b = rng.uniform(0.01, 10.0);
    CHECK(std::log(a) <= std::log(b) + a / b - 1.0 + 1e-12);
  }
  const double a = 0.7;
  CHECK(std::abs(std::log(a) - (std::log(a) + a / a - 1.0)) <= 1e-15);

  // Sentinel: nonpositive inner sum.
  SurrogateState bad = tight;
  for (auto& w : bad.w_tilde) w = 1e-9;
  const double sentinel =
      mt::ee_surrogate(inst.h, inst.sol, bad, inst.cfg.weights, inst.cfg);
  CHECK((std::isfinite(sentinel) && sentinel < -1e200));
}

TEST_CASE("user_rate_imperfect: zero error reduces to user_rate; oracle match") {
  Instance inst = random_instance(Rng(73));
  const int m = inst.cfg.antennas_per_rrh;
  std::vector<Mat> zero_err(inst.cfg.num_rrh, Mat::Zero(m, m));
  for (int k = 0; k < inst.cfg.num_ue; ++k) {
    CHECK(std::abs(mt::user_rate_imperfect(inst.h[k], zero_err, inst.sol, k, 1.0) -
                   mt::user_rate(inst.h[k], inst.sol, k, 1.0)) <= 1e-12);
  }

  // Zero beamformer still gives zero rate.
  Instance z = random_instance(Rng(79));
  z.sol.digital[0].setZero();
  std::vector<Mat> err(z.cfg.num_rrh);
  Rng er(83);
  for (int i = 0; i < z.cfg.num_rrh; ++i) {
    Mat g(m, m);
    er.fill_cnormal(g);
    err[i] = 0.1 * (g * g.adjoint());
  }
  CHECK(mt::user_rate_imperfect(z.h[0], err, z.sol, 0, 1.0) == 0.0);

  // Term-by-term with explicit block matrices.
  const Mat vbar = block_diag(z.sol.rf);
  const Mat obar = block_diag(z.sol.omega);
  const Mat ebar = block_diag(err);
  for (int k = 0; k < z.cfg.num_ue; ++k) {
    const Vec hk = z.h[k];
    double zeta = z.cfg.dl_noise_var;
    for (int l = 0; l < z.cfg.num_ue; ++l) {
      if (l != k) zeta += std::norm((hk.adjoint() * vbar * z.sol.digital[l])(0, 0));
      zeta += (z.sol.digital[l].adjoint() * vbar.adjoint() * ebar * vbar *
               z.sol.digital[l]).real()(0, 0);
    }
    zeta += (hk.adjoint() * vbar * obar * vbar.adjoint() * hk).real()(0, 0);
    zeta += (vbar.adjoint() * ebar * vbar * obar).trace().real();
    const double sig = std::norm((hk.adjoint() * vbar * z.sol.digital[k])(0, 0));
    const double expect = std::log2(1.0 + sig / zeta);
    CHECK(std::abs(mt::user_rate_imperfect(z.h[k], err, z.sol, k, 1.0) - expect) <=
          1e-10);
  }
}

TEST_CASE("monotonicity: more quantization noise never helps; adding a UE loads the fronthaul") {
  Rng rng(89);
  for (int trial = 0; trial < 100; ++trial) {
    Instance inst = random_instance(rng.child(trial));
    const int n = inst.cfg.rf_chains;
    Instance worse = inst;
    Rng dr = rng.child(trial).child("extra");
    for (int i = 0; i < inst.cfg.num_rrh; ++i) {
      Mat g(n, n);
      dr.fill_cnormal(g);
      worse.sol.omega[i] += 0.2 * (g * g.adjoint());
    }
    for (int k = 0; k < inst.cfg.num_ue; ++k) {
      CHECK(mt::user_rate(worse.h[k], worse.sol, k, 1.0) <=
            mt::user_rate(inst.h[k], inst.sol, k, 1.0) + 1e-12);
    }

    // Dropping one UE's beamformer cannot increase g_i.
    std::vector<Vec> fewer = inst.sol.digital;
    fewer[0].setZero();
    for (int i = 0; i < inst.cfg.num_rrh; ++i) {
      CHECK(mt::fronthaul_rate(fewer, inst.sol.omega[i], i, n) <=
            mt::fronthaul_rate(inst.sol.digital, inst.sol.omega[i], i, n) + 1e-12);
    }
  }
}

TEST_CASE("scale covariance: |c|^2 scaling of signal and quantization terms") {
  Instance inst = random_instance(Rng(97));
  const Cplx c(1.3, -0.7);
  for (int k = 0; k < inst.cfg.num_ue; ++k) {
    const Vec a1 = inst.sol.effective_channel(inst.h[k]);
    const Vec a2 = inst.sol.effective_channel(Vec(c * inst.h[k]));
    const double sig1 = std::norm(a1.dot(inst.sol.digital[k]));
    const double sig2 = std::norm(a2.dot(inst.sol.digital[k]));
    CHECK(std::abs(sig2 - std::norm(c) * sig1) <= 1e-10 * std::max(1.0, sig1));
    const double q1 = mt::interference_power(inst.h[k], inst.sol, k, 0.0);
    const double q2 = mt::interference_power(Vec(c * inst.h[k]), inst.sol, k, 0.0);
    CHECK(std::abs(q2 - std::norm(c) * q1) <= 1e-10 * std::max(1.0, q1));
  }
}

TEST_CASE("audit_solution: flags every violation type") {
  Instance inst = random_instance(Rng(101));
  auto ok = mt::audit_solution(inst.sol, inst.cfg, true);
  CHECK(ok.unit_modulus_ok);
  CHECK(ok.omega_pd_ok);

  Instance bad = inst;
  bad.sol.rf[0](0, 0) *= 0.5;
  CHECK_FALSE(mt::audit_solution(bad.sol, bad.cfg, true).unit_modulus_ok);
  CHECK(mt::audit_solution(bad.sol, bad.cfg, false).unit_modulus_ok);

  Instance hot = inst;
  for (Vec& v : hot.sol.digital) v *= 100.0;
  const auto rep = mt::audit_solution(hot.sol, hot.cfg, true);
  CHECK_FALSE(rep.power_ok);
  CHECK_FALSE(rep.fronthaul_ok);
}
