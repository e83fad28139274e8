// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#include "cranhb/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cranhb/linalg.hpp"

namespace cranhb::convex {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kKktTol = 1e-6;
constexpr double kFeasTol = 1e-6;
constexpr double kBisectWidth = 1e-9;
constexpr int kMaxDualSweeps = 200;
constexpr double kNegInf = -std::numeric_limits<double>::max();

double pos(double x) { return std::max(0.0, x); }

// ---------------------------------------------------------------------------
// Digital subproblem
//
// For frozen (u, w~, Sigma[, rho]) and multipliers (lambda_i, mu_i), the
// Lagrangian is an unconstrained concave quadratic whose maximizer is
// closed-form:
//   v_k     = A^{-1} (nu c_k u_k a_k),
//   A       = nu G + sum_i (lambda_i/ln2) emb_i(Sigma_i^{-1})
//                 + sum_i mu_i^eff emb_i(V_i^H V_i),
//   Omega_i = (lambda_i/ln2) (nu T_i + (lambda_i/ln2) Sigma_i^{-1}
//                 + mu_i^eff V_i^H V_i)^{-1},
// with G = sum_k c_k |u_k|^2 (a_k a_k^H + Ebar_k), T_i the per-RRH block of
// the same sum, c_k = w_k w~_k / ln2, mu^eff = mu + 1/rho in EE mode, and
// nu = 1 in WSR mode or the reciprocal of the rate surrogate in EE mode
// (resolved by scalar bisection: nu * Gamma(x(nu)) = 1 is increasing in nu).
// ---------------------------------------------------------------------------

struct DigitalWork {
  const DigitalSubproblem* spec = nullptr;
  int n_rrh = 0, n_ue = 0, n = 0, dim = 0;
  bool ee = false;
  double rho = 1.0;
  std::vector<double> c;       // c_k
  std::vector<double> cu2;     // c_k |u_k|^2
  double gamma_const = 0.0;    // sum_k (w_k/ln2)(ln w~_k + 1)
  Mat big_g;                   // dim x dim
  std::vector<Mat> t_blk;      // [rrh] N x N
  std::vector<Mat> sigma_inv;  // [rrh]
  std::vector<double> sigma_logdet;
  std::vector<Mat> gram;  // [rrh] V_i^H V_i
  std::vector<Vec> rhs;   // [ue] c_k u_k a_k
  double nu_hint = 1.0;
};

struct DigitalPoint {
  std::vector<Vec> v;
  std::vector<Mat> omega;
  std::vector<double> gtilde;  // per RRH
  std::vector<double> power;   // per RRH
  double gamma = 0.0;          // rate surrogate sum_k (w_k/ln2) gamma_k
  double nu = 1.0;
};

DigitalWork make_digital_work(const DigitalSubproblem& spec) {
  DigitalWork w;
  w.spec = &spec;
  w.n_rrh = spec.cfg.num_rrh;
  w.n_ue = spec.cfg.num_ue;
  w.n = spec.cfg.rf_chains;
  w.dim = w.n * w.n_rrh;
  w.ee = spec.mode == ObjectiveMode::EeSurrogate;
  w.rho = spec.state.rho;
  if (w.ee && !(w.rho > 0.0)) {
    throw std::invalid_argument("solve_digital: EE mode requires rho > 0");
  }
  w.c.resize(w.n_ue);
  w.cu2.resize(w.n_ue);
  w.rhs.resize(w.n_ue);
  w.big_g = Mat::Zero(w.dim, w.dim);
  w.t_blk.assign(w.n_rrh, Mat::Zero(w.n, w.n));
  for (int k = 0; k < w.n_ue; ++k) {
    const double wt = spec.state.w_tilde[k];
    if (!(wt > 0.0)) throw std::invalid_argument("solve_digital: w_tilde must be > 0");
    w.c[k] = spec.cfg.weights[k] * wt / kLn2;
    w.cu2[k] = w.c[k] * std::norm(spec.state.u[k]);
    w.gamma_const += spec.cfg.weights[k] / kLn2 * (std::log(wt) + 1.0);
    const Vec& a = spec.eff_channel[k];
    w.rhs[k] = w.c[k] * spec.state.u[k] * a;
    if (w.cu2[k] > 0.0) {
      w.big_g.noalias() += w.cu2[k] * (a * a.adjoint());
      for (int i = 0; i < w.n_rrh; ++i) {
        const auto b = a.segment(i * w.n, w.n);
        w.t_blk[i].noalias() += w.cu2[k] * (b * b.adjoint());
      }
      if (spec.imperfect()) {
        for (int i = 0; i < w.n_rrh; ++i) {
          w.big_g.block(i * w.n, i * w.n, w.n, w.n) +=
              w.cu2[k] * spec.eff_err_cov[k][i];
          w.t_blk[i] += w.cu2[k] * spec.eff_err_cov[k][i];
        }
      }
    }
  }
  w.sigma_inv.resize(w.n_rrh);
  w.sigma_logdet.resize(w.n_rrh);
  w.gram.resize(w.n_rrh);
  for (int i = 0; i < w.n_rrh; ++i) {
    const Mat& sig = spec.state.sigma[i];
    if (linalg::eig_min(sig) <= 0.0) {
      throw std::invalid_argument("solve_digital: Sigma must be PD");
    }
    w.sigma_inv[i] = linalg::ridge_inverse(sig);
    w.sigma_logdet[i] = linalg::logdet_hermitian(sig);
    w.gram[i] = linalg::hermitize(spec.rf[i].adjoint() * spec.rf[i]);
  }
  return w;
}

// Rate surrogate Gamma = gamma_const - sum_k c_k e_k at a primal point.
double digital_gamma(const DigitalWork& w, const std::vector<Vec>& v,
                     const std::vector<Mat>& omega) {
  const auto& spec = *w.spec;
  double acc = w.gamma_const;
  for (int k = 0; k < w.n_ue; ++k) {
    const Vec& a = spec.eff_channel[k];
    const Cplx u = spec.state.u[k];
    double zeta = spec.cfg.dl_noise_var;
    for (int l = 0; l < w.n_ue; ++l) {
      if (l != k) zeta += std::norm(a.dot(v[l]));
    }
    for (int i = 0; i < w.n_rrh; ++i) {
      const auto a_i = a.segment(i * w.n, w.n);
      zeta += (a_i.adjoint() * omega[i] * a_i).real()(0, 0);
      if (spec.imperfect()) {
        const Mat& eb = spec.eff_err_cov[k][i];
        for (int l = 0; l < w.n_ue; ++l) {
          const auto d = v[l].segment(i * w.n, w.n);
          zeta += (d.adjoint() * eb * d).real()(0, 0);
        }
        zeta += (eb * omega[i]).trace().real();
      }
    }
    const double e_k = std::norm(1.0 - std::conj(u) * a.dot(v[k])) +
                       std::norm(u) * zeta;
    acc -= w.c[k] * e_k;
  }
  return acc;
}

// Closed-form primal maximizer of the Lagrangian at fixed multipliers.
DigitalPoint digital_primal(const DigitalWork& w,
                            const std::vector<double>& lambda,
                            const std::vector<double>& mu, double nu) {
  DigitalPoint p;
  p.nu = nu;
  Mat a_mat = nu * w.big_g;
  for (int i = 0; i < w.n_rrh; ++i) {
    const double mu_eff = mu[i] + (w.ee ? 1.0 / w.rho : 0.0);
    a_mat.block(i * w.n, i * w.n, w.n, w.n) +=
        (lambda[i] / kLn2) * w.sigma_inv[i] + mu_eff * w.gram[i];
  }
  p.v.resize(w.n_ue);
  {
    double cond = 0.0;
    Mat h = linalg::hermitize(a_mat);
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    const double emax = es.eigenvalues().cwiseAbs().maxCoeff();
    const double emin = es.eigenvalues().minCoeff();
    cond = (emin <= 0.0) ? std::numeric_limits<double>::infinity() : emax / emin;
    if (!(cond <= 1e12)) {
      double scale = std::abs(h.trace()) / h.rows();
      if (scale <= 0.0) scale = 1.0;
      h.diagonal().array() += Cplx(1e-10 * scale, 0.0);
    }
    Eigen::LDLT<Mat> ldlt(h);
    for (int k = 0; k < w.n_ue; ++k) p.v[k] = ldlt.solve(nu * w.rhs[k]);
  }

  p.omega.resize(w.n_rrh);
  p.gtilde.resize(w.n_rrh);
  p.power.resize(w.n_rrh);
  for (int i = 0; i < w.n_rrh; ++i) {
    const double mu_eff = mu[i] + (w.ee ? 1.0 / w.rho : 0.0);
    Mat s_i = Mat::Zero(w.n, w.n);
    for (int k = 0; k < w.n_ue; ++k) {
      const auto d = p.v[k].segment(i * w.n, w.n);
      s_i.noalias() += d * d.adjoint();
    }
    if (lambda[i] > 0.0) {
      const double scale = lambda[i] / kLn2;
      Mat inner = nu * w.t_blk[i] + scale * w.sigma_inv[i] + mu_eff * w.gram[i];
      const Mat inner_inv = linalg::ridge_inverse(inner);
      p.omega[i] = linalg::hermitize(scale * inner_inv);
      // log det Omega without factoring the (possibly tiny) matrix itself.
      const double omega_logdet =
          w.n * std::log(scale) -
          linalg::logdet_hermitian(linalg::hermitize(inner));
      const double tr_sig = (w.sigma_inv[i] * (s_i + p.omega[i])).trace().real();
      p.gtilde[i] =
          (w.sigma_logdet[i] - omega_logdet + tr_sig) / kLn2 - w.n / kLn2;
    } else {
      // Omega = 0 is never feasible for the log-det constraint.
      p.omega[i] = Mat::Zero(w.n, w.n);
      p.gtilde[i] = std::numeric_limits<double>::infinity();
    }
    p.power[i] = (w.gram[i] * (s_i + p.omega[i])).trace().real();
  }
  p.gamma = digital_gamma(w, p.v, p.omega);
  return p;
}

// EE mode: resolve the scalar nu (reciprocal of the rate surrogate) at the
// given multipliers; nu * Gamma(x(nu)) - 1 is increasing in nu.
DigitalPoint digital_primal_ee(DigitalWork& w, const std::vector<double>& lambda,
                               const std::vector<double>& mu) {
  auto f = [&](double nu) {
    DigitalPoint p = digital_primal(w, lambda, mu, nu);
    return std::make_pair(nu * p.gamma - 1.0, p);
  };
  double lo = w.nu_hint / 4.0, hi = w.nu_hint * 4.0;
  auto [f_hi, p_hi] = f(hi);
  int guard = 0;
  while (f_hi < 0.0 && hi < 1e14 && guard++ < 60) {
    hi *= 8.0;
    std::tie(f_hi, p_hi) = f(hi);
  }
  if (f_hi < 0.0) {
    // Rate surrogate cannot be made positive: degenerate state.
    w.nu_hint = hi;
    return p_hi;
  }
  auto [f_lo, p_lo] = f(lo);
  guard = 0;
  while (f_lo > 0.0 && lo > 1e-14 && guard++ < 60) {
    lo /= 8.0;
    std::tie(f_lo, p_lo) = f(lo);
  }
  DigitalPoint best = p_hi;
  guard = 0;
  while (hi - lo > 1e-10 * std::max(1.0, hi) && guard++ < 200) {
    const double mid = 0.5 * (lo + hi);
    auto [f_mid, p_mid] = f(mid);
    if (f_mid >= 0.0) {
      hi = mid;
      best = p_mid;
    } else {
      lo = mid;
    }
  }
  w.nu_hint = hi;
  return best;
}

DigitalPoint digital_point_at(DigitalWork& w, const std::vector<double>& lambda,
                              const std::vector<double>& mu) {
  if (w.ee) return digital_primal_ee(w, lambda, mu);
  return digital_primal(w, lambda, mu, 1.0);
}

// Surrogate objective value at a point.
double digital_objective_value(const DigitalWork& w, const DigitalPoint& p) {
  if (!w.ee) return p.gamma;
  if (p.gamma <= 0.0) return kNegInf;
  double pt = w.spec->cfg.static_power();
  for (int i = 0; i < w.n_rrh; ++i) pt += p.power[i];
  return std::log(p.gamma) - std::log(w.rho) - pt / w.rho + 1.0;
}

// Interior Omega for RRH i at v = 0: minimize gtilde_i subject to the power
// budget, by bisection on the power penalty. Returns false when even the
// minimizer violates the fronthaul capacity (certifies infeasibility).
bool interior_omega(const DigitalWork& w, int i, Mat* omega_out,
                    std::string* certificate) {
  auto candidate = [&](double eta) {
    Mat inner = w.sigma_inv[i] + eta * kLn2 * w.gram[i];
    return linalg::ridge_inverse(inner);
  };
  auto power_of = [&](const Mat& om) {
    return (w.gram[i] * om).trace().real();
  };
  auto gtilde_of = [&](const Mat& om) {
    return (w.sigma_logdet[i] - linalg::logdet_hermitian(om) +
            (w.sigma_inv[i] * om).trace().real()) / kLn2 -
           w.n / kLn2;
  };
  const double budget = 0.5 * w.spec->cfg.tx_power_limit[i];
  Mat om = candidate(0.0);  // = Sigma, the unconstrained minimizer (gtilde = 0)
  if (power_of(om) > budget) {
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (power_of(candidate(hi)) > budget && guard++ < 200) hi *= 4.0;
    guard = 0;
    while (hi - lo > 1e-12 * std::max(1.0, hi) && guard++ < 200) {
      const double mid = 0.5 * (lo + hi);
      if (power_of(candidate(mid)) > budget) lo = mid; else hi = mid;
    }
    om = candidate(hi);
  }
  const double g = gtilde_of(om);
  if (g > w.spec->cfg.fronthaul_capacity[i] + kFeasTol) {
    if (certificate != nullptr) {
      *certificate = "fronthaul constraint " + std::to_string(i) +
                     " unsatisfiable: min gtilde=" + std::to_string(g) +
                     " > C=" + std::to_string(w.spec->cfg.fronthaul_capacity[i]);
    }
    return false;
  }
  *omega_out = om;
  return true;
}

struct DigitalGradients {
  std::vector<Vec> obj_v;    // d objective / d v_k^*
  std::vector<Mat> obj_om;   // d objective / d Omega_i
  // Constraint gradients, fronthaul then power, per RRH:
  std::vector<std::vector<Vec>> g_v, p_v;  // [rrh][ue]
  std::vector<Mat> g_om, p_om;             // [rrh] (diagonal in RRH)
  std::vector<double> g_val, p_val;        // constraint values
};

DigitalGradients digital_gradients(const DigitalWork& w, const DigitalVars& x) {
  const auto& spec = *w.spec;
  DigitalGradients gr;
  gr.obj_v.resize(w.n_ue);
  gr.obj_om.assign(w.n_rrh, Mat::Zero(w.n, w.n));
  for (int k = 0; k < w.n_ue; ++k) {
    gr.obj_v[k] = w.rhs[k] - w.big_g * x.digital[k];
  }
  for (int i = 0; i < w.n_rrh; ++i) gr.obj_om[i] = -w.t_blk[i];
  if (w.ee) {
    const double gamma = digital_gamma(w, x.digital, x.omega);
    const double inv_gamma = (gamma > 0.0) ? 1.0 / gamma : 1e30;
    for (int k = 0; k < w.n_ue; ++k) gr.obj_v[k] *= inv_gamma;
    for (int i = 0; i < w.n_rrh; ++i) {
      gr.obj_om[i] *= inv_gamma;
      // -P_T/rho term.
      gr.obj_om[i] -= w.gram[i] / w.rho;
    }
    for (int k = 0; k < w.n_ue; ++k) {
      for (int i = 0; i < w.n_rrh; ++i) {
        gr.obj_v[k].segment(i * w.n, w.n) -=
            (1.0 / w.rho) * (w.gram[i] * x.digital[k].segment(i * w.n, w.n));
      }
    }
  }
  gr.g_v.assign(w.n_rrh, std::vector<Vec>(w.n_ue));
  gr.p_v.assign(w.n_rrh, std::vector<Vec>(w.n_ue));
  gr.g_om.resize(w.n_rrh);
  gr.p_om.resize(w.n_rrh);
  gr.g_val.resize(w.n_rrh);
  gr.p_val.resize(w.n_rrh);
  for (int i = 0; i < w.n_rrh; ++i) {
    Mat s_i = Mat::Zero(w.n, w.n);
    for (int k = 0; k < w.n_ue; ++k) {
      const auto d = x.digital[k].segment(i * w.n, w.n);
      s_i.noalias() += d * d.adjoint();
      Vec gv = Vec::Zero(w.dim);
      gv.segment(i * w.n, w.n) = (1.0 / kLn2) * (w.sigma_inv[i] * d);
      gr.g_v[i][k] = gv;
      Vec pv = Vec::Zero(w.dim);
      pv.segment(i * w.n, w.n) = w.gram[i] * d;
      gr.p_v[i][k] = pv;
    }
    const Mat omega_inv = linalg::ridge_inverse(x.omega[i]);
    gr.g_om[i] = (w.sigma_inv[i] - omega_inv) / kLn2;
    gr.p_om[i] = w.gram[i];
    gr.g_val[i] = (w.sigma_logdet[i] -
                   linalg::logdet_hermitian(x.omega[i]) +
                   (w.sigma_inv[i] * (s_i + x.omega[i])).trace().real()) /
                      kLn2 -
                  w.n / kLn2;
    gr.p_val[i] = (w.gram[i] * (s_i + x.omega[i])).trace().real();
  }
  return gr;
}

// Flatten a (v, Omega)-shaped gradient into one real vector (Wirtinger
// gradients: real/imag parts of v entries, Hermitian Omega as full matrix).
RealVec flatten_digital(const DigitalWork& w, const std::vector<Vec>& gv,
                        const std::vector<Mat>& gom) {
  const int v_len = 2 * w.n_ue * w.dim;
  const int o_len = 2 * w.n_rrh * w.n * w.n;
  RealVec out(v_len + o_len);
  int at = 0;
  for (int k = 0; k < w.n_ue; ++k) {
    for (int j = 0; j < w.dim; ++j) {
      out(at++) = gv[k](j).real();
      out(at++) = gv[k](j).imag();
    }
  }
  for (int i = 0; i < w.n_rrh; ++i) {
    for (int r = 0; r < w.n; ++r) {
      for (int c2 = 0; c2 < w.n; ++c2) {
        out(at++) = gom[i](r, c2).real();
        out(at++) = gom[i](r, c2).imag();
      }
    }
  }
  return out;
}

// Nonnegative least squares min ||g0 - D m||, m >= 0, by projected cyclic
// coordinate descent. D columns are the constraint gradients.
RealVec nnls(const Eigen::MatrixXd& d, const RealVec& g0) {
  const int n = static_cast<int>(d.cols());
  RealVec m = RealVec::Zero(n);
  RealVec col_norm2(n);
  for (int j = 0; j < n; ++j) col_norm2(j) = d.col(j).squaredNorm();
  RealVec resid = g0;
  for (int sweep = 0; sweep < 400; ++sweep) {
    double change = 0.0;
    for (int j = 0; j < n; ++j) {
      if (col_norm2(j) <= 0.0) continue;
      const double step = d.col(j).dot(resid) / col_norm2(j);
      const double next = std::max(0.0, m(j) + step);
      const double delta = next - m(j);
      if (delta != 0.0) {
        resid -= delta * d.col(j);
        m(j) = next;
        change = std::max(change, std::abs(delta));
      }
    }
    if (change < 1e-14) break;
  }
  return m;
}

KktBreakdown digital_kkt(const DigitalWork& w, const DigitalVars& x,
                         const std::vector<double>* lambda_in,
                         const std::vector<double>* mu_in) {
  DigitalGradients gr = digital_gradients(w, x);
  const RealVec g0 = flatten_digital(w, gr.obj_v, gr.obj_om);
  const int n_con = 2 * w.n_rrh;
  Eigen::MatrixXd d(g0.size(), n_con);
  // Constraint gradients: only the owning Omega block is nonzero.
  for (int i = 0; i < w.n_rrh; ++i) {
    std::vector<Mat> gom(w.n_rrh, Mat::Zero(w.n, w.n));
    gom[i] = gr.g_om[i];
    d.col(i) = flatten_digital(w, gr.g_v[i], gom);
    std::vector<Mat> pom(w.n_rrh, Mat::Zero(w.n, w.n));
    pom[i] = gr.p_om[i];
    d.col(w.n_rrh + i) = flatten_digital(w, gr.p_v[i], pom);
  }
  RealVec m(n_con);
  if (lambda_in != nullptr && mu_in != nullptr) {
    for (int i = 0; i < w.n_rrh; ++i) {
      m(i) = (*lambda_in)[i];
      m(w.n_rrh + i) = (*mu_in)[i];
    }
  } else {
    m = nnls(d, g0);
  }
  KktBreakdown kkt;
  const RealVec resid = g0 - d * m;
  const double scale = std::max(1.0, g0.cwiseAbs().maxCoeff());
  kkt.stationarity = resid.cwiseAbs().maxCoeff() / scale;
  for (int i = 0; i < w.n_rrh; ++i) {
    const double slack_g = gr.g_val[i] - w.spec->cfg.fronthaul_capacity[i];
    const double slack_p = gr.p_val[i] - w.spec->cfg.tx_power_limit[i];
    kkt.primal_feasibility = std::max(kkt.primal_feasibility, pos(slack_g));
    kkt.primal_feasibility = std::max(kkt.primal_feasibility, pos(slack_p));
    kkt.complementary_slackness = std::max(
        kkt.complementary_slackness,
        std::abs(m(i) * slack_g) / std::max(1.0, std::abs(m(i))));
    kkt.complementary_slackness = std::max(
        kkt.complementary_slackness,
        std::abs(m(w.n_rrh + i) * slack_p) / std::max(1.0, std::abs(m(w.n_rrh + i))));
  }
  return kkt;
}

}  // namespace

double KktBreakdown::total() const {
  return std::max({stationarity, primal_feasibility, complementary_slackness});
}

DigitalVars feasible_digital_init(const std::vector<Mat>& rf,
                                  const SystemConfig& cfg) {
  DigitalVars vars;
  vars.digital.assign(cfg.num_ue, Vec::Zero(cfg.digital_dim()));
  vars.omega.resize(cfg.num_rrh);
  for (int i = 0; i < cfg.num_rrh; ++i) {
    if (cfg.fronthaul_capacity[i] < 0.0) {
      throw std::invalid_argument("feasible_digital_init: negative fronthaul capacity");
    }
    const double tr_gram = (rf[i].adjoint() * rf[i]).trace().real();
    const double c = (tr_gram > 0.0)
                         ? std::min(1.0, 0.5 * cfg.tx_power_limit[i] / tr_gram)
                         : 1.0;
    vars.omega[i] = c * Mat::Identity(cfg.rf_chains, cfg.rf_chains);
  }
  return vars;
}

double digital_objective(const DigitalSubproblem& spec,
                         const DigitalVars& vars) {
  DigitalWork w = make_digital_work(spec);
  const double gamma = digital_gamma(w, vars.digital, vars.omega);
  if (!w.ee) return gamma;
  if (gamma <= 0.0) return kNegInf;
  double pt = spec.cfg.static_power();
  for (int i = 0; i < w.n_rrh; ++i) {
    Mat s_i = Mat::Zero(w.n, w.n);
    for (int k = 0; k < w.n_ue; ++k) {
      const auto d = vars.digital[k].segment(i * w.n, w.n);
      s_i.noalias() += d * d.adjoint();
    }
    pt += (w.gram[i] * (s_i + vars.omega[i])).trace().real();
  }
  return std::log(gamma) - std::log(w.rho) - pt / w.rho + 1.0;
}

std::pair<DigitalVars, SolveReport> solve_digital(const DigitalSubproblem& spec,
                                                  const DigitalVars* warm_start) {
  DigitalWork w = make_digital_work(spec);
  SolveReport rep;
  rep.lambda.assign(w.n_rrh, 1.0);
  rep.mu.assign(w.n_rrh, 0.0);

  // Infeasibility screen and interior fallback points.
  std::vector<Mat> interior(w.n_rrh);
  for (int i = 0; i < w.n_rrh; ++i) {
    std::string cert;
    if (!interior_omega(w, i, &interior[i], &cert)) {
      rep.status = SolveStatus::Infeasible;
      rep.infeasible_certificate = cert;
      DigitalVars out;
      out.digital.assign(w.n_ue, Vec::Zero(w.dim));
      out.omega = interior;
      return {out, rep};
    }
  }

  // Flat objective: every c_k |u_k|^2 vanishes, so the objective does not
  // depend on (v, Omega); return the interior point.
  double cu2_max = 0.0;
  for (double v : w.cu2) cu2_max = std::max(cu2_max, v);
  if (cu2_max <= 0.0) {
    DigitalVars out;
    out.digital.assign(w.n_ue, Vec::Zero(w.dim));
    out.omega = interior;
    rep.status = SolveStatus::Converged;
    rep.lambda.assign(w.n_rrh, 0.0);
    rep.objective_trace.push_back(digital_objective(spec, out));
    return {out, rep};
  }

  auto point_at = [&]() { return digital_point_at(w, rep.lambda, rep.mu); };

  // Per-constraint bisection in RRH index order: lambda_i to the fronthaul
  // target, then mu_i to the power target.
  auto bisect_lambda = [&](int i) {
    auto excess = [&](double lam) {
      rep.lambda[i] = lam;
      DigitalPoint p = point_at();
      return p.gtilde[i] - spec.cfg.fronthaul_capacity[i];
    };
    double hi = std::max(rep.lambda[i], 1e-8);
    int guard = 0;
    while (excess(hi) > 0.0 && hi < 1e15 && guard++ < 80) hi *= 8.0;
    if (excess(hi) > 0.0) {
      rep.lambda[i] = hi;  // capacity ~ 0: push the RRH toward silence
      return;
    }
    double lo = hi / 8.0;
    guard = 0;
    while (lo > 1e-18 && excess(lo) <= 0.0 && guard++ < 80) {
      hi = lo;
      lo /= 8.0;
    }
    if (excess(lo) <= 0.0) {
      rep.lambda[i] = lo;  // constraint slack for arbitrarily small lambda
      return;
    }
    guard = 0;
    while (hi - lo > kBisectWidth * std::max(1.0, hi) && guard++ < 200) {
      const double mid = 0.5 * (lo + hi);
      if (excess(mid) > 0.0) lo = mid; else hi = mid;
    }
    excess(hi);  // leave the feasible endpoint in place
  };

  auto bisect_mu = [&](int i) {
    auto excess = [&](double mu) {
      rep.mu[i] = mu;
      DigitalPoint p = point_at();
      return p.power[i] - spec.cfg.tx_power_limit[i];
    };
    if (excess(0.0) <= 0.0) return;  // inactive
    double hi = 1.0;
    int guard = 0;
    while (excess(hi) > 0.0 && hi < 1e15 && guard++ < 80) hi *= 8.0;
    double lo = hi / 8.0;
    guard = 0;
    while (hi - lo > kBisectWidth * std::max(1.0, hi) && guard++ < 200) {
      const double mid = 0.5 * (lo + hi);
      if (excess(mid) > 0.0) lo = mid; else hi = mid;
    }
    excess(hi);
  };

  DigitalPoint p;
  std::vector<double> prev_lambda = rep.lambda, prev_mu = rep.mu;
  int sweep = 0;
  for (; sweep < kMaxDualSweeps; ++sweep) {
    for (int i = 0; i < w.n_rrh; ++i) {
      bisect_lambda(i);
      bisect_mu(i);
    }
    p = point_at();
    rep.objective_trace.push_back(digital_objective_value(w, p));
    double viol = 0.0;
    for (int i = 0; i < w.n_rrh; ++i) {
      viol = std::max(viol, pos(p.gtilde[i] - spec.cfg.fronthaul_capacity[i]));
      viol = std::max(viol, pos(p.power[i] - spec.cfg.tx_power_limit[i]));
    }
    double move = 0.0;
    for (int i = 0; i < w.n_rrh; ++i) {
      move = std::max(move, std::abs(rep.lambda[i] - prev_lambda[i]) /
                                std::max(1.0, rep.lambda[i]));
      move = std::max(move, std::abs(rep.mu[i] - prev_mu[i]) /
                                std::max(1.0, rep.mu[i]));
    }
    prev_lambda = rep.lambda;
    prev_mu = rep.mu;
    if (viol <= 0.5 * kFeasTol && move <= 1e-7) break;
  }
  rep.iterations = sweep + 1;

  DigitalVars out;
  out.digital = p.v;
  out.omega = p.omega;

  rep.kkt = digital_kkt(w, out, &rep.lambda, &rep.mu);
  rep.kkt_residual = rep.kkt.total();
  rep.status = (rep.kkt_residual <= kKktTol) ? SolveStatus::Converged
                                             : SolveStatus::MaxIter;

  // Never return worse than the warm start (solver post-condition).
  if (warm_start != nullptr) {
    const double obj_out = digital_objective(spec, out);
    const double obj_in = digital_objective(spec, *warm_start);
    if (obj_in > obj_out + 1e-12) {
      out = *warm_start;
      rep.kkt = digital_kkt(w, out, nullptr, nullptr);
      rep.kkt_residual = rep.kkt.total();
      rep.status = (rep.kkt_residual <= kKktTol) ? SolveStatus::Converged
                                                 : SolveStatus::MaxIter;
    }
  }
  return {out, rep};
}

KktBreakdown kkt_residual(const DigitalSubproblem& spec,
                          const DigitalVars& candidate) {
  DigitalWork w = make_digital_work(spec);
  return digital_kkt(w, candidate, nullptr, nullptr);
}

// ---------------------------------------------------------------------------
// Relaxed RF subproblem
//
// minimize  J(V) = sum_t sum_k chat_{k,t} e_{k,t}(V) + sum_{i,t} pi_{i,t} p_{i,t}(V)
// over |V_{i,a,b}| <= 1, by cyclic coordinate descent: J restricted to one
// entry is alpha |z|^2 - 2 Re(beta^* z) + const, minimized at beta/alpha and
// clipped radially to the unit disk. Power multipliers mu_{i,t} are bisected
// per constraint; EE mode carries one scalar nu_t per sample.
// ---------------------------------------------------------------------------

namespace {

struct RfWork {
  const RfSubproblem* spec = nullptr;
  int n_rrh = 0, n_ue = 0, n = 0, m = 0, T = 0;
  bool ee = false;
  // Frozen per-sample data.
  std::vector<std::vector<double>> raw_c;  // [t][k] = w_k w~_{k,t}/ln2
  std::vector<std::vector<double>> cu2;    // [t][k] = raw_c |u|^2 (no weight, no nu)
  std::vector<double> gamma_const;         // [t]
  std::vector<std::vector<Mat>> q;         // [t][i] = sum_k d d^H + Omega_i
  std::vector<double> nu;                  // [t], 1 in WSR mode
  std::vector<double> weight;              // [t]
  std::vector<double> rho;                 // [t]
  // h_{k,i} entries are read from samples[t].h[k].segment(i*m, m).
};

struct RfState {
  std::vector<Mat> v;               // current RF matrices
  std::vector<Mat> s;               // [t], s(k,l) = h_k^H Vbar v_l
  std::vector<std::vector<std::vector<Vec>>> wvec;  // [t][k][i] = V_i^H h_{k,i}
};

RfWork make_rf_work(const RfSubproblem& spec) {
  RfWork w;
  w.spec = &spec;
  w.n_rrh = spec.cfg.num_rrh;
  w.n_ue = spec.cfg.num_ue;
  w.n = spec.cfg.rf_chains;
  w.m = spec.cfg.antennas_per_rrh;
  w.T = static_cast<int>(spec.samples.size());
  w.ee = spec.mode == ObjectiveMode::EeSurrogate;
  w.raw_c.resize(w.T);
  w.cu2.resize(w.T);
  w.gamma_const.assign(w.T, 0.0);
  w.q.resize(w.T);
  w.nu.assign(w.T, 1.0);
  w.weight.resize(w.T);
  w.rho.resize(w.T);
  for (int t = 0; t < w.T; ++t) {
    const RfSample& smp = spec.samples[t];
    w.weight[t] = smp.weight;
    w.rho[t] = smp.state.rho;
    if (w.ee && !(w.rho[t] > 0.0)) {
      throw std::invalid_argument("solve_rf_relaxed: EE mode requires rho > 0");
    }
    w.raw_c[t].resize(w.n_ue);
    w.cu2[t].resize(w.n_ue);
    for (int k = 0; k < w.n_ue; ++k) {
      const double wt = smp.state.w_tilde[k];
      if (!(wt > 0.0)) {
        throw std::invalid_argument("solve_rf_relaxed: w_tilde must be > 0");
      }
      w.raw_c[t][k] = spec.cfg.weights[k] * wt / kLn2;
      w.cu2[t][k] = w.raw_c[t][k] * std::norm(smp.state.u[k]);
      w.gamma_const[t] += spec.cfg.weights[k] / kLn2 * (std::log(wt) + 1.0);
    }
    w.q[t].resize(w.n_rrh);
    for (int i = 0; i < w.n_rrh; ++i) {
      Mat q = smp.omega[i];
      for (int k = 0; k < w.n_ue; ++k) {
        const auto d = smp.digital[k].segment(i * w.n, w.n);
        q.noalias() += d * d.adjoint();
      }
      w.q[t][i] = linalg::hermitize(q);
    }
  }
  return w;
}

RfState make_rf_state(const RfWork& w, const std::vector<Mat>& v) {
  RfState st;
  st.v = v;
  st.s.assign(w.T, Mat());
  st.wvec.assign(w.T, {});
  for (int t = 0; t < w.T; ++t) {
    const RfSample& smp = w.spec->samples[t];
    Mat s(w.n_ue, w.n_ue);
    st.wvec[t].assign(w.n_ue, std::vector<Vec>(w.n_rrh));
    for (int k = 0; k < w.n_ue; ++k) {
      for (int i = 0; i < w.n_rrh; ++i) {
        st.wvec[t][k][i] = v[i].adjoint() * smp.h[k].segment(i * w.m, w.m);
      }
    }
    for (int k = 0; k < w.n_ue; ++k) {
      for (int l = 0; l < w.n_ue; ++l) {
        Cplx acc(0.0, 0.0);
        for (int i = 0; i < w.n_rrh; ++i) {
          acc += st.wvec[t][k][i].dot(smp.digital[l].segment(i * w.n, w.n));
        }
        s(k, l) = acc;
      }
    }
    st.s[t] = s;
  }
  return st;
}

double rf_sample_power(const RfWork& w, const RfState& st, int i, int t) {
  return (st.v[i] * w.q[t][i] * st.v[i].adjoint()).trace().real();
}

// MSE of UE k in sample t from the cached inner products.
double rf_mse(const RfWork& w, const RfState& st, int t, int k) {
  const RfSample& smp = w.spec->samples[t];
  const Cplx u = smp.state.u[k];
  double zeta = w.spec->cfg.dl_noise_var;
  for (int l = 0; l < w.n_ue; ++l) {
    if (l != k) zeta += std::norm(st.s[t](k, l));
  }
  for (int i = 0; i < w.n_rrh; ++i) {
    const Vec& wk = st.wvec[t][k][i];
    zeta += (wk.adjoint() * smp.omega[i] * wk).real()(0, 0);
  }
  return std::norm(1.0 - std::conj(u) * st.s[t](k, k)) + std::norm(u) * zeta;
}

double rf_gamma(const RfWork& w, const RfState& st, int t) {
  double acc = w.gamma_const[t];
  for (int k = 0; k < w.n_ue; ++k) acc -= w.raw_c[t][k] * rf_mse(w, st, t, k);
  return acc;
}

// One full coordinate-descent pass at fixed penalties; returns max |dz|.
// pi[i*T + t] is the total quadratic power coefficient per (RRH, sample).
double rf_cd_sweep(const RfWork& w, RfState& st, const std::vector<double>& pi) {
  double max_step = 0.0;
  for (int i = 0; i < w.n_rrh; ++i) {
    for (int a = 0; a < w.m; ++a) {
      for (int b = 0; b < w.n; ++b) {
        double alpha = 0.0;
        Cplx grad(0.0, 0.0);
        for (int t = 0; t < w.T; ++t) {
          const RfSample& smp = w.spec->samples[t];
          const double scale_t = w.weight[t] * w.nu[t];
          const double qbb = w.q[t][i](b, b).real();
          double coef = 0.0;
          for (int k = 0; k < w.n_ue; ++k) {
            const double cc = scale_t * w.cu2[t][k];
            if (cc == 0.0) continue;
            const Cplx h_a = smp.h[k](i * w.m + a);
            coef += cc * std::norm(h_a);
            const Cplx u = smp.state.u[k];
            Cplx inner(0.0, 0.0);
            for (int l = 0; l < w.n_ue; ++l) {
              inner += st.s[t](k, l) * std::conj(smp.digital[l](i * w.n + b));
            }
            inner += std::conj((smp.omega[i] * st.wvec[t][k][i])(b));
            const Cplx lin = -u * std::conj(smp.digital[k](i * w.n + b)) +
                             std::norm(u) * inner;
            // note: cc = scale * c_k |u_k|^2; the linear term carries c_k, so
            // divide the |u|^2 back out via raw_c.
            grad += scale_t * w.raw_c[t][k] * h_a * lin;
          }
          alpha += coef * qbb;
          alpha += pi[i * w.T + t] * qbb;
          grad += pi[i * w.T + t] * (st.v[i].row(a) * w.q[t][i].col(b))(0, 0);
        }
        if (alpha <= 1e-300) continue;  // flat in this entry
        const Cplx z_old = st.v[i](a, b);
        const Cplx beta = alpha * z_old - grad;
        Cplx z = beta / alpha;
        const double mag = std::abs(z);
        if (mag > 1.0) z /= mag;
        const Cplx dz = z - z_old;
        const double step = std::abs(dz);
        if (step <= 0.0) continue;
        max_step = std::max(max_step, step);
        st.v[i](a, b) = z;
        for (int t = 0; t < w.T; ++t) {
          const RfSample& smp = w.spec->samples[t];
          for (int k = 0; k < w.n_ue; ++k) {
            const Cplx h_a = smp.h[k](i * w.m + a);
            const Cplx base = std::conj(h_a) * dz;
            for (int l = 0; l < w.n_ue; ++l) {
              st.s[t](k, l) += base * smp.digital[l](i * w.n + b);
            }
            st.wvec[t][k][i](b) += std::conj(dz) * h_a;
          }
        }
      }
    }
  }
  return max_step;
}

void rf_cd_solve(const RfWork& w, RfState& st, const std::vector<double>& pi,
                 int max_sweeps = 400) {
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const double step = rf_cd_sweep(w, st, pi);
    if (step < 1e-11) break;
  }
}

std::vector<double> rf_effective_pi(const RfWork& w,
                                    const std::vector<double>& mu) {
  std::vector<double> pi(w.n_rrh * w.T, 0.0);
  for (int i = 0; i < w.n_rrh; ++i) {
    for (int t = 0; t < w.T; ++t) {
      pi[i * w.T + t] = mu[i * w.T + t] + (w.ee ? w.weight[t] / w.rho[t] : 0.0);
    }
  }
  return pi;
}

double rf_objective_value(const RfWork& w, const RfState& st) {
  double acc = 0.0;
  for (int t = 0; t < w.T; ++t) {
    const double gamma = rf_gamma(w, st, t);
    if (!w.ee) {
      acc += w.weight[t] * gamma;
    } else {
      if (gamma <= 0.0) return kNegInf;
      double pt = w.spec->cfg.static_power();
      for (int i = 0; i < w.n_rrh; ++i) pt += rf_sample_power(w, st, i, t);
      acc += w.weight[t] *
             (std::log(gamma) - std::log(w.rho[t]) - pt / w.rho[t] + 1.0);
    }
  }
  return acc;
}

// Primal solve at fixed multipliers. In EE mode the per-sample scalars
// nu_t = 1/Gamma_t are resolved here by bisection (nu_t * Gamma_t(x(nu)) - 1
// is increasing in nu_t), cycled until every sample is consistent, so that
// multiplier bisections always see a stationary primal point.
void rf_primal_solve(RfWork& w, RfState& st, const std::vector<double>& mu) {
  const std::vector<double> pi = rf_effective_pi(w, mu);
  if (!w.ee) {
    rf_cd_solve(w, st, pi);
    return;
  }
  for (int round = 0; round < 40; ++round) {
    double worst = 0.0;
    for (int t = 0; t < w.T; ++t) {
      auto f = [&](double nu) {
        w.nu[t] = nu;
        rf_cd_solve(w, st, pi, 120);
        return nu * rf_gamma(w, st, t) - 1.0;
      };
      const double hint = w.nu[t] > 0.0 ? w.nu[t] : 1.0;
      double lo = hint / 4.0, hi = hint * 4.0;
      int guard = 0;
      while (f(hi) < 0.0 && hi < 1e14 && guard++ < 60) hi *= 8.0;
      if (f(hi) < 0.0) continue;  // degenerate sample
      guard = 0;
      while (f(lo) > 0.0 && lo > 1e-14 && guard++ < 60) lo /= 8.0;
      guard = 0;
      while (hi - lo > 1e-10 * std::max(1.0, hi) && guard++ < 200) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) >= 0.0) hi = mid; else lo = mid;
      }
      f(hi);
    }
    for (int t = 0; t < w.T; ++t) {
      const double g = rf_gamma(w, st, t);
      if (g > 0.0) worst = std::max(worst, std::abs(w.nu[t] * g - 1.0));
    }
    if (worst <= 1e-9) break;
  }
}

// Gradient of the true (maximization) objective w.r.t. V_i^*, plus the
// per-constraint power gradients; used for the KKT residual.
void rf_true_gradients(const RfWork& w, const RfState& st,
                       std::vector<Mat>* obj_grad,
                       std::vector<Mat>* pow_grad,
                       std::vector<double>* pow_val) {
  obj_grad->assign(w.n_rrh, Mat::Zero(w.m, w.n));
  pow_grad->assign(w.n_rrh * w.T, Mat());
  pow_val->assign(w.n_rrh * w.T, 0.0);
  for (int t = 0; t < w.T; ++t) {
    const RfSample& smp = w.spec->samples[t];
    const double gamma = rf_gamma(w, st, t);
    const double obj_scale =
        w.ee ? ((gamma > 0.0) ? w.weight[t] / gamma : 1e30) : w.weight[t];
    for (int i = 0; i < w.n_rrh; ++i) {
      Mat g = Mat::Zero(w.m, w.n);
      for (int k = 0; k < w.n_ue; ++k) {
        const double ck = w.raw_c[t][k];
        if (ck == 0.0) continue;
        const Cplx u = smp.state.u[k];
        const auto h_ki = smp.h[k].segment(i * w.m, w.m);
        Vec row = Vec::Zero(w.n);
        row += -u * smp.digital[k].segment(i * w.n, w.n).conjugate();
        if (std::norm(u) > 0.0) {
          Vec lin = Vec::Zero(w.n);
          for (int l = 0; l < w.n_ue; ++l) {
            lin += st.s[t](k, l) * smp.digital[l].segment(i * w.n, w.n).conjugate();
          }
          lin += (smp.omega[i] * st.wvec[t][k][i]).conjugate();
          row += std::norm(u) * lin;
        }
        // d e_k / d V_i^* = h_ki * row^T
        g.noalias() += ck * (h_ki * row.transpose());
      }
      (*obj_grad)[i] += -obj_scale * g;  // maximize: gradient of +objective
      if (w.ee) {
        (*obj_grad)[i] -= (w.weight[t] / w.rho[t]) * (st.v[i] * w.q[t][i]);
      }
      (*pow_grad)[i * w.T + t] = st.v[i] * w.q[t][i];
      (*pow_val)[i * w.T + t] = rf_sample_power(w, st, i, t);
    }
  }
}

KktBreakdown rf_kkt(const RfWork& w, const RfState& st,
                    const std::vector<double>* mu_in) {
  std::vector<Mat> obj_grad;
  std::vector<Mat> pow_grad;
  std::vector<double> pow_val;
  rf_true_gradients(w, st, &obj_grad, &pow_grad, &pow_val);

  const int n_con = w.n_rrh * w.T;
  std::vector<double> mu(n_con, 0.0);
  if (mu_in != nullptr) {
    mu = *mu_in;
  } else {
    // Fit the power multipliers on the interior entries, where the disk
    // multipliers vanish and stationarity is linear in mu.
    std::vector<std::pair<int, std::pair<int, int>>> interior;
    for (int i = 0; i < w.n_rrh; ++i) {
      for (int a = 0; a < w.m; ++a) {
        for (int b = 0; b < w.n; ++b) {
          if (std::abs(st.v[i](a, b)) < 1.0 - 1e-9) interior.push_back({i, {a, b}});
        }
      }
    }
    if (!interior.empty()) {
      Eigen::MatrixXd d(2 * interior.size(), n_con);
      RealVec g0(2 * interior.size());
      for (size_t r = 0; r < interior.size(); ++r) {
        const int i = interior[r].first;
        const int a = interior[r].second.first;
        const int b = interior[r].second.second;
        g0(2 * r) = obj_grad[i](a, b).real();
        g0(2 * r + 1) = obj_grad[i](a, b).imag();
        for (int j = 0; j < n_con; ++j) {
          Cplx val(0.0, 0.0);
          if (j / w.T == i && pow_grad[j].size() > 0) val = pow_grad[j](a, b);
          d(2 * r, j) = val.real();
          d(2 * r + 1, j) = val.imag();
        }
      }
      const RealVec fit = nnls(d, g0);
      for (int j = 0; j < n_con; ++j) mu[j] = fit(j);
    }
  }

  KktBreakdown kkt;
  double grad_scale = 1.0;
  for (int i = 0; i < w.n_rrh; ++i) {
    grad_scale = std::max(grad_scale, obj_grad[i].cwiseAbs().maxCoeff());
  }
  for (int i = 0; i < w.n_rrh; ++i) {
    Mat resid = obj_grad[i];
    for (int t = 0; t < w.T; ++t) {
      if (mu[i * w.T + t] != 0.0) {
        resid -= mu[i * w.T + t] * pow_grad[i * w.T + t];
      }
    }
    for (int a = 0; a < w.m; ++a) {
      for (int b = 0; b < w.n; ++b) {
        const Cplx z = st.v[i](a, b);
        const Cplx q = resid(a, b);
        const double mag = std::abs(z);
        double r;
        if (mag < 1.0 - 1e-9) {
          r = std::abs(q);
        } else {
          // boundary: q = eta z with eta >= 0 at optimality
          const double eta = (std::conj(z) * q).real() / std::max(mag * mag, 1e-30);
          const Cplx tangential = q - eta * z;
          r = std::abs(tangential) + pos(-eta);
        }
        kkt.stationarity = std::max(kkt.stationarity, r / grad_scale);
        kkt.primal_feasibility = std::max(kkt.primal_feasibility, pos(mag - 1.0 - 1e-9));
      }
    }
  }
  for (int j = 0; j < n_con; ++j) {
    const int i = j / w.T;
    const double slack = pow_val[j] - w.spec->cfg.tx_power_limit[i];
    kkt.primal_feasibility = std::max(kkt.primal_feasibility, pos(slack));
    kkt.complementary_slackness =
        std::max(kkt.complementary_slackness,
                 std::abs(mu[j] * slack) / std::max(1.0, std::abs(mu[j])));
  }
  return kkt;
}

}  // namespace

double rf_objective(const RfSubproblem& spec, const std::vector<Mat>& rf) {
  RfWork w = make_rf_work(spec);
  RfState st = make_rf_state(w, rf);
  if (w.ee) {
    for (int t = 0; t < w.T; ++t) {
      const double g = rf_gamma(w, st, t);
      w.nu[t] = (g > 0.0) ? 1.0 / g : 1.0;
    }
  }
  return rf_objective_value(w, st);
}

std::pair<std::vector<Mat>, SolveReport> solve_rf_relaxed(
    const RfSubproblem& spec, const std::vector<Mat>& warm_start) {
  RfWork w = make_rf_work(spec);
  SolveReport rep;
  const int n_con = w.n_rrh * w.T;
  rep.mu.assign(n_con, 0.0);

  // Start from the warm point scaled into the feasible set.
  std::vector<Mat> v0 = warm_start;
  for (Mat& v : v0) {
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      for (Eigen::Index c = 0; c < v.cols(); ++c) {
        const double mag = std::abs(v(r, c));
        if (mag > 1.0) v(r, c) /= mag;
      }
    }
  }
  RfState st = make_rf_state(w, v0);

  // Flat-objective screen: nothing couples V to the objective.
  double cu2_max = 0.0;
  for (int t = 0; t < w.T; ++t) {
    for (int k = 0; k < w.n_ue; ++k) cu2_max = std::max(cu2_max, w.cu2[t][k]);
  }
  bool any_power_violated = false;
  for (int i = 0; i < w.n_rrh && !any_power_violated; ++i) {
    for (int t = 0; t < w.T; ++t) {
      if (rf_sample_power(w, st, i, t) > spec.cfg.tx_power_limit[i] + kFeasTol) {
        any_power_violated = true;
        break;
      }
    }
  }
  if (cu2_max <= 0.0 && !any_power_violated) {
    rep.status = SolveStatus::Converged;
    rep.objective_trace.push_back(rf_objective_value(w, st));
    return {st.v, rep};
  }

  if (w.ee) {
    for (int t = 0; t < w.T; ++t) {
      const double g = rf_gamma(w, st, t);
      w.nu[t] = (g > 0.0) ? 1.0 / g : 1.0;
    }
  }

  auto solve_at_mu = [&]() { rf_primal_solve(w, st, rep.mu); };

  auto bisect_mu = [&](int i, int t) {
    const int j = i * w.T + t;
    auto excess = [&](double mu) {
      rep.mu[j] = mu;
      solve_at_mu();
      return rf_sample_power(w, st, i, t) - spec.cfg.tx_power_limit[i];
    };
    if (excess(0.0) <= 0.0) return;
    double hi = std::max(rep.mu[j], 1e-6);
    int guard = 0;
    while (excess(hi) > 0.0 && hi < 1e15 && guard++ < 80) hi *= 8.0;
    double lo = hi / 8.0;
    guard = 0;
    while (lo > 1e-18 && excess(lo) <= 0.0 && guard++ < 80) {
      hi = lo;
      lo /= 8.0;
    }
    guard = 0;
    while (hi - lo > kBisectWidth * std::max(1.0, hi) && guard++ < 200) {
      const double mid = 0.5 * (lo + hi);
      if (excess(mid) > 0.0) lo = mid; else hi = mid;
    }
    excess(hi);
  };

  std::vector<double> prev_mu = rep.mu;
  int sweep = 0;
  for (; sweep < kMaxDualSweeps; ++sweep) {
    for (int i = 0; i < w.n_rrh; ++i) {
      for (int t = 0; t < w.T; ++t) bisect_mu(i, t);
    }
    solve_at_mu();
    rep.objective_trace.push_back(rf_objective_value(w, st));
    double viol = 0.0;
    for (int i = 0; i < w.n_rrh; ++i) {
      for (int t = 0; t < w.T; ++t) {
        viol = std::max(viol, pos(rf_sample_power(w, st, i, t) -
                                  spec.cfg.tx_power_limit[i]));
      }
    }
    double move = 0.0;
    for (int j = 0; j < n_con; ++j) {
      move = std::max(move, std::abs(rep.mu[j] - prev_mu[j]) /
                                std::max(1.0, rep.mu[j]));
    }
    bool nu_stable = true;
    if (w.ee) {
      for (int t = 0; t < w.T; ++t) {
        const double g = rf_gamma(w, st, t);
        if (g > 0.0 && std::abs(w.nu[t] * g - 1.0) > 1e-7) nu_stable = false;
      }
    }
    prev_mu = rep.mu;
    if (viol <= 0.5 * kFeasTol && move <= 1e-7 && nu_stable) break;
  }
  rep.iterations = sweep + 1;

  rep.kkt = rf_kkt(w, st, nullptr);
  rep.kkt_residual = rep.kkt.total();
  rep.status = (rep.kkt_residual <= kKktTol) ? SolveStatus::Converged
                                             : SolveStatus::MaxIter;

  // Keep-best guard against the (feasible) warm start.
  {
    RfState st_in = make_rf_state(w, v0);
    bool in_feasible = true;
    for (int i = 0; i < w.n_rrh && in_feasible; ++i) {
      for (int t = 0; t < w.T; ++t) {
        if (rf_sample_power(w, st_in, i, t) >
            spec.cfg.tx_power_limit[i] + kFeasTol) {
          in_feasible = false;
          break;
        }
      }
    }
    if (in_feasible) {
      const double obj_out = rf_objective(spec, st.v);
      const double obj_in = rf_objective(spec, v0);
      if (obj_in > obj_out + 1e-12) {
        st = st_in;
        rep.kkt = rf_kkt(w, st, nullptr);
        rep.kkt_residual = rep.kkt.total();
        rep.status = (rep.kkt_residual <= kKktTol) ? SolveStatus::Converged
                                                   : SolveStatus::MaxIter;
      }
    }
  }

  return {st.v, rep};
}

KktBreakdown kkt_residual(const RfSubproblem& spec,
                          const std::vector<Mat>& candidate) {
  RfWork w = make_rf_work(spec);
  RfState st = make_rf_state(w, candidate);
  return rf_kkt(w, st, nullptr);
}

}  // namespace cranhb::convex
