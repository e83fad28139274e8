// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#include "cranhb/optimizer.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "cranhb/linalg.hpp"
#include "cranhb/metrics.hpp"

namespace cranhb::optimizer {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::max();

convex::ObjectiveMode to_mode(ObjectiveKind k) {
  return k == ObjectiveKind::Wsr ? convex::ObjectiveMode::WsrSurrogate
                                 : convex::ObjectiveMode::EeSurrogate;
}

HybridSolution assemble(const std::vector<Mat>& rf,
                        const convex::DigitalVars& vars) {
  HybridSolution sol;
  sol.rf = rf;
  sol.digital = vars.digital;
  sol.omega = vars.omega;
  return sol;
}

// Effective error covariance blocks Ebar_{k,i} = V_i^H E_{k,i} V_i.
std::vector<std::vector<Mat>> effective_err_cov(
    const DigitalDesignInput& input, const std::vector<Mat>& rf) {
  std::vector<std::vector<Mat>> out;
  if (!input.imperfect()) return out;
  out.resize(input.h_stacked.size());
  for (size_t k = 0; k < input.h_stacked.size(); ++k) {
    out[k].resize(rf.size());
    for (size_t i = 0; i < rf.size(); ++i) {
      out[k][i] = linalg::hermitize(rf[i].adjoint() * input.err_cov[k][i] * rf[i]);
    }
  }
  return out;
}

// Receiver, weight and Sigma refresh at the current point (the closed forms
// that make every bound tight).
SurrogateState refresh_state(const DigitalDesignInput& input,
                             const HybridSolution& sol,
                             const SystemConfig& cfg, ObjectiveKind kind) {
  SurrogateState st;
  const int n_ue = cfg.num_ue;
  st.u.resize(n_ue);
  st.w_tilde.resize(n_ue);
  for (int k = 0; k < n_ue; ++k) {
    const Vec a = sol.effective_channel(input.h_stacked[k]);
    const Cplx sig = a.dot(sol.digital[k]);
    const double zeta =
        input.imperfect()
            ? metrics::interference_power_imperfect(
                  input.h_stacked[k], input.err_cov[k], sol, k, cfg.dl_noise_var)
            : metrics::interference_power(input.h_stacked[k], sol, k,
                                          cfg.dl_noise_var);
    const Cplx u = sig / (std::norm(sig) + zeta);
    st.u[k] = u;
    const double e_k = std::norm(1.0 - std::conj(u) * sig) + std::norm(u) * zeta;
    st.w_tilde[k] = 1.0 / e_k;
  }
  st.sigma.resize(cfg.num_rrh);
  for (int i = 0; i < cfg.num_rrh; ++i) {
    st.sigma[i] =
        metrics::tight_sigma(sol.digital, sol.omega[i], i, cfg.rf_chains);
    // Keep the linearization point strictly PD.
    st.sigma[i].diagonal().array() += Cplx(1e-12, 0.0);
  }
  if (kind == ObjectiveKind::Ee) st.rho = metrics::total_power(sol, cfg);
  return st;
}

// Small matched-filter seed: a WMMSE pass started at exactly zero digital
// variables has u_k = 0 and stalls at the zero fixed point, so the first
// iterate gets a feasibility-scaled matched-filter direction instead.
void seed_digital(const DigitalDesignInput& input, const std::vector<Mat>& rf,
                  const SystemConfig& cfg, convex::DigitalVars* vars) {
  double norm_max = 0.0;
  for (const Vec& v : vars->digital) norm_max = std::max(norm_max, v.norm());
  if (norm_max > 0.0) return;
  HybridSolution sol = assemble(rf, *vars);
  std::vector<Vec> mf(cfg.num_ue);
  for (int k = 0; k < cfg.num_ue; ++k) {
    const Vec a = sol.effective_channel(input.h_stacked[k]);
    const double nrm = a.norm();
    mf[k] = (nrm > 0.0) ? Vec(a / nrm) : Vec(Vec::Zero(cfg.digital_dim()));
  }
  // Scale so each RRH adds at most a quarter of its power budget.
  double c2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.num_rrh; ++i) {
    double add = 0.0;
    for (int k = 0; k < cfg.num_ue; ++k) {
      add += (rf[i] * mf[k].segment(i * cfg.rf_chains, cfg.rf_chains)).squaredNorm();
    }
    if (add > 0.0) c2 = std::min(c2, 0.25 * cfg.tx_power_limit[i] / add);
  }
  if (!std::isfinite(c2)) return;  // zero effective channels
  double c = std::sqrt(std::max(c2, 0.0));
  // Halve until the original fronthaul constraints hold with margin.
  for (int guard = 0; guard < 200 && c > 0.0; ++guard) {
    std::vector<Vec> cand(cfg.num_ue);
    for (int k = 0; k < cfg.num_ue; ++k) cand[k] = c * mf[k];
    bool ok = true;
    for (int i = 0; i < cfg.num_rrh; ++i) {
      const double g =
          metrics::fronthaul_rate(cand, vars->omega[i], i, cfg.rf_chains);
      if (g > 0.5 * cfg.fronthaul_capacity[i]) {
        ok = false;
        break;
      }
    }
    if (ok) {
      vars->digital = cand;
      return;
    }
    c *= 0.5;
  }
}

}  // namespace

double true_objective(ObjectiveKind kind, const DigitalDesignInput& input,
                      const HybridSolution& sol, const SystemConfig& cfg) {
  double wsr = 0.0;
  for (int k = 0; k < cfg.num_ue; ++k) {
    const double rate =
        input.imperfect()
            ? metrics::user_rate_imperfect(input.h_stacked[k], input.err_cov[k],
                                           sol, k, cfg.dl_noise_var)
            : metrics::user_rate(input.h_stacked[k], sol, k, cfg.dl_noise_var);
    wsr += cfg.weights[k] * rate;
  }
  if (kind == ObjectiveKind::Wsr) return wsr;
  return wsr / metrics::total_power(sol, cfg);
}

std::pair<convex::DigitalVars, OptimizationTrace> algorithm1(
    const DigitalDesignInput& input, const std::vector<Mat>& rf,
    const SystemConfig& cfg, const BcdConfig& bcd,
    const convex::DigitalVars* warm_start) {
  convex::DigitalVars vars = (warm_start != nullptr)
                                 ? *warm_start
                                 : convex::feasible_digital_init(rf, cfg);
  if (warm_start == nullptr) seed_digital(input, rf, cfg, &vars);

  OptimizationTrace trace;
  double prev = true_objective(bcd.objective, input, assemble(rf, vars), cfg);
  for (int iter = 0; iter < bcd.inner_max_iters; ++iter) {
    HybridSolution sol = assemble(rf, vars);
    convex::DigitalSubproblem spec;
    spec.rf = rf;
    spec.eff_channel.resize(cfg.num_ue);
    for (int k = 0; k < cfg.num_ue; ++k) {
      spec.eff_channel[k] = sol.effective_channel(input.h_stacked[k]);
    }
    spec.eff_err_cov = effective_err_cov(input, rf);
    spec.state = refresh_state(input, sol, cfg, bcd.objective);
    spec.cfg = cfg;
    spec.mode = to_mode(bcd.objective);

    auto [next, rep] = convex::solve_digital(spec, &vars);
    if (rep.status == convex::SolveStatus::Infeasible) {
      throw std::invalid_argument("algorithm1: infeasible subproblem: " +
                                  rep.infeasible_certificate);
    }
    vars = next;

    const HybridSolution cur = assemble(rf, vars);
    const double obj = true_objective(bcd.objective, input, cur, cfg);
    if (bcd.capture_trace) {
      const auto audit = metrics::audit_solution(cur, cfg, false);
      trace.entries.push_back({obj, Phase::DigitalStep,
                               audit.max_fronthaul_slack, audit.max_power_slack});
    }
    trace.outer_iters = iter + 1;
    if (std::abs(obj - prev) <= bcd.rel_tol * std::max(1.0, std::abs(obj))) {
      trace.converged = true;
      break;
    }
    prev = obj;
  }
  return {vars, trace};
}

std::pair<std::vector<Mat>, OptimizationTrace> algorithm2(
    const std::vector<RfDesignSample>& samples, const std::vector<Mat>& rf_init,
    const SystemConfig& cfg, const BcdConfig& bcd) {
  const int t_count = static_cast<int>(samples.size());
  std::vector<Mat> rf = rf_init;
  OptimizationTrace trace;

  auto aggregate_objective = [&]() {
    double acc = 0.0;
    for (const auto& smp : samples) {
      DigitalDesignInput in;
      in.h_stacked = smp.h_stacked;
      acc += true_objective(bcd.objective, in, assemble(rf, smp.vars), cfg);
    }
    return acc / t_count;
  };

  double prev = aggregate_objective();
  for (int iter = 0; iter < bcd.inner_max_iters; ++iter) {
    convex::RfSubproblem spec;
    spec.cfg = cfg;
    spec.mode = to_mode(bcd.objective);
    spec.samples.resize(t_count);
    for (int t = 0; t < t_count; ++t) {
      const auto& smp = samples[t];
      convex::RfSample s;
      s.h = smp.h_stacked;
      s.digital = smp.vars.digital;
      s.omega = smp.vars.omega;
      DigitalDesignInput in;
      in.h_stacked = smp.h_stacked;
      const HybridSolution sol = assemble(rf, smp.vars);
      s.state = refresh_state(in, sol, cfg, bcd.objective);
      if (bcd.objective == ObjectiveKind::Ee) {
        // Per-sample ratio auxiliaries: alpha_t at its bound equality,
        // beta_t = alpha_t, weight beta_t / T.
        const double wsr = true_objective(ObjectiveKind::Wsr, in, sol, cfg);
        const double pt = metrics::total_power(sol, cfg);
        const double alpha = wsr / pt;
        s.weight = (alpha > 0.0 ? alpha : 1e-12) / t_count;
      } else {
        s.weight = 1.0 / t_count;
      }
      spec.samples[t] = std::move(s);
    }

    auto [next_rf, rep] = convex::solve_rf_relaxed(spec, rf);
    rf = next_rf;

    const double obj = aggregate_objective();
    if (bcd.capture_trace) {
      double fh_slack = -std::numeric_limits<double>::infinity();
      double pw_slack = -std::numeric_limits<double>::infinity();
      for (const auto& smp : samples) {
        const auto audit = metrics::audit_solution(assemble(rf, smp.vars), cfg, false);
        fh_slack = std::max(fh_slack, audit.max_fronthaul_slack);
        pw_slack = std::max(pw_slack, audit.max_power_slack);
      }
      trace.entries.push_back({obj, Phase::RfStep, fh_slack, pw_slack});
    }
    trace.outer_iters = iter + 1;
    if (std::abs(obj - prev) <= bcd.rel_tol * std::max(1.0, std::abs(obj))) {
      trace.converged = true;
      break;
    }
    prev = obj;
  }
  return {rf, trace};
}

Mat project_constant_modulus(const Mat& rf_i) {
  Mat out(rf_i.rows(), rf_i.cols());
  for (Eigen::Index r = 0; r < rf_i.rows(); ++r) {
    for (Eigen::Index c = 0; c < rf_i.cols(); ++c) {
      const Cplx z = rf_i(r, c);
      const double mag = std::abs(z);
      out(r, c) = (mag > 0.0) ? z / mag : Cplx(1.0, 0.0);
    }
  }
  return out;
}

std::vector<Mat> project_constant_modulus(const std::vector<Mat>& rf) {
  std::vector<Mat> out;
  out.reserve(rf.size());
  for (const Mat& v : rf) out.push_back(project_constant_modulus(v));
  return out;
}

double restore_feasibility(HybridSolution& sol, const SystemConfig& cfg) {
  double tau2 = 1.0;
  for (int i = 0; i < cfg.num_rrh; ++i) {
    const double p = metrics::rrh_power(sol.rf[i], sol.digital, sol.omega[i], i);
    if (p > cfg.tx_power_limit[i]) tau2 = std::min(tau2, cfg.tx_power_limit[i] / p);
  }
  if (tau2 < 1.0) {
    const double tau = std::sqrt(tau2);
    for (Vec& v : sol.digital) v *= tau;
    for (Mat& om : sol.omega) om *= tau2;
  }
  // Joint scaling leaves every g_i unchanged exactly; re-verify and inflate
  // Omega if roundoff ever pushes one over.
  for (int round = 0; round < 3; ++round) {
    bool dirty = false;
    for (int i = 0; i < cfg.num_rrh; ++i) {
      double g = metrics::fronthaul_rate(sol.digital, sol.omega[i], i,
                                         cfg.rf_chains);
      int guard = 0;
      while (g > cfg.fronthaul_capacity[i] + 1e-9 && guard++ < 60) {
        sol.omega[i] *= 1.25;  // more quantization noise lowers g_i
        g = metrics::fronthaul_rate(sol.digital, sol.omega[i], i, cfg.rf_chains);
        dirty = true;
      }
    }
    if (!dirty) break;
    for (int i = 0; i < cfg.num_rrh; ++i) {
      const double p = metrics::rrh_power(sol.rf[i], sol.digital, sol.omega[i], i);
      if (p > cfg.tx_power_limit[i]) {
        const double s = cfg.tx_power_limit[i] / p;
        for (Vec& v : sol.digital) v *= std::sqrt(s);
        for (Mat& om : sol.omega) om *= s;
        tau2 *= s;
      }
    }
  }
  return tau2;
}

std::vector<Mat> random_phase_rf(const SystemConfig& cfg, Rng& rng) {
  std::vector<Mat> rf(cfg.num_rrh);
  for (int i = 0; i < cfg.num_rrh; ++i) {
    Mat v(cfg.antennas_per_rrh, cfg.rf_chains);
    for (int a = 0; a < cfg.antennas_per_rrh; ++a) {
      for (int b = 0; b < cfg.rf_chains; ++b) {
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        v(a, b) = Cplx(std::cos(phase), std::sin(phase));
      }
    }
    rf[i] = v;
  }
  return rf;
}

AlternationResult run_alternation(const std::vector<DigitalDesignInput>& samples,
                                  const std::vector<Mat>& rf_init,
                                  const SystemConfig& cfg, const BcdConfig& bcd,
                                  bool project) {
  const int t_count = static_cast<int>(samples.size());
  AlternationResult res;
  res.rf = rf_init;
  res.best_objective = kNegInf;

  std::vector<Mat> rf = rf_init;
  std::vector<convex::DigitalVars> digitals(t_count);
  std::vector<bool> have_digitals(t_count, false);

  auto aggregate = [&]() {
    double acc = 0.0;
    for (int t = 0; t < t_count; ++t) {
      acc += true_objective(bcd.objective, samples[t],
                            assemble(rf, digitals[t]), cfg);
    }
    return acc / t_count;
  };
  auto record = [&](double obj, Phase phase) {
    if (!bcd.capture_trace) return;
    double fh = -std::numeric_limits<double>::infinity();
    double pw = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < t_count; ++t) {
      const auto audit =
          metrics::audit_solution(assemble(rf, digitals[t]), cfg, false);
      fh = std::max(fh, audit.max_fronthaul_slack);
      pw = std::max(pw, audit.max_power_slack);
    }
    res.trace.entries.push_back({obj, phase, fh, pw});
  };
  auto consider_best = [&](double obj) {
    if (obj > res.best_objective) {
      res.best_objective = obj;
      res.rf = rf;
      res.digitals = digitals;
    }
  };

  std::vector<double> outer_objectives;
  double prev_outer = kNegInf;
  for (int outer = 0; outer < bcd.outer_max_iters; ++outer) {
    // Digital step, per sample (each sample owns its digital variables).
    for (int t = 0; t < t_count; ++t) {
      auto [vars, tr] =
          algorithm1(samples[t], rf, cfg, bcd,
                     have_digitals[t] ? &digitals[t] : nullptr);
      digitals[t] = std::move(vars);
      have_digitals[t] = true;
    }
    double obj = aggregate();
    record(obj, Phase::DigitalStep);
    consider_best(obj);

    // Coupled RF step over the relaxed feasible set.
    std::vector<RfDesignSample> rf_samples(t_count);
    for (int t = 0; t < t_count; ++t) {
      rf_samples[t] = {samples[t].h_stacked, digitals[t]};
    }
    auto [rf_next, tr2] = algorithm2(rf_samples, rf, cfg, bcd);
    rf = rf_next;
    obj = aggregate();
    record(obj, Phase::RfStep);
    if (!project) consider_best(obj);

    if (project) {
      rf = project_constant_modulus(rf);
      for (int t = 0; t < t_count; ++t) {
        HybridSolution sol = assemble(rf, digitals[t]);
        restore_feasibility(sol, cfg);
        digitals[t].digital = sol.digital;
        digitals[t].omega = sol.omega;
      }
      obj = aggregate();
      record(obj, Phase::Projection);
      consider_best(obj);
    }

    res.trace.outer_iters = outer + 1;
    outer_objectives.push_back(obj);
    if (outer > 0 &&
        std::abs(obj - prev_outer) <= bcd.rel_tol * std::max(1.0, std::abs(obj))) {
      res.trace.converged = true;
      break;
    }
    prev_outer = obj;
  }

  // Oscillation flag over the last 10 outer objectives.
  if (!res.trace.converged && outer_objectives.size() >= 10) {
    const auto tail = std::vector<double>(outer_objectives.end() - 10,
                                          outer_objectives.end());
    const double hi = *std::max_element(tail.begin(), tail.end());
    const double lo = *std::min_element(tail.begin(), tail.end());
    if (hi - lo > 1e-4 * std::max(1.0, std::abs(hi))) res.trace.oscillation = true;
  }
  return res;
}

std::pair<HybridSolution, OptimizationTrace> optimize_wsr_perfect(
    const ChannelRealization& ch, const SystemConfig& cfg,
    const BcdConfig& bcd, Rng& rng) {
  BcdConfig b = bcd;
  b.objective = ObjectiveKind::Wsr;
  DigitalDesignInput input;
  input.h_stacked.resize(cfg.num_ue);
  for (int k = 0; k < cfg.num_ue; ++k) input.h_stacked[k] = ch.stacked(k);
  Rng init = rng.child("rf-init");
  const std::vector<Mat> rf0 = random_phase_rf(cfg, init);
  AlternationResult res = run_alternation({input}, rf0, cfg, b, true);
  return {assemble(res.rf, res.digitals[0]), res.trace};
}

std::pair<HybridSolution, OptimizationTrace> optimize_ee_perfect(
    const ChannelRealization& ch, const SystemConfig& cfg,
    const BcdConfig& bcd, Rng& rng) {
  BcdConfig b = bcd;
  b.objective = ObjectiveKind::Ee;
  DigitalDesignInput input;
  input.h_stacked.resize(cfg.num_ue);
  for (int k = 0; k < cfg.num_ue; ++k) input.h_stacked[k] = ch.stacked(k);
  Rng init = rng.child("rf-init");
  const std::vector<Mat> rf0 = random_phase_rf(cfg, init);
  AlternationResult res = run_alternation({input}, rf0, cfg, b, true);
  return {assemble(res.rf, res.digitals[0]), res.trace};
}

}  // namespace cranhb::optimizer
