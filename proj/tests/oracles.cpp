// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include <cmath>
#include <limits>

namespace oracle {

namespace {

Cplx adaptive(const std::function<Cplx(double)>& f, double a, double b, Cplx fa,
              Cplx fb, Cplx fm, Cplx whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const Cplx flm = f(lm);
  const Cplx frm = f(rm);
  const Cplx left = ((m - a) / 6.0) * (fa + 4.0 * flm + fm);
  const Cplx right = ((b - m) / 6.0) * (fm + 4.0 * frm + fb);
  const Cplx delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive(f, a, m, fa, fm, flm, left, tol / 2.0, depth - 1) +
         adaptive(f, m, b, fm, fb, frm, right, tol / 2.0, depth - 1);
}

}  // namespace

Cplx adaptive_simpson(const std::function<Cplx(double)>& f, double a, double b,
                      double tol) {
  const Cplx fa = f(a);
  const Cplx fb = f(b);
  const Cplx fm = f(0.5 * (a + b));
  const Cplx whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
  return adaptive(f, a, b, fa, fb, fm, whole, tol, 50);
}

namespace {

constexpr double kInfeasible = -std::numeric_limits<double>::infinity();

double barrier_value(const BarrierProblem& prob, double t,
                     const Eigen::VectorXd& x) {
  double val;
  try {
    val = t * prob.objective(x);
    for (const auto& c : prob.constraints) {
      const double cv = c(x);
      if (cv >= 0.0 || !std::isfinite(cv)) return kInfeasible;
      val += std::log(-cv);
    }
  } catch (...) {
    return kInfeasible;
  }
  if (!std::isfinite(val)) return kInfeasible;
  return val;
}

Eigen::VectorXd barrier_gradient(const BarrierProblem& prob, double t,
                                 const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd g(n);
  Eigen::VectorXd xp = x;
  for (int i = 0; i < n; ++i) {
    const double h = 1e-6 * (1.0 + std::abs(x(i)));
    xp(i) = x(i) + h;
    const double fp = barrier_value(prob, t, xp);
    xp(i) = x(i) - h;
    const double fm = barrier_value(prob, t, xp);
    xp(i) = x(i);
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      // One-sided fallback near the boundary.
      const double f0 = barrier_value(prob, t, x);
      if (std::isfinite(fp)) {
        g(i) = (fp - f0) / h;
      } else if (std::isfinite(fm)) {
        g(i) = (f0 - fm) / h;
      } else {
        g(i) = 0.0;
      }
    } else {
      g(i) = (fp - fm) / (2.0 * h);
    }
  }
  return g;
}

}  // namespace

BarrierResult barrier_maximize(const BarrierProblem& prob, double t_final,
                               double grad_tol) {
  Eigen::VectorXd x = prob.start;
  for (double t = 1.0; t <= t_final; t *= 10.0) {
    double fx = barrier_value(prob, t, x);
    Eigen::VectorXd g = barrier_gradient(prob, t, x);
    Eigen::VectorXd x_prev = x, g_prev = g;
    double step = 1.0 / (1.0 + g.norm());
    for (int iter = 0; iter < 4000; ++iter) {
      if (g.lpNorm<Eigen::Infinity>() <= grad_tol * t) break;
      // Armijo backtracking from the BB step.
      double s = std::clamp(step, 1e-14, 1e6);
      const double g2 = g.squaredNorm();
      double f_new = kInfeasible;
      Eigen::VectorXd x_new;
      for (int bt = 0; bt < 70; ++bt) {
        x_new = x + s * g;
        f_new = barrier_value(prob, t, x_new);
        if (f_new > fx + 1e-4 * s * g2) break;
        s *= 0.5;
      }
      if (!(f_new > fx)) break;  // no ascent available
      x_prev = x;
      g_prev = g;
      x = x_new;
      fx = f_new;
      g = barrier_gradient(prob, t, x);
      const Eigen::VectorXd dx = x - x_prev;
      const Eigen::VectorXd dg = g - g_prev;
      const double denom = -dx.dot(dg);  // ascent: curvature is negative
      step = (denom > 1e-300) ? dx.squaredNorm() / denom : 2.0 * s;
    }
  }
  BarrierResult res;
  res.x = x;
  res.objective = prob.objective(x);
  res.multipliers.resize(prob.constraints.size());
  for (size_t j = 0; j < prob.constraints.size(); ++j) {
    const double cv = prob.constraints[j](x);
    res.multipliers[j] = (cv < 0.0) ? 1.0 / (t_final * (-cv)) : 0.0;
  }
  return res;
}

}  // namespace oracle
