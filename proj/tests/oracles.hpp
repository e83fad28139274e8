// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
//
// Independent test oracles. These deliberately avoid the library's
// implementation paths: quadrature is adaptive Simpson instead of fixed
// Gauss-Legendre, and the constrained solver is a finite-difference
// log-barrier gradient ascent.
#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Cplx = std::complex<double>;

// Adaptive Simpson quadrature of a complex integrand on [a, b].
Cplx adaptive_simpson(const std::function<Cplx(double)>& f, double a, double b,
                      double tol = 1e-12);

struct BarrierProblem {
  // Objective to maximize.
  std::function<double(const Eigen::VectorXd&)> objective;
  // Inequality constraints c_j(x) <= 0 (return +large when undefined).
  std::vector<std::function<double(const Eigen::VectorXd&)>> constraints;
  Eigen::VectorXd start;  // strictly feasible
};

struct BarrierResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  // Barrier multiplier estimates 1/(t * (-c_j)) at the final point.
  std::vector<double> multipliers;
};

// Log-barrier path following with plain gradient ascent (central-difference
// gradients, Barzilai-Borwein initial step, Armijo backtracking).
BarrierResult barrier_maximize(const BarrierProblem& prob,
                               double t_final = 1e8,
                               double grad_tol = 1e-8);

}  // namespace oracle
