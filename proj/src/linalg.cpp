// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#include "cranhb/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace cranhb::linalg {

Mat hermitize(const Mat& a) { return 0.5 * (a + a.adjoint()); }

Mat psd_clamp(const Mat& a, double floor) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a));
  RealVec vals = es.eigenvalues();
  bool dirty = false;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals(i) < floor) {
      vals(i) = 0.0;
      dirty = true;
    }
  }
  if (!dirty) return hermitize(a);
  return hermitize(es.eigenvectors() * vals.asDiagonal().toDenseMatrix().cast<Cplx>() *
                   es.eigenvectors().adjoint());
}

Mat sqrt_psd(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a));
  RealVec vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return hermitize(es.eigenvectors() * vals.asDiagonal().toDenseMatrix().cast<Cplx>() *
                   es.eigenvectors().adjoint());
}

double logdet_hermitian(const Mat& a, double nudge) {
  Mat h = hermitize(a);
  h.diagonal().array() += Cplx(nudge, 0.0);
  Eigen::LLT<Mat> llt(h);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const double emin = es.eigenvalues().minCoeff();
    const double emax = es.eigenvalues().maxCoeff();
    throw NumericalFailure("logdet: matrix not PD after nudge (eigmin=" +
                               std::to_string(emin) + ")",
                           emax / std::max(emin, 1e-300));
  }
  double ld = 0.0;
  const Mat& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) ld += std::log(std::abs(l(i, i)));
  return 2.0 * ld;
}

namespace {

// Ridge policy shared by the solve/inverse helpers: add
// 1e-10*(trace/dim)*I when the condition number exceeds 1e12.
Mat regularized(const Mat& a, double* condition_out = nullptr) {
  Mat h = hermitize(a);
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const double emax = es.eigenvalues().cwiseAbs().maxCoeff();
  const double emin = es.eigenvalues().minCoeff();
  const double cond = (emin <= 0.0) ? std::numeric_limits<double>::infinity()
                                    : emax / emin;
  if (condition_out != nullptr) *condition_out = cond;
  if (cond > 1e12) {
    double scale = std::abs(h.trace()) / static_cast<double>(h.rows());
    if (scale <= 0.0) scale = 1.0;
    h.diagonal().array() += Cplx(1e-10 * scale, 0.0);
  }
  return h;
}

}  // namespace

Vec ridge_solve(const Mat& a, const Vec& b) {
  double cond = 0.0;
  Mat h = regularized(a, &cond);
  Eigen::LDLT<Mat> ldlt(h);
  if (ldlt.info() != Eigen::Success) {
    throw NumericalFailure("ridge_solve: factorization failed", cond);
  }
  return ldlt.solve(b);
}

Mat ridge_solve(const Mat& a, const Mat& b) {
  double cond = 0.0;
  Mat h = regularized(a, &cond);
  Eigen::LDLT<Mat> ldlt(h);
  if (ldlt.info() != Eigen::Success) {
    throw NumericalFailure("ridge_solve: factorization failed", cond);
  }
  return ldlt.solve(b);
}

Mat ridge_inverse(const Mat& a) {
  const Mat eye = Mat::Identity(a.rows(), a.cols());
  return ridge_solve(a, eye);
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double eig_max(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double eig_min(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace cranhb::linalg
