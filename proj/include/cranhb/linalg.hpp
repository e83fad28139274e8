// SPDX-FileCopyrightText: Copyright (c) 2026 cranhb contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cranhb/types.hpp"

namespace cranhb::linalg {

// (A + A^H)/2.
Mat hermitize(const Mat& a);

// Clamp eigenvalues of a Hermitian matrix below `floor` to zero and
// re-symmetrize. Used to repair PSD matrices corrupted by roundoff.
Mat psd_clamp(const Mat& a, double floor = -1e-10);

// Hermitian PSD square root via eigendecomposition; negative eigenvalues
// are clamped to zero.
Mat sqrt_psd(const Mat& a);

// log(det(A)) of a Hermitian PD matrix via Cholesky on the Hermitian part,
// after nudging by `nudge`*I. Throws NumericalFailure if the factorization
// fails (matrix not PD after the nudge).
double logdet_hermitian(const Mat& a, double nudge = 1e-12);

// Solve A x = b for Hermitian PSD A. When cond(A) > 1e12 (or A is not
// invertible), a ridge 1e-10*(trace/dim)*I is added first.
Vec ridge_solve(const Mat& a, const Vec& b);
Mat ridge_solve(const Mat& a, const Mat& b);

// Inverse of a Hermitian PD matrix with the same ridge policy.
Mat ridge_inverse(const Mat& a);

// Kronecker product A (x) B.
Mat kron(const Mat& a, const Mat& b);

// Largest / smallest eigenvalue of a Hermitian matrix.
double eig_max(const Mat& a);
double eig_min(const Mat& a);

}  // namespace cranhb::linalg
