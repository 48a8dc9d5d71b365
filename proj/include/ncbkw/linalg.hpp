#pragma once

#include <Eigen/Dense>
#include <complex>

#include "ncbkw/errors.hpp"

namespace ncbkw {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;

// Default tolerances. Hermiticity/PSD checks scale the tolerance by
// max(1, op_norm(A)); solver-facing routines take tol explicitly.
inline constexpr double kHermTol = 1e-9;
inline constexpr double kDefaultTol = 1e-8;

CMat dagger(const CMat& a);

// Largest singular value, computed as sqrt(lambda_max(A†A)). 0 for empty.
double op_norm(const CMat& a);

struct EigHerm {
  Eigen::VectorXd values;  // ascending
  CMat vectors;            // unitary, A = V diag(values) V†
};

// Throws NotHermitian if ||A - A†|| > tol·max(1, ||A||).
EigHerm eig_herm(const CMat& a, double tol = kHermTol);

// True iff min eigenvalue >= -tol·max(1, ||A||). Throws NotHermitian.
bool is_psd(const CMat& a, double tol = kHermTol);

// Smallest eigenvalue of a Hermitian matrix (no PSD decision attached).
double min_eig_herm(const CMat& a, double tol = kHermTol);

// A^{-1/2} for Hermitian positive definite A; throws NotPositiveDefinite
// if the smallest eigenvalue is <= tol·max(1, ||A||).
CMat inv_sqrt_pd(const CMat& a, double tol = kHermTol);

CMat kron(const CMat& a, const CMat& b);

// Real coordinates of a Hermitian d×d matrix in the orthonormal basis
//   { E_ii } ∪ { (E_ij+E_ji)/√2 : i<j } ∪ { i(E_ij-E_ji)/√2 : i<j }
// (Frobenius inner product). Layout: d diagonal coords, then the
// symmetric pair coords, then the antisymmetric ones, pairs in
// lexicographic (i,j) order. The map is an isometry:
// ||coords||_2 = ||H||_F, and herm_from_coords∘herm_coords = id.
Eigen::VectorXd herm_coords(const CMat& h);
CMat herm_from_coords(const Eigen::VectorXd& c, int d);

inline double frob_norm(const CMat& a) { return a.norm(); }

}  // namespace ncbkw
