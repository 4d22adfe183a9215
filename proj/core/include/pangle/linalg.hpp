#pragma once

#include <Eigen/Dense>

namespace pangle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace linalg {

/// log det of a symmetric positive definite matrix via Cholesky.
/// Throws NumericalError when the factorization fails.
double logdet_spd(const Matrix& spd);

/// Product of the eigenvalues of a symmetric PSD matrix that exceed
/// rel_tol times the largest eigenvalue. The empty product is 1.
double pseudo_determinant(const Matrix& sym, double rel_tol = 1e-10);

bool all_finite(const Matrix& m);

bool is_symmetric(const Matrix& m, double abs_tol);

/// max_ij |A^T A - I|
double orthonormality_defect(const Matrix& basis);

/// Flip column signs so that the largest-magnitude entry of each column is positive.
void canonicalize_column_signs(Matrix& basis);

/// Projection onto {A : ||A||_2 <= cap} by clipping singular values.
Matrix clip_spectral_norm(const Matrix& a, double cap);

}  // namespace linalg
}  // namespace pangle
