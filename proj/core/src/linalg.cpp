#include "pangle/linalg.hpp"

#include <cmath>

#include "pangle/error.hpp"

namespace pangle::linalg {

double logdet_spd(const Matrix& spd) {
    Eigen::LLT<Matrix> llt(spd);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("logdet_spd: matrix is not positive definite");
    }
    const auto& l = llt.matrixLLT();
    double acc = 0.0;
    for (Index i = 0; i < l.rows(); ++i) acc += std::log(l(i, i));
    return 2.0 * acc;
}

double pseudo_determinant(const Matrix& sym, double rel_tol) {
    if (sym.size() == 0) return 1.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    const Vector& ev = es.eigenvalues();
    const double top = ev.maxCoeff();
    if (top <= 0.0) return 1.0;
    double prod = 1.0;
    for (Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > rel_tol * top) prod *= ev(i);
    }
    return prod;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

bool is_symmetric(const Matrix& m, double abs_tol) {
    if (m.rows() != m.cols()) return false;
    if (m.size() == 0) return true;
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= abs_tol;
}

double orthonormality_defect(const Matrix& basis) {
    if (basis.cols() == 0) return 0.0;
    const Matrix gram = basis.transpose() * basis;
    return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

void canonicalize_column_signs(Matrix& basis) {
    for (Index j = 0; j < basis.cols(); ++j) {
        Index arg = 0;
        basis.col(j).cwiseAbs().maxCoeff(&arg);
        if (basis(arg, j) < 0.0) basis.col(j) *= -1.0;
    }
}

Matrix clip_spectral_norm(const Matrix& a, double cap) {
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector s = svd.singularValues();
    if (s.size() == 0 || s(0) <= cap) return a;
    s = s.cwiseMin(cap);
    return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

}  // namespace pangle::linalg
