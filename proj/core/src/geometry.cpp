#include "pangle/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pangle/error.hpp"

namespace pangle {

Subspace::Subspace(Matrix basis) : basis_(std::move(basis)) {
    if (basis_.cols() < 1 || basis_.rows() < basis_.cols()) {
        throw InvalidArgument("Subspace: basis must be n x d with 1 <= d <= n, got " +
                              std::to_string(basis_.rows()) + " x " + std::to_string(basis_.cols()));
    }
    if (!basis_.allFinite()) throw InvalidArgument("Subspace: basis has non-finite entries");
    const double defect = linalg::orthonormality_defect(basis_);
    if (defect > kOrthonormalTol) {
        throw InvalidArgument("Subspace: basis columns are not orthonormal (max |B^T B - I| = " +
                              std::to_string(defect) + ")");
    }
}

double Subspace::projection_energy(const Eigen::Ref<const Vector>& x) const {
    return (basis_.transpose() * x).squaredNorm();
}

Subspace orthonormal_basis(const Matrix& data, Index rank) {
    if (data.cols() < 1) throw InvalidArgument("orthonormal_basis: need at least one sample");
    if (rank < 1 || rank > std::min(data.rows(), data.cols())) {
        throw InvalidArgument("orthonormal_basis: rank " + std::to_string(rank) +
                              " outside [1, min(n, N)] = [1, " +
                              std::to_string(std::min(data.rows(), data.cols())) + "]");
    }
    if (!data.allFinite()) throw InvalidArgument("orthonormal_basis: data has non-finite entries");

    Eigen::BDCSVD<Matrix> svd(data, Eigen::ComputeThinU);
    const Vector& s = svd.singularValues();
    const Index achieved = (s.array() > 1e-12).count();
    if (achieved < rank) {
        throw RankDeficient("orthonormal_basis: requested rank " + std::to_string(rank) +
                                " but data has numerical rank " + std::to_string(achieved),
                            achieved);
    }
    Matrix basis = svd.matrixU().leftCols(rank);
    linalg::canonicalize_column_signs(basis);
    return Subspace(std::move(basis));
}

PrincipalAngles::PrincipalAngles(Vector radians) : radians_(std::move(radians)) {
    for (Index i = 0; i < radians_.size(); ++i) {
        const double a = radians_(i);
        if (!(a >= 0.0 && a <= std::numbers::pi / 2)) {
            throw InvalidArgument("PrincipalAngles: angle outside [0, pi/2]");
        }
        if (i > 0 && a < radians_(i - 1)) throw InvalidArgument("PrincipalAngles: angles not ascending");
    }
}

Vector PrincipalAngles::cosines() const { return radians_.array().cos(); }
Vector PrincipalAngles::sines() const { return radians_.array().sin(); }
double PrincipalAngles::sum_cos_sq() const { return radians_.array().cos().square().sum(); }

PrincipalAngles principal_angles(const Subspace& s1, const Subspace& s2) {
    if (s1.ambient_dim() != s2.ambient_dim()) {
        throw InvalidArgument("principal_angles: ambient dimensions differ (" +
                              std::to_string(s1.ambient_dim()) + " vs " + std::to_string(s2.ambient_dim()) + ")");
    }
    if (s1.rank() != s2.rank()) {
        throw InvalidArgument("principal_angles: ranks differ (" + std::to_string(s1.rank()) + " vs " +
                              std::to_string(s2.rank()) + ")");
    }
    const Index d = s1.rank();
    const Matrix& u1 = s1.basis();
    const Matrix& u2 = s2.basis();

    const Matrix cross = u1.transpose() * u2;
    // singular values come back descending, so the cosines map to ascending angles
    const Vector cosines = Eigen::JacobiSVD<Matrix>(cross).singularValues();

    const Matrix residual = u2 - u1 * cross;
    Vector sines = Eigen::JacobiSVD<Matrix>(residual).singularValues();
    std::sort(sines.data(), sines.data() + sines.size());

    Vector angles(d);
    for (Index i = 0; i < d; ++i) {
        const double c = std::clamp(cosines(i), 0.0, 1.0);
        if (c * c >= 0.5 && i < sines.size()) {
            angles(i) = std::asin(std::clamp(sines(i), 0.0, 1.0));
        } else {
            angles(i) = std::acos(c);
        }
    }
    // the two branches meet at pi/4; enforce monotonicity against round-off at the seam
    for (Index i = 1; i < d; ++i) angles(i) = std::max(angles(i), angles(i - 1));
    return PrincipalAngles(std::move(angles));
}

double chordal_distance_sq(const PrincipalAngles& angles) {
    return angles.radians().array().sin().square().sum();
}

SinSqProduct product_sin_sq_nonzero(const PrincipalAngles& angles, double zero_tol) {
    SinSqProduct out;
    for (Index i = 0; i < angles.size(); ++i) {
        if (angles[i] < zero_tol) {
            ++out.excluded;
            continue;
        }
        const double s = std::sin(angles[i]);
        out.value *= s * s;
    }
    out.all_excluded = out.excluded == angles.size();
    return out;
}

Index intersection_dimension(const PrincipalAngles& angles, double zero_tol) {
    return (angles.radians().array() < zero_tol).count();
}

}  // namespace pangle
