#pragma once

#include <cstddef>
#include <vector>

#include "pangle/linalg.hpp"

namespace pangle {

/// Angles below this many radians are treated as exactly zero.
inline constexpr double kZeroAngleTol = 1e-8;

/// Tolerance for the orthonormality check on a supplied basis.
inline constexpr double kOrthonormalTol = 1e-10;

/// A d-dimensional linear subspace of R^n, held as an orthonormal basis (n x d).
class Subspace {
public:
    /// Wrap an existing basis. Throws InvalidArgument unless B^T B = I within kOrthonormalTol.
    explicit Subspace(Matrix basis);

    const Matrix& basis() const noexcept { return basis_; }
    Index ambient_dim() const noexcept { return basis_.rows(); }
    Index rank() const noexcept { return basis_.cols(); }

    /// ||U^T x||^2
    double projection_energy(const Eigen::Ref<const Vector>& x) const;

private:
    Matrix basis_;
};

/// Top-`rank` left singular vectors of `data` (columns are samples), with the
/// largest-magnitude entry of each column made positive.
/// Throws RankDeficient when fewer than `rank` singular values exceed 1e-12.
Subspace orthonormal_basis(const Matrix& data, Index rank);

/// Ascending principal angles (radians) between two equal-rank subspaces.
class PrincipalAngles {
public:
    PrincipalAngles() = default;
    /// Angles must lie in [0, pi/2] and be nondecreasing.
    explicit PrincipalAngles(Vector radians);

    const Vector& radians() const noexcept { return radians_; }
    Index size() const noexcept { return radians_.size(); }
    double operator[](Index i) const { return radians_(i); }

    Vector cosines() const;
    Vector sines() const;
    double sum_cos_sq() const;

private:
    Vector radians_;
};

/// Principal angles via the SVD of U1^T U2. Angles of at least pi/4 come from
/// the cosines (arccos of clamped singular values); smaller angles come from
/// the singular values of (I - U1 U1^T) U2, which keeps near-zero angles
/// accurate to machine precision instead of sqrt(eps).
PrincipalAngles principal_angles(const Subspace& s1, const Subspace& s2);

/// sum_i sin^2(theta_i)
double chordal_distance_sq(const PrincipalAngles& angles);

struct SinSqProduct {
    double value = 1.0;           ///< product of sin^2 over the angles >= zero_tol
    Index excluded = 0;           ///< number of angles treated as zero
    bool all_excluded = false;    ///< every angle was zero, value is the empty product
};

SinSqProduct product_sin_sq_nonzero(const PrincipalAngles& angles, double zero_tol = kZeroAngleTol);

/// Multiplicity of zero among the angles, i.e. the dimension of the intersection.
Index intersection_dimension(const PrincipalAngles& angles, double zero_tol = kZeroAngleTol);

}  // namespace pangle
