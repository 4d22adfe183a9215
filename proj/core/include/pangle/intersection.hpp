#pragma once

#include "pangle/geometry.hpp"
#include "pangle/model.hpp"

namespace pangle {

/// One class covariance split into the part living on the intersection of the
/// two class subspaces and the part living on its complement within the class span.
struct ClassSplit {
    Matrix intersection_basis;      ///< n x r
    Vector intersection_eigenvalues;
    Matrix difference_basis;        ///< n x (d - r)
    Vector difference_eigenvalues;
    /// Frobenius norm of the covariance coupling between the two blocks. Zero when
    /// the intersection is an invariant subspace of U Lambda U^T (e.g. Lambda = I);
    /// otherwise the split drops this term.
    double dropped_coupling = 0.0;
};

struct IntersectionSplit {
    Index intersection_rank = 0;
    PrincipalAngles angles;
    ClassSplit first;
    ClassSplit second;
};

/// Decompose two equal-rank class models along the intersection of their
/// subspaces. r counts principal angles below zero_tol. Each class's block is
/// built from its own principal vectors; eigenvalues come from projecting the
/// class covariance onto the block and re-diagonalizing (descending order).
IntersectionSplit intersection_split(const GaussianClassModel& m1, const GaussianClassModel& m2,
                                     double zero_tol = kZeroAngleTol);

}  // namespace pangle
