#include "pangle/intersection.hpp"

#include <cmath>

#include "pangle/error.hpp"

namespace pangle {
namespace {

struct Block {
    Matrix basis;
    Vector eigenvalues;
};

// Re-diagonalize Lambda restricted to the principal-vector coordinates `coords` (d x k).
Block project_block(const Matrix& class_basis, const Vector& lambda, const Matrix& coords) {
    Block out;
    if (coords.cols() == 0) {
        out.basis = Matrix(class_basis.rows(), 0);
        out.eigenvalues = Vector(0);
        return out;
    }
    const Matrix inner = coords.transpose() * lambda.asDiagonal() * coords;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (inner + inner.transpose()));
    // ascending from Eigen; reverse to descending
    Matrix q = es.eigenvectors().rowwise().reverse();
    out.eigenvalues = es.eigenvalues().reverse();
    out.basis = class_basis * coords * q;
    return out;
}

ClassSplit split_class(const GaussianClassModel& m, const Matrix& principal_coords, Index r) {
    const Index d = m.rank();
    const Matrix cap_coords = principal_coords.leftCols(r);
    const Matrix diff_coords = principal_coords.rightCols(d - r);
    Block cap = project_block(m.basis(), m.eigenvalues(), cap_coords);
    Block diff = project_block(m.basis(), m.eigenvalues(), diff_coords);

    ClassSplit out;
    out.intersection_basis = std::move(cap.basis);
    out.intersection_eigenvalues = std::move(cap.eigenvalues);
    out.difference_basis = std::move(diff.basis);
    out.difference_eigenvalues = std::move(diff.eigenvalues);
    if (r > 0 && r < d) {
        out.dropped_coupling = std::sqrt(2.0) *
            (cap_coords.transpose() * m.eigenvalues().asDiagonal() * diff_coords).norm();
    }
    return out;
}

}  // namespace

IntersectionSplit intersection_split(const GaussianClassModel& m1, const GaussianClassModel& m2,
                                     double zero_tol) {
    if (m1.ambient_dim() != m2.ambient_dim() || m1.rank() != m2.rank()) {
        throw InvalidArgument("intersection_split: models must share ambient dimension and rank");
    }
    IntersectionSplit out;
    out.angles = principal_angles(m1.subspace(), m2.subspace());
    out.intersection_rank = intersection_dimension(out.angles, zero_tol);

    // Principal vectors: U1 V and U2 W from the SVD of U1^T U2, columns ordered by
    // descending cosine (= ascending angle), so the first r columns span the intersection.
    Eigen::JacobiSVD<Matrix> svd(m1.basis().transpose() * m2.basis(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.first = split_class(m1, svd.matrixU(), out.intersection_rank);
    out.second = split_class(m2, svd.matrixV(), out.intersection_rank);
    return out;
}

}  // namespace pangle
