#pragma once

#include "pangle/geometry.hpp"
#include "pangle/linalg.hpp"

namespace pangle {

/// Zero-mean Gaussian class with near low-rank covariance U diag(lambda) U^T + sigma^2 I.
class GaussianClassModel {
public:
    /// eigenvalues: length rank(), strictly positive, nonincreasing.
    /// noise_var >= 0 (sigma^2 = 0 is legal for sampling; bounds reject it).
    GaussianClassModel(Subspace subspace, Vector eigenvalues, double noise_var);

    /// Unit eigenvalues, the setting of every synthetic experiment.
    static GaussianClassModel isotropic(Subspace subspace, double noise_var);

    const Subspace& subspace() const noexcept { return subspace_; }
    const Matrix& basis() const noexcept { return subspace_.basis(); }
    const Vector& eigenvalues() const noexcept { return eigenvalues_; }
    double noise_var() const noexcept { return noise_var_; }
    Index ambient_dim() const noexcept { return subspace_.ambient_dim(); }
    Index rank() const noexcept { return subspace_.rank(); }

    /// Same subspace and spectrum with a different sigma^2.
    GaussianClassModel with_noise_var(double noise_var) const;

private:
    Subspace subspace_;
    Vector eigenvalues_;
    double noise_var_;
};

/// U Lambda U^T + sigma^2 I, symmetrized.
Matrix covariance(const GaussianClassModel& model);

}  // namespace pangle
