#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pangle/data.hpp"
#include "pangle/linalg.hpp"

namespace pangle {

enum class TransformMethod { trait, lrt, lda, random, identity };

std::string to_string(TransformMethod method);
TransformMethod parse_transform_method(std::string_view name);

struct TrainingMeta {
    std::size_t iterations = 0;
    double initial_objective = 0.0;
    double final_objective = 0.0;
    std::vector<double> step_sizes;  // one per accepted step
    std::vector<double> objectives;  // objective after each accepted step (index 0: initialization)
    std::uint64_t seed = 0;
};

/// m x n feature extraction matrix, m <= n, finite entries.
class LinearTransform {
public:
    LinearTransform(Matrix matrix, TransformMethod method, TrainingMeta meta = {});

    static LinearTransform identity(Index n);

    const Matrix& matrix() const noexcept { return matrix_; }
    TransformMethod method() const noexcept { return method_; }
    const TrainingMeta& meta() const noexcept { return meta_; }
    Index output_dim() const noexcept { return matrix_.rows(); }
    Index input_dim() const noexcept { return matrix_.cols(); }

    Matrix apply(const Matrix& x) const;
    LabeledDataset apply(const LabeledDataset& ds) const;

private:
    Matrix matrix_;
    TransformMethod method_;
    TrainingMeta meta_;
};

/// Block-diagonal target Gram diag(X_1^T X_1, ..., X_K^T X_K), stored dense.
class TargetGram {
public:
    TargetGram(Matrix dense, std::vector<Index> block_sizes);

    const Matrix& dense() const noexcept { return dense_; }
    const std::vector<Index>& block_sizes() const noexcept { return block_sizes_; }
    Index size() const noexcept { return dense_.rows(); }

private:
    Matrix dense_;
    std::vector<Index> block_sizes_;
};

/// Columns of `ds` regrouped by class, i.e. the X matching build_target_gram(ds).
TargetGram build_target_gram(const LabeledDataset& ds);

/// (1/N^2) ||(AX)^T (AX) - T||_F^2
double trait_objective(const Matrix& a, const Matrix& x, const Matrix& t);

/// A (X X^T A^T A X X^T - X T X^T). The gradient of trait_objective is 4/N^2 times this.
Matrix trait_gradient(const Matrix& a, const Matrix& x, const Matrix& t);

/// Objective and gradient through the n x n moments C = X X^T and S = X T X^T,
/// so iterations cost O(m n^2) regardless of N.
class TraitProblem {
public:
    TraitProblem(const Matrix& x, const Matrix& t);

    double objective(const Matrix& a) const;
    Matrix gradient(const Matrix& a) const;  // as printed (unscaled)
    double gradient_scale() const noexcept { return 4.0 / (n_samples_ * n_samples_); }
    Index input_dim() const noexcept { return c_.rows(); }

private:
    Matrix c_;
    Matrix s_;
    double t_norm_sq_;
    double n_samples_;
};

struct TraitConfig {
    Index target_dim = 1;
    std::size_t max_iters = 10000;
    double initial_step = 1.0;
    double backtrack = 0.5;
    double armijo_slope = 1e-4;
    double grad_tol = 1e-6;
    double rel_decrease_tol = 1e-10;

    void validate() const;
};

LinearTransform train_trait(const LabeledDataset& ds, const TraitConfig& config, std::uint64_t seed);

/// P* = (X X^T)^{-1} X T X^T (X X^T)^{-1}. Throws RankDeficient when cond(X X^T) >= 1e12.
Matrix closed_form_gram_fit(const Matrix& x, const Matrix& t);

struct LrtConfig {
    Index target_dim = 1;
    double spectral_cap = 1.0;
    std::size_t iterations = 500;
    double step = 0.1;  // eta_t = step / sqrt(t)

    void validate() const;
};

/// sum_k ||A X_k||_* - ||A X||_*
double lrt_objective(const Matrix& a, const LabeledDataset& ds);

/// Projected subgradient on {||A||_2 <= cap}, best iterate returned. Starts from the
/// top-m principal directions of X and runs on X / ||X||_2 so that the step
/// schedule is scale free; reported objectives are in the original units.
LinearTransform train_lrt(const LabeledDataset& ds, const LrtConfig& config, std::uint64_t seed);

/// Fisher LDA rows: top generalized eigenvectors of (S_B, S_W + gamma I), unit norm.
LinearTransform train_lda(const LabeledDataset& ds, Index m);

/// i.i.d. N(0, 1) entries, deterministic per seed.
LinearTransform random_projection(Index n, Index m, std::uint64_t seed);

}  // namespace pangle
