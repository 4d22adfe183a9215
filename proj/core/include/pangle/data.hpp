#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <utility>
#include <vector>

#include "pangle/geometry.hpp"
#include "pangle/linalg.hpp"
#include "pangle/model.hpp"

namespace pangle {

/// Column-sample matrix with per-column class labels.
///
/// Labels are held 0-based (class k in [0, K)); the CSV format writes them
/// 1-based. Every class in [0, K) must be present.
class LabeledDataset {
public:
    LabeledDataset(Matrix samples, std::vector<std::size_t> labels);

    const Matrix& samples() const noexcept { return samples_; }
    const std::vector<std::size_t>& labels() const noexcept { return labels_; }
    const std::vector<Index>& class_counts() const noexcept { return counts_; }

    Index dim() const noexcept { return samples_.rows(); }
    Index size() const noexcept { return samples_.cols(); }
    std::size_t num_classes() const noexcept { return counts_.size(); }

    /// Samples of class k, in dataset order.
    Matrix class_samples(std::size_t k) const;
    /// [X_1, ..., X_K]: columns grouped by class, order within a class preserved.
    Matrix grouped_samples() const;
    /// Same dataset with every sample mapped through `a` (m x n).
    LabeledDataset transformed(const Matrix& a) const;
    /// Each class shifted to zero mean.
    LabeledDataset class_centered() const;

private:
    Matrix samples_;
    std::vector<std::size_t> labels_;
    std::vector<Index> counts_;
};

/// The two fixed 4 x 2 subspace pairs: case 1 (angles 0, pi/2) and case 2 (pi/4, pi/4).
std::pair<Subspace, Subspace> case_subspaces(int case_id);

/// Subspace spanned by orthonormalized i.i.d. Gaussian n x d entries.
Subspace random_subspace(Index n, Index d, std::mt19937_64& rng);

struct GeneratedGmm {
    std::vector<GaussianClassModel> models;
    LabeledDataset dataset;
};

/// K isotropic (Lambda = I) low-rank Gaussian classes with random subspaces,
/// plus `count_per_class` draws from each.
GeneratedGmm gen_gmm_classes(std::size_t num_classes, Index n, Index d, double sigma2, Index count_per_class,
                             std::uint64_t seed);

/// Fresh draws from given models (e.g. a test set for gen_gmm_classes output).
LabeledDataset draw_gmm_dataset(const std::vector<GaussianClassModel>& models, Index count_per_class,
                                std::uint64_t seed);

struct GeneratedSubspaceData {
    std::vector<Subspace> bases;
    LabeledDataset dataset;
};

/// x = U_k alpha + n, alpha ~ Uniform[-2, 2]^d, n ~ N(0, sigma^2 I). Not Gaussian in alpha.
GeneratedSubspaceData gen_uniform_subspace_data(std::size_t num_classes, Index n, Index d, double sigma,
                                                std::uint64_t seed, Index count_per_class);

LabeledDataset draw_uniform_subspace_dataset(const std::vector<Subspace>& bases, double sigma,
                                             Index count_per_class, std::uint64_t seed);

/// Headerless CSV, one sample per line: label (>= 1), then the features.
LabeledDataset read_dataset_csv(std::istream& in);
LabeledDataset load_dataset(const std::filesystem::path& path);
void write_dataset_csv(std::ostream& out, const LabeledDataset& ds);
void save_dataset(const std::filesystem::path& path, const LabeledDataset& ds);

/// Stratified split: each class contributes round(fraction * N_k) samples to
/// train, clamped so both sides keep at least one. Throws InvalidArgument when
/// a class has fewer than two samples.
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds, double train_fraction,
                                                std::uint64_t seed);

}  // namespace pangle
