#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pangle/data.hpp"
#include "pangle/geometry.hpp"
#include "pangle/transforms.hpp"

namespace pangle::tools {

enum class ClassifierKind { map, nsc };

ClassifierKind parse_classifier(std::string_view name);

/// Rank-d zero-mean Gaussian fit per class (probabilistic PCA on the second moment):
/// top-d eigenpairs give U and lambda_i - sigma^2, sigma^2 is the mean trailing eigenvalue,
/// floored at 1e-9 tr(S)/n so the covariance stays invertible. rank = n keeps the full
/// second moment with that floor added to the diagonal.
std::vector<Matrix> fit_class_covariances(const LabeledDataset& train, Index rank);

/// Rank-d orthonormal basis of each class (leading left singular vectors).
std::vector<Subspace> fit_class_subspaces(const LabeledDataset& train, Index rank);

struct ClassifyReport {
    double accuracy = 0.0;
    std::size_t n_test = 0;
    std::vector<std::vector<std::size_t>> confusion;  // [true class][predicted class]

    nlohmann::json to_json() const;
};

/// Fit on `train`, evaluate on `test`, optionally after mapping both through `transform`.
/// Throws InvalidArgument on dimension mismatch, rank > per-class sample count or rank > dim.
ClassifyReport classify(const LabeledDataset& train, const LabeledDataset& test, ClassifierKind kind, Index rank,
                        const LinearTransform* transform = nullptr);

struct PairAngles {
    std::size_t first = 0;
    std::size_t second = 0;
    PrincipalAngles angles;
    double chordal_sq = 0.0;
    Index intersection_rank = 0;
};

std::vector<PairAngles> pairwise_angles(const std::vector<Subspace>& subspaces);

/// Per-feature mean of `ds`.
Vector feature_mean(const LabeledDataset& ds);

/// Every sample minus `mean`.
LabeledDataset shifted(const LabeledDataset& ds, const Vector& mean);

/// Smallest angle (radians) over all class pairs of rank-d class subspaces.
double min_pairwise_angle(const LabeledDataset& ds, Index rank);

}  // namespace pangle::tools
