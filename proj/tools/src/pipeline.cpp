#include "pangle/tools/pipeline.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "pangle/error.hpp"
#include "pangle/gaussian.hpp"
#include "pangle/nsc.hpp"

namespace pangle::tools {
namespace {

void check_rank(const LabeledDataset& train, Index rank) {
    if (rank < 1 || rank > train.dim()) {
        throw InvalidArgument("rank d = " + std::to_string(rank) + " outside [1, " + std::to_string(train.dim()) +
                              "]");
    }
    for (std::size_t k = 0; k < train.num_classes(); ++k) {
        if (rank > train.class_counts()[k]) {
            throw InvalidArgument("rank d = " + std::to_string(rank) + " exceeds the " +
                                  std::to_string(train.class_counts()[k]) + " training samples of class " +
                                  std::to_string(k + 1));
        }
    }
}

}  // namespace

ClassifierKind parse_classifier(std::string_view name) {
    if (name == "map") return ClassifierKind::map;
    if (name == "nsc") return ClassifierKind::nsc;
    throw InvalidArgument("unknown classifier '" + std::string(name) + "' (expected map or nsc)");
}

std::vector<Matrix> fit_class_covariances(const LabeledDataset& train, Index rank) {
    check_rank(train, rank);
    const Index n = train.dim();
    std::vector<Matrix> out;
    for (std::size_t k = 0; k < train.num_classes(); ++k) {
        const Matrix xk = train.class_samples(k);
        const Matrix s = xk * xk.transpose() / static_cast<double>(xk.cols());
        const double floor = 1e-9 * std::max(s.trace() / static_cast<double>(n), std::numeric_limits<double>::min());
        if (rank == n) {
            out.push_back(s + floor * Matrix::Identity(n, n));
            continue;
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(s);
        const Vector ev = es.eigenvalues().reverse();
        const Matrix u = es.eigenvectors().rowwise().reverse().leftCols(rank);
        const double sigma2 = std::max(ev.tail(n - rank).mean(), floor);
        const Vector lambda = (ev.head(rank).array() - sigma2).max(0.0);
        Matrix cov = u * lambda.asDiagonal() * u.transpose();
        cov.diagonal().array() += sigma2;
        out.push_back(0.5 * (cov + cov.transpose()));
    }
    return out;
}

std::vector<Subspace> fit_class_subspaces(const LabeledDataset& train, Index rank) {
    check_rank(train, rank);
    std::vector<Subspace> out;
    for (std::size_t k = 0; k < train.num_classes(); ++k) out.push_back(orthonormal_basis(train.class_samples(k), rank));
    return out;
}

nlohmann::json ClassifyReport::to_json() const {
    nlohmann::json j;
    j["accuracy"] = accuracy;
    j["n_test"] = n_test;
    j["confusion"] = confusion;
    return j;
}

ClassifyReport classify(const LabeledDataset& train, const LabeledDataset& test, ClassifierKind kind, Index rank,
                        const LinearTransform* transform) {
    if (train.dim() != test.dim()) {
        throw InvalidArgument("train has " + std::to_string(train.dim()) + " features but test has " +
                              std::to_string(test.dim()));
    }
    if (test.num_classes() > train.num_classes()) {
        throw InvalidArgument("test labels reach class " + std::to_string(test.num_classes()) +
                              " but training data has only " + std::to_string(train.num_classes()) + " classes");
    }
    if (transform && transform->input_dim() != train.dim()) {
        throw InvalidArgument("transform expects " + std::to_string(transform->input_dim()) +
                              " features but data has " + std::to_string(train.dim()));
    }
    const LabeledDataset tr = transform ? transform->apply(train) : train;
    const Matrix xs = transform ? transform->apply(test.samples()) : test.samples();

    const std::size_t k_classes = tr.num_classes();
    ClassifyReport rep;
    rep.n_test = static_cast<std::size_t>(xs.cols());
    rep.confusion.assign(k_classes, std::vector<std::size_t>(k_classes, 0));
    std::size_t correct = 0;
    auto record = [&](Index j, std::size_t predicted) {
        const std::size_t truth = test.labels()[static_cast<std::size_t>(j)];
        ++rep.confusion[truth][predicted];
        if (truth == predicted) ++correct;
    };
    if (kind == ClassifierKind::map) {
        const MapClassifier clf(fit_class_covariances(tr, rank));
        for (Index j = 0; j < xs.cols(); ++j) record(j, clf.classify(xs.col(j)));
    } else {
        const std::vector<Subspace> subs = fit_class_subspaces(tr, rank);
        if (subs.size() < 2) throw InvalidArgument("classify: NSC needs at least two classes");
        for (Index j = 0; j < xs.cols(); ++j) record(j, nsc_classify(xs.col(j), subs));
    }
    rep.accuracy = static_cast<double>(correct) / static_cast<double>(rep.n_test);
    return rep;
}

std::vector<PairAngles> pairwise_angles(const std::vector<Subspace>& subspaces) {
    std::vector<PairAngles> out;
    for (std::size_t i = 0; i < subspaces.size(); ++i) {
        for (std::size_t j = i + 1; j < subspaces.size(); ++j) {
            PairAngles p;
            p.first = i;
            p.second = j;
            p.angles = principal_angles(subspaces[i], subspaces[j]);
            p.chordal_sq = chordal_distance_sq(p.angles);
            p.intersection_rank = intersection_dimension(p.angles);
            out.push_back(std::move(p));
        }
    }
    return out;
}

Vector feature_mean(const LabeledDataset& ds) { return ds.samples().rowwise().mean(); }

LabeledDataset shifted(const LabeledDataset& ds, const Vector& mean) {
    if (mean.size() != ds.dim()) throw InvalidArgument("shifted: mean has the wrong length");
    return LabeledDataset(ds.samples().colwise() - mean, ds.labels());
}

double min_pairwise_angle(const LabeledDataset& ds, Index rank) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pairwise_angles(fit_class_subspaces(ds, rank))) best = std::min(best, p.angles[0]);
    return best;
}

}  // namespace pangle::tools
