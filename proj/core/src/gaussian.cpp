#include "pangle/gaussian.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pangle/error.hpp"
#include "pangle/random.hpp"

namespace pangle {

GaussianClassModel::GaussianClassModel(Subspace subspace, Vector eigenvalues, double noise_var)
    : subspace_(std::move(subspace)), eigenvalues_(std::move(eigenvalues)), noise_var_(noise_var) {
    if (eigenvalues_.size() != subspace_.rank()) {
        throw InvalidArgument("GaussianClassModel: " + std::to_string(eigenvalues_.size()) +
                              " eigenvalues for a rank-" + std::to_string(subspace_.rank()) + " subspace");
    }
    for (Index i = 0; i < eigenvalues_.size(); ++i) {
        if (!(eigenvalues_(i) > 0.0) || !std::isfinite(eigenvalues_(i))) {
            throw InvalidArgument("GaussianClassModel: eigenvalues must be positive and finite");
        }
        if (i > 0 && eigenvalues_(i) > eigenvalues_(i - 1)) {
            throw InvalidArgument("GaussianClassModel: eigenvalues must be nonincreasing");
        }
    }
    if (!(noise_var_ >= 0.0) || !std::isfinite(noise_var_)) {
        throw InvalidArgument("GaussianClassModel: noise variance must be finite and >= 0");
    }
}

GaussianClassModel GaussianClassModel::isotropic(Subspace subspace, double noise_var) {
    const Index d = subspace.rank();
    return GaussianClassModel(std::move(subspace), Vector::Ones(d), noise_var);
}

GaussianClassModel GaussianClassModel::with_noise_var(double noise_var) const {
    return GaussianClassModel(subspace_, eigenvalues_, noise_var);
}

Matrix covariance(const GaussianClassModel& model) {
    const Matrix& u = model.basis();
    Matrix cov = u * model.eigenvalues().asDiagonal() * u.transpose();
    cov.diagonal().array() += model.noise_var();
    return 0.5 * (cov + cov.transpose());
}

ErrorEstimate bernoulli_estimate(std::size_t failures, std::size_t trials, std::uint64_t seed) {
    ErrorEstimate e;
    e.trials = trials;
    e.seed = seed;
    if (trials == 0) return e;
    e.mean = static_cast<double>(failures) / static_cast<double>(trials);
    e.std_err = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(trials));
    return e;
}

void sample_one(const GaussianClassModel& model, std::mt19937_64& rng, Eigen::Ref<Vector> out) {
    const Index d = model.rank();
    const Index n = model.ambient_dim();
    Vector g(d);
    fill_standard_normal(rng, g);
    fill_standard_normal(rng, out.head(n));
    out *= std::sqrt(model.noise_var());
    out.noalias() += model.basis() * (model.eigenvalues().cwiseSqrt().cwiseProduct(g));
}

Matrix sample(const GaussianClassModel& model, Index count, std::uint64_t seed) {
    if (count < 1) throw InvalidArgument("sample: count must be >= 1");
    std::mt19937_64 rng(mix_seed(seed));
    Matrix out(model.ambient_dim(), count);
    for (Index j = 0; j < count; ++j) sample_one(model, rng, out.col(j));
    return out;
}

GaussianLogDensity::GaussianLogDensity(const Matrix& cov) : dim_(cov.rows()), llt_(cov) {
    if (cov.rows() != cov.cols() || cov.rows() == 0) {
        throw InvalidArgument("GaussianLogDensity: covariance must be square and nonempty");
    }
    if (llt_.info() != Eigen::Success) {
        throw NumericalError("GaussianLogDensity: covariance is not positive definite");
    }
    const auto& l = llt_.matrixLLT();
    double acc = 0.0;
    for (Index i = 0; i < dim_; ++i) acc += std::log(l(i, i));
    log_det_ = 2.0 * acc;
}

double GaussianLogDensity::operator()(const Eigen::Ref<const Vector>& x) const {
    // x^T Sigma^{-1} x = ||L^{-1} x||^2
    const Vector z = llt_.matrixL().solve(x);
    return -0.5 * log_det_ - 0.5 * z.squaredNorm();
}

MapClassifier::MapClassifier(std::span<const GaussianClassModel> models) {
    if (models.size() < 2) throw InvalidArgument("MapClassifier: need at least two classes");
    densities_.reserve(models.size());
    for (const auto& m : models) {
        if (m.ambient_dim() != models.front().ambient_dim()) {
            throw InvalidArgument("MapClassifier: models differ in ambient dimension");
        }
        densities_.emplace_back(covariance(m));
    }
}

MapClassifier::MapClassifier(const std::vector<Matrix>& covariances) {
    if (covariances.size() < 2) throw InvalidArgument("MapClassifier: need at least two classes");
    densities_.reserve(covariances.size());
    for (const auto& c : covariances) {
        if (c.rows() != covariances.front().rows()) {
            throw InvalidArgument("MapClassifier: covariances differ in dimension");
        }
        densities_.emplace_back(c);
    }
}

double MapClassifier::log_density(std::size_t k, const Eigen::Ref<const Vector>& x) const {
    return densities_.at(k)(x);
}

std::size_t MapClassifier::classify(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != dim()) {
        throw InvalidArgument("MapClassifier: input has dimension " + std::to_string(x.size()) +
                              ", expected " + std::to_string(dim()));
    }
    if (!x.allFinite()) throw InvalidArgument("MapClassifier: non-finite input");
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < densities_.size(); ++k) {
        const double s = densities_[k](x);
        if (s > best_score) {
            best_score = s;
            best = k;
        }
    }
    return best;
}

std::size_t map_classify(const Eigen::Ref<const Vector>& x, std::span<const GaussianClassModel> models) {
    return MapClassifier(models).classify(x);
}

ErrorEstimate empirical_map_error(const GaussianClassModel& m1, const GaussianClassModel& m2,
                                  std::size_t trials, std::uint64_t seed) {
    if (trials < 1) throw InvalidArgument("empirical_map_error: trials must be >= 1");
    const GaussianClassModel pair[] = {m1, m2};
    const MapClassifier classifier{std::span<const GaussianClassModel>(pair)};
    Vector x(m1.ambient_dim());
    std::size_t errors = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        auto rng = trial_stream(seed, t);
        const std::size_t label = (rng() >> 63) & 1U;
        sample_one(pair[label], rng, x);
        if (classifier.classify(x) != label) ++errors;
    }
    return bernoulli_estimate(errors, trials, seed);
}

}  // namespace pangle
