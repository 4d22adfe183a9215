#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "pangle/linalg.hpp"
#include "pangle/model.hpp"

namespace pangle {

/// Monte Carlo estimate of a probability.
struct ErrorEstimate {
    double mean = 0.0;
    double std_err = 0.0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

/// Bernoulli estimate: std_err = sqrt(p (1 - p) / trials).
ErrorEstimate bernoulli_estimate(std::size_t failures, std::size_t trials, std::uint64_t seed);

/// `count` i.i.d. draws (columns) from N(0, covariance(model)), generated as
/// U Lambda^{1/2} g + sigma h. Deterministic in `seed`.
Matrix sample(const GaussianClassModel& model, Index count, std::uint64_t seed);

/// Single draw into `out` using the caller's engine.
void sample_one(const GaussianClassModel& model, std::mt19937_64& rng, Eigen::Ref<Vector> out);

/// Zero-mean Gaussian log-density with a cached Cholesky factor.
class GaussianLogDensity {
public:
    explicit GaussianLogDensity(const Matrix& covariance);

    Index dim() const noexcept { return dim_; }
    double log_det() const noexcept { return log_det_; }
    /// -1/2 ln det Sigma - 1/2 x^T Sigma^{-1} x  (the -n/2 ln 2pi constant is omitted)
    double operator()(const Eigen::Ref<const Vector>& x) const;

private:
    Index dim_;
    Eigen::LLT<Matrix> llt_;
    double log_det_;
};

/// MAP rule for equiprobable zero-mean Gaussian classes.
class MapClassifier {
public:
    explicit MapClassifier(std::span<const GaussianClassModel> models);
    /// Arbitrary SPD class covariances, e.g. A Sigma_k A^T after a linear transform.
    explicit MapClassifier(const std::vector<Matrix>& covariances);

    std::size_t num_classes() const noexcept { return densities_.size(); }
    Index dim() const noexcept { return densities_.front().dim(); }

    /// 0-based class index; ties resolve toward the lowest index.
    /// Throws InvalidArgument on non-finite input or dimension mismatch.
    std::size_t classify(const Eigen::Ref<const Vector>& x) const;
    double log_density(std::size_t k, const Eigen::Ref<const Vector>& x) const;

private:
    std::vector<GaussianLogDensity> densities_;
};

/// Convenience wrapper building a MapClassifier for one query.
std::size_t map_classify(const Eigen::Ref<const Vector>& x, std::span<const GaussianClassModel> models);

/// Fraction of misclassified draws for an equiprobable pair. Trial t uses the
/// stream trial_stream(seed, t): a fair label bit, then one draw from that class.
ErrorEstimate empirical_map_error(const GaussianClassModel& m1, const GaussianClassModel& m2,
                                  std::size_t trials, std::uint64_t seed);

}  // namespace pangle
