#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "pangle/gaussian.hpp"
#include "pangle/geometry.hpp"

namespace pangle {

/// Deterministic coefficient generator: (seed, index) -> alpha in R^d.
///
/// Draws for different indices are independent; the same (seed, index) always
/// returns the same vector. Factories cover the distributions used by the
/// experiments; anything else can be wrapped with the raw constructor.
class CoefficientSampler {
public:
    using Generator = std::function<Vector(std::mt19937_64&)>;

    CoefficientSampler(std::string tag, Index dim, Generator gen);

    /// alpha ~ N(0, I_d)
    static CoefficientSampler standard_normal(Index dim);
    /// alpha_i ~ Uniform[lo, hi] i.i.d.
    static CoefficientSampler uniform(Index dim, double lo, double hi);
    /// Always returns `alpha`.
    static CoefficientSampler constant(Vector alpha);
    /// Unit-energy alpha in R^2 with |alpha_dominant| > |alpha_other|:
    /// alpha = (±cos phi, ±sin phi) with phi ~ Uniform[0, pi/4) and independent
    /// signs, coordinates swapped when dominant_mode = 1.
    static CoefficientSampler unit_energy_dominant(Index dominant_mode);

    const std::string& tag() const noexcept { return tag_; }
    Index dim() const noexcept { return dim_; }
    Vector draw(std::uint64_t seed, std::uint64_t index) const;

private:
    std::string tag_;
    Index dim_;
    Generator gen_;
};

/// argmax_k ||U_k^T x||^2, ties toward the lowest index (0-based).
std::size_t nsc_classify(const Eigen::Ref<const Vector>& x, std::span<const Subspace> subspaces);

/// 1/2 exp[-(sum sin^2 theta_i alpha_i^2)^2 / (8 sigma^2 sum sin^2 theta_i (alpha_i^2 + sigma^2))];
/// 1/2 when every angle is zero.
double er_kernel(const PrincipalAngles& angles, const Eigen::Ref<const Vector>& alpha, double sigma2);

/// Monte Carlo estimate of the integral of er_kernel against (p + q)/2. Even
/// sample indices draw from `p`, odd from `q`. std_err is the sample standard
/// deviation over sqrt(mc_samples).
ErrorEstimate nsc_bound_mc(const PrincipalAngles& angles, const CoefficientSampler& p, const CoefficientSampler& q,
                           double sigma2, std::size_t mc_samples, std::uint64_t seed);

/// Empirical NSC error for x = U_label alpha + n, label fair, n ~ N(0, sigma^2 I).
/// Class 1 coefficients come from `p`, class 2 from `q`.
ErrorEstimate empirical_nsc_error(const Subspace& u1, const Subspace& u2, const CoefficientSampler& p,
                                  const CoefficientSampler& q, double sigma2, std::size_t trials,
                                  std::uint64_t seed);

}  // namespace pangle
