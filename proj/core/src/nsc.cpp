#include "pangle/nsc.hpp"

#include <cmath>
#include <numbers>

#include "pangle/error.hpp"
#include "pangle/random.hpp"

namespace pangle {

CoefficientSampler::CoefficientSampler(std::string tag, Index dim, Generator gen)
    : tag_(std::move(tag)), dim_(dim), gen_(std::move(gen)) {
    if (dim_ < 1) throw InvalidArgument("CoefficientSampler: dimension must be >= 1");
    if (!gen_) throw InvalidArgument("CoefficientSampler: empty generator");
}

CoefficientSampler CoefficientSampler::standard_normal(Index dim) {
    return CoefficientSampler("normal", dim, [dim](std::mt19937_64& rng) {
        Vector a(dim);
        fill_standard_normal(rng, a);
        return a;
    });
}

CoefficientSampler CoefficientSampler::uniform(Index dim, double lo, double hi) {
    if (!(hi > lo)) throw InvalidArgument("CoefficientSampler::uniform: need lo < hi");
    return CoefficientSampler("uniform", dim, [dim, lo, hi](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(lo, hi);
        Vector a(dim);
        for (Index i = 0; i < dim; ++i) a(i) = u(rng);
        return a;
    });
}

CoefficientSampler CoefficientSampler::constant(Vector alpha) {
    const Index dim = alpha.size();
    return CoefficientSampler("constant", dim, [alpha = std::move(alpha)](std::mt19937_64&) { return alpha; });
}

CoefficientSampler CoefficientSampler::unit_energy_dominant(Index dominant_mode) {
    if (dominant_mode != 0 && dominant_mode != 1) {
        throw InvalidArgument("CoefficientSampler::unit_energy_dominant: mode must be 0 or 1");
    }
    const std::string tag = dominant_mode == 0 ? "unit_energy_mode1" : "unit_energy_mode2";
    return CoefficientSampler(tag, 2, [dominant_mode](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> angle(0.0, std::numbers::pi / 4);
        const double phi = angle(rng);
        const double s0 = (rng() >> 63) ? -1.0 : 1.0;
        const double s1 = (rng() >> 63) ? -1.0 : 1.0;
        Vector a(2);
        a(dominant_mode) = s0 * std::cos(phi);
        a(1 - dominant_mode) = s1 * std::sin(phi);
        return a;
    });
}

Vector CoefficientSampler::draw(std::uint64_t seed, std::uint64_t index) const {
    auto rng = trial_stream(seed, index);
    Vector a = gen_(rng);
    if (a.size() != dim_) throw InvalidArgument("CoefficientSampler: generator returned wrong dimension");
    return a;
}

std::size_t nsc_classify(const Eigen::Ref<const Vector>& x, std::span<const Subspace> subspaces) {
    if (subspaces.size() < 2) throw InvalidArgument("nsc_classify: need at least two subspaces");
    if (!x.allFinite()) throw InvalidArgument("nsc_classify: non-finite input");
    std::size_t best = 0;
    double best_energy = -1.0;
    for (std::size_t k = 0; k < subspaces.size(); ++k) {
        if (subspaces[k].ambient_dim() != x.size()) {
            throw InvalidArgument("nsc_classify: input dimension does not match subspace " + std::to_string(k));
        }
        const double e = subspaces[k].projection_energy(x);
        if (e > best_energy) {
            best_energy = e;
            best = k;
        }
    }
    return best;
}

double er_kernel(const PrincipalAngles& angles, const Eigen::Ref<const Vector>& alpha, double sigma2) {
    if (!(sigma2 > 0.0)) throw InvalidArgument("er_kernel: sigma^2 must be > 0");
    if (alpha.size() != angles.size()) throw InvalidArgument("er_kernel: alpha and angles differ in length");
    double num = 0.0;
    double den = 0.0;
    for (Index i = 0; i < alpha.size(); ++i) {
        const double s = std::sin(angles[i]);
        const double s2 = s * s;
        const double a2 = alpha(i) * alpha(i);
        num += s2 * a2;
        den += s2 * (a2 + sigma2);
    }
    if (den == 0.0) return 0.5;
    return 0.5 * std::exp(-(num * num) / (8.0 * sigma2 * den));
}

ErrorEstimate nsc_bound_mc(const PrincipalAngles& angles, const CoefficientSampler& p, const CoefficientSampler& q,
                           double sigma2, std::size_t mc_samples, std::uint64_t seed) {
    if (mc_samples < 1) throw InvalidArgument("nsc_bound_mc: mc_samples must be >= 1");
    // Welford accumulation
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < mc_samples; ++i) {
        const CoefficientSampler& src = (i % 2 == 0) ? p : q;
        const double v = er_kernel(angles, src.draw(seed, i), sigma2);
        const double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
    }
    ErrorEstimate e;
    e.mean = mean;
    e.trials = mc_samples;
    e.seed = seed;
    e.std_err = mc_samples > 1
                    ? std::sqrt(m2 / static_cast<double>(mc_samples - 1) / static_cast<double>(mc_samples))
                    : 0.0;
    return e;
}

ErrorEstimate empirical_nsc_error(const Subspace& u1, const Subspace& u2, const CoefficientSampler& p,
                                  const CoefficientSampler& q, double sigma2, std::size_t trials,
                                  std::uint64_t seed) {
    if (trials < 1) throw InvalidArgument("empirical_nsc_error: trials must be >= 1");
    if (u1.ambient_dim() != u2.ambient_dim()) throw InvalidArgument("empirical_nsc_error: ambient dims differ");
    if (p.dim() != u1.rank() || q.dim() != u2.rank()) {
        throw InvalidArgument("empirical_nsc_error: sampler dimension does not match subspace rank");
    }
    if (!(sigma2 >= 0.0)) throw InvalidArgument("empirical_nsc_error: sigma^2 must be >= 0");
    const Subspace pair[] = {u1, u2};
    const double sigma = std::sqrt(sigma2);
    Vector x(u1.ambient_dim());
    std::size_t errors = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        auto rng = trial_stream(seed, t);
        const std::size_t label = (rng() >> 63) & 1U;
        const CoefficientSampler& src = label == 0 ? p : q;
        // coefficient stream is disjoint from the noise stream of the same trial
        const Vector alpha = src.draw(mix_seed(seed), t);
        fill_standard_normal(rng, x);
        x *= sigma;
        x.noalias() += pair[label].basis() * alpha;
        if (nsc_classify(x, pair) != label) ++errors;
    }
    return bernoulli_estimate(errors, trials, seed);
}

}  // namespace pangle
