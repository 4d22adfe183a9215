#include "pangle/bounds.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "pangle/error.hpp"
#include "pangle/intersection.hpp"

namespace pangle {
namespace {

constexpr double kPdetRelTol = 1e-10;
// slack on the moderate-regime window so grid endpoints such as sigma^2 = 1/p survive round-off
constexpr double kRegimeRelSlack = 1e-12;

double clamp_half(double v) { return std::min(v, 0.5); }

void require_common_noise(const GaussianClassModel& m1, const GaussianClassModel& m2, const char* who) {
    if (m1.ambient_dim() != m2.ambient_dim() || m1.rank() != m2.rank()) {
        throw InvalidArgument(std::string(who) + ": models must share ambient dimension and rank");
    }
    if (!(m1.noise_var() > 0.0)) throw InvalidArgument(std::string(who) + ": requires sigma^2 > 0");
    if (m1.noise_var() != m2.noise_var()) {
        throw InvalidArgument(std::string(who) + ": both classes must share the same sigma^2");
    }
}

// sum_i ln(1 + lambda_i / s)
double sum_log1p_ratio(const Vector& lambda, double s) {
    double acc = 0.0;
    for (Index i = 0; i < lambda.size(); ++i) acc += std::log1p(lambda(i) / s);
    return acc;
}

// [U1 Lambda1^{1/2}, U2 Lambda2^{1/2}]
Matrix stacked_factor(const Matrix& u1, const Vector& l1, const Matrix& u2, const Vector& l2) {
    Matrix b(u1.rows(), u1.cols() + u2.cols());
    b.leftCols(u1.cols()) = u1 * l1.cwiseSqrt().asDiagonal();
    b.rightCols(u2.cols()) = u2 * l2.cwiseSqrt().asDiagonal();
    return b;
}

}  // namespace

const char* to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::exact_bhattacharyya: return "exact_bhattacharyya";
        case BoundKind::high_snr: return "high_snr";
        case BoundKind::low_snr_pair: return "low_snr_pair";
        case BoundKind::moderate_snr: return "moderate_snr";
    }
    return "unknown";
}

double bhattacharyya_K(const GaussianClassModel& m1, const GaussianClassModel& m2) {
    if (m1.ambient_dim() != m2.ambient_dim()) {
        throw InvalidArgument("bhattacharyya_K: ambient dimensions differ");
    }
    const double s1 = m1.noise_var();
    const double s2 = m2.noise_var();
    if (!(s1 > 0.0) || !(s2 > 0.0)) {
        throw InvalidArgument("bhattacharyya_K: sigma^2 = 0 makes the covariances singular");
    }
    const double n = static_cast<double>(m1.ambient_dim());
    const double s_avg = 0.5 * (s1 + s2);

    // det((S1+S2)/2) = s_avg^n det(I_{d1+d2} + B^T B / (2 s_avg))  (Sylvester)
    const Matrix b = stacked_factor(m1.basis(), m1.eigenvalues(), m2.basis(), m2.eigenvalues());
    Matrix inner = b.transpose() * b / (2.0 * s_avg);
    inner.diagonal().array() += 1.0;
    const double logdet_mid_reduced = linalg::logdet_spd(0.5 * (inner + inner.transpose()));

    const double noise_term = 0.25 * n * (2.0 * std::log(s_avg) - std::log(s1) - std::log(s2));
    const double k = noise_term + 0.5 * logdet_mid_reduced -
                     0.25 * (sum_log1p_ratio(m1.eigenvalues(), s1) + sum_log1p_ratio(m2.eigenvalues(), s2));
    // K >= 0 analytically; absorb round-off at identical models
    return std::max(k, 0.0);
}

double bhattacharyya_bound(const GaussianClassModel& m1, const GaussianClassModel& m2) {
    return 0.5 * std::exp(-bhattacharyya_K(m1, m2));
}

BoundReport exact_bhattacharyya_report(const GaussianClassModel& m1, const GaussianClassModel& m2) {
    BoundReport r;
    r.kind = BoundKind::exact_bhattacharyya;
    const double k = bhattacharyya_K(m1, m2);
    r.value = r.lower_value = 0.5 * std::exp(-k);
    r.constants["K"] = k;
    r.constants["unclamped"] = r.value;
    return r;
}

BoundReport high_snr_bound(const GaussianClassModel& m1, const GaussianClassModel& m2, double zero_tol) {
    require_common_noise(m1, m2, "high_snr_bound");
    const IntersectionSplit split = intersection_split(m1, m2, zero_tol);
    const Index n = m1.ambient_dim();
    const Index d = m1.rank();
    const Index r = split.intersection_rank;
    if (r == d) {
        throw RegimeViolation("high_snr_bound: the subspaces coincide (r = d), the error has a floor "
                              "and does not vanish as sigma^2 -> 0");
    }
    if (n < 2 * (d - r)) {
        throw InvalidArgument("high_snr_bound: requires n >= 2(d - r), got n = " + std::to_string(n) +
                              ", d - r = " + std::to_string(d - r));
    }
    const double sigma2 = m1.noise_var();

    double pdet_cap = 1.0;
    if (r > 0) {
        const Matrix b = stacked_factor(split.first.intersection_basis, split.first.intersection_eigenvalues,
                                        split.second.intersection_basis, split.second.intersection_eigenvalues);
        pdet_cap = linalg::pseudo_determinant(b.transpose() * b, kPdetRelTol);
    }
    const double prod_cap = split.first.intersection_eigenvalues.prod() *
                            split.second.intersection_eigenvalues.prod();
    const double prod_diff = split.first.difference_eigenvalues.prod() *
                             split.second.difference_eigenvalues.prod();

    const double bracket = pdet_cap / std::sqrt(prod_cap) * std::sqrt(prod_diff);
    const double c1 = std::pow(2.0, 0.5 * static_cast<double>(2 * d - r) - 1.0) / std::sqrt(bracket);

    double sin_prod = 1.0;
    for (Index i = r; i < d; ++i) {
        const double s = std::sin(split.angles[i]);
        sin_prod *= s * s;
    }
    const double unclamped = c1 * std::pow(sigma2, 0.5 * static_cast<double>(d - r)) / std::sqrt(sin_prod);

    BoundReport rep;
    rep.kind = BoundKind::high_snr;
    rep.value = rep.lower_value = clamp_half(unclamped);
    rep.constants["c1"] = c1;
    rep.constants["r"] = static_cast<double>(r);
    rep.constants["pdet_intersection"] = pdet_cap;
    rep.constants["prod_sin_sq"] = sin_prod;
    rep.constants["unclamped"] = unclamped;
    return rep;
}

BoundReport low_snr_bounds(const GaussianClassModel& m1, const GaussianClassModel& m2) {
    require_common_noise(m1, m2, "low_snr_bounds");
    const double s = m1.noise_var();
    const PrincipalAngles angles = principal_angles(m1.subspace(), m2.subspace());
    const double sum_cos_sq = angles.sum_cos_sq();

    // c2/sigma^4 and c3/sigma^4, which keeps the arithmetic free of sigma^4 scaling
    auto bracket = [s](const Vector& lambda, double square_weight) {
        double acc = 0.0;
        for (Index i = 0; i < lambda.size(); ++i) {
            const double ratio = lambda(i) / s;
            const double half = lambda(i) / (2.0 * s);
            acc += ratio - square_weight * half * half - std::log1p(ratio);
        }
        return 0.25 * acc;
    };
    const double c2_scaled = bracket(m1.eigenvalues(), 0.5) + bracket(m2.eigenvalues(), 0.5);
    const double c3_scaled = bracket(m1.eigenvalues(), 1.0) + bracket(m2.eigenvalues(), 1.0);
    const double top_prod = m1.eigenvalues()(0) * m2.eigenvalues()(0);
    const double s4 = s * s;

    const double lower = 0.5 * std::exp(-(c2_scaled - top_prod * sum_cos_sq / (16.0 * s4)));
    const double upper = 0.5 * std::exp(-(c3_scaled - top_prod * sum_cos_sq / (8.0 * s4)));

    BoundReport rep;
    rep.kind = BoundKind::low_snr_pair;
    rep.value = clamp_half(upper);
    rep.lower_value = clamp_half(lower);
    rep.constants["c2"] = c2_scaled * s4;
    rep.constants["c3"] = c3_scaled * s4;
    rep.constants["sum_cos_sq"] = sum_cos_sq;
    rep.constants["lambda_top_product"] = top_prod;
    rep.constants["unclamped"] = upper;
    rep.constants["unclamped_lower"] = lower;
    return rep;
}

double lemma1_gap(double x, double p) {
    const double dx = x - p;
    return std::log1p(x) - std::log1p(p) - dx / (1.0 + p) + dx * dx / ((1.0 + p) * (1.0 + p));
}

ModerateRegimeConstants lemma1_constants(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) {
        throw InvalidArgument("lemma1_constants: requires finite p > 1");
    }
    ModerateRegimeConstants out;
    out.p = p;
    if (lemma1_gap(0.0, p) >= 0.0) {
        out.L_of_p = 0.0;
        out.c_of_p = std::numeric_limits<double>::infinity();
        return out;
    }
    // f is increasing on [0, (p-1)/2] with f(0) < 0 < f((p-1)/2)
    double lo = 0.0;
    double hi = 0.5 * (p - 1.0);
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (lemma1_gap(mid, p) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out.L_of_p = hi;
    out.c_of_p = p / (2.0 * out.L_of_p);
    return out;
}

BoundReport moderate_snr_bound(const GaussianClassModel& m1, const GaussianClassModel& m2, double p,
                               double zero_tol) {
    require_common_noise(m1, m2, "moderate_snr_bound");
    const ModerateRegimeConstants mc = lemma1_constants(p);
    const double s = m1.noise_var();
    const double floor_ratio = p / mc.c_of_p;  // 0 when c(p) is infinite

    auto check = [&](const GaussianClassModel& m, int cls) {
        for (Index i = 0; i < m.rank(); ++i) {
            const double ratio = m.eigenvalues()(i) / s;
            if (ratio > p * (1.0 + kRegimeRelSlack) || ratio < floor_ratio * (1.0 - kRegimeRelSlack)) {
                std::ostringstream msg;
                msg << "moderate_snr_bound: lambda_{" << cls << "," << (i + 1) << "}/sigma^2 = " << ratio
                    << " outside [p/c(p), p] = [" << floor_ratio << ", " << p << "]";
                throw RegimeViolation(msg.str());
            }
        }
    };
    check(m1, 1);
    check(m2, 2);

    const PrincipalAngles angles = principal_angles(m1.subspace(), m2.subspace());
    const Index d = m1.rank();
    const Index r = intersection_dimension(angles, zero_tol);
    const double sum_cos_sq = angles.sum_cos_sq();
    const double top_prod = m1.eigenvalues()(0) * m2.eigenvalues()(0);
    const double p1 = 1.0 + p;

    const double c4 = 0.5 * (std::log1p(p) - p / p1 - p * p / (p1 * p1));
    const double sum_lambda = m1.eigenvalues().sum() + m2.eigenvalues().sum();
    const double sum_lambda_sq = m1.eigenvalues().squaredNorm() + m2.eigenvalues().squaredNorm();
    const double c5 = -(1.0 + 3.0 * p) / (4.0 * s * p1 * p1) * sum_lambda +
                      sum_lambda_sq / (8.0 * s * s * p1 * p1) +
                      0.25 * (sum_log1p_ratio(m1.eigenvalues(), s) + sum_log1p_ratio(m2.eigenvalues(), s));

    const double exponent = -c4 * static_cast<double>(2 * d - r) +
                            top_prod / (4.0 * s * s * p1 * p1) * sum_cos_sq + c5;
    const double unclamped = 0.5 * std::exp(exponent);

    BoundReport rep;
    rep.kind = BoundKind::moderate_snr;
    rep.value = rep.lower_value = clamp_half(unclamped);
    rep.constants["p"] = p;
    rep.constants["L(p)"] = mc.L_of_p;
    rep.constants["c(p)"] = mc.c_of_p;
    rep.constants["c4"] = c4;
    rep.constants["c5"] = c5;
    rep.constants["r"] = static_cast<double>(r);
    rep.constants["sum_cos_sq"] = sum_cos_sq;
    rep.constants["unclamped"] = unclamped;
    return rep;
}

Bracket logdet_taylor_bounds(const Matrix& d) {
    if (d.rows() != d.cols()) throw InvalidArgument("logdet_taylor_bounds: matrix must be square");
    if (d.size() == 0) return {};
    const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
    if (!linalg::is_symmetric(d, 1e-12 * scale)) {
        throw InvalidArgument("logdet_taylor_bounds: matrix must be symmetric");
    }
    if (d.size() > 0) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(d, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().maxCoeff() >= 1.0) {
            throw InvalidArgument("logdet_taylor_bounds: eigenvalue >= 1 (" +
                                  std::to_string(es.eigenvalues().maxCoeff()) + ")");
        }
        if (es.eigenvalues().minCoeff() < -1e-12 * scale) {
            throw InvalidArgument("logdet_taylor_bounds: matrix is not positive semidefinite");
        }
    }
    const double tr = d.trace();
    const double tr_sq = d.squaredNorm();  // tr(D^2) for symmetric D
    return {tr - 0.5 * tr_sq, tr - 0.25 * tr_sq};
}

Bracket trace_product_bounds(const Subspace& u, const Vector& phi, const Subspace& v, const Vector& psi) {
    auto check_diag = [](const Vector& w, Index d, const char* name) {
        if (w.size() != d) {
            throw InvalidArgument(std::string("trace_product_bounds: ") + name + " has wrong length");
        }
        for (Index i = 0; i < w.size(); ++i) {
            if (w(i) < 0.0) throw InvalidArgument(std::string("trace_product_bounds: ") + name + " is negative");
            if (i > 0 && w(i) > w(i - 1)) {
                throw InvalidArgument(std::string("trace_product_bounds: ") + name + " is not descending");
            }
        }
    };
    check_diag(phi, u.rank(), "phi");
    check_diag(psi, v.rank(), "psi");
    const double s = principal_angles(u, v).sum_cos_sq();
    const Index d = u.rank();
    return {phi(d - 1) * psi(d - 1) * s, phi(0) * psi(0) * s};
}

}  // namespace pangle
