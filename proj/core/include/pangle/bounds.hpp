#pragma once

#include <map>
#include <string>

#include "pangle/geometry.hpp"
#include "pangle/linalg.hpp"
#include "pangle/model.hpp"

namespace pangle {

enum class BoundKind { exact_bhattacharyya, high_snr, low_snr_pair, moderate_snr };

const char* to_string(BoundKind kind);

/// Result of one bound evaluation.
///
/// `value` is the reported upper bound on P_e, clamped to (0, 1/2]. For the
/// low-SNR sandwich it is the larger of the pair and `lower_value` holds the
/// smaller one. The unclamped values and every constant that went into the
/// expression are kept in `constants` (keys: K, c1..c5, L(p), c(p), p, r,
/// unclamped, unclamped_lower, sum_cos_sq, ...).
struct BoundReport {
    BoundKind kind = BoundKind::exact_bhattacharyya;
    double value = 0.5;
    double lower_value = 0.5;
    std::map<std::string, double> constants;
};

/// K = 1/2 ln det((S1+S2)/2) - 1/4 (ln det S1 + ln det S2), evaluated through
/// the low-rank structure so that the n ln sigma^2 terms cancel exactly.
/// Throws InvalidArgument when sigma^2 = 0 or the models are incompatible.
double bhattacharyya_K(const GaussianClassModel& m1, const GaussianClassModel& m2);

/// 1/2 exp(-K)
double bhattacharyya_bound(const GaussianClassModel& m1, const GaussianClassModel& m2);

BoundReport exact_bhattacharyya_report(const GaussianClassModel& m1, const GaussianClassModel& m2);

/// Vanishing-noise bound c1 (sigma^2)^{(d-r)/2} (prod_{i>r} sin^2 theta_i)^{-1/2}.
/// Throws InvalidArgument if n < 2(d - r), RegimeViolation if r = d (error floor).
BoundReport high_snr_bound(const GaussianClassModel& m1, const GaussianClassModel& m2,
                           double zero_tol = kZeroAngleTol);

/// Large-noise sandwich (lower_value, value) built from c2 and c3.
BoundReport low_snr_bounds(const GaussianClassModel& m1, const GaussianClassModel& m2);

/// Constants of the quadratic lower bound on ln(1 + x) around p.
struct ModerateRegimeConstants {
    double p = 0.0;
    double L_of_p = 0.0;
    double c_of_p = 0.0;  ///< +infinity when L_of_p = 0
};

/// f(x) = ln(1+x) - ln(1+p) - (x-p)/(1+p) + (x-p)^2/(1+p)^2
double lemma1_gap(double x, double p);

/// Smallest L in [0, (p-1)/2) with f >= 0 on [L, p], by bisection to 1e-12.
/// Throws InvalidArgument for p <= 1.
ModerateRegimeConstants lemma1_constants(double p);

/// Moderate-noise bound; requires p/c(p) <= lambda_{k,i}/sigma^2 <= p for every
/// eigenvalue of both models (RegimeViolation otherwise, naming the eigenvalue).
BoundReport moderate_snr_bound(const GaussianClassModel& m1, const GaussianClassModel& m2, double p,
                               double zero_tol = kZeroAngleTol);

struct Bracket {
    double lower = 0.0;
    double upper = 0.0;
};

/// (tr D - tr D^2 / 2, tr D - tr D^2 / 4), which brackets ln det(I + D) for PSD D
/// with spectrum in [0, 1). Throws InvalidArgument if an eigenvalue is >= 1 or < -1e-12.
Bracket logdet_taylor_bounds(const Matrix& d);

/// (phi_d psi_d S, phi_1 psi_1 S) with S = sum cos^2 theta_i, bracketing
/// tr(U Phi U^T V Psi V^T). phi and psi must be nonnegative and nonincreasing.
Bracket trace_product_bounds(const Subspace& u, const Vector& phi, const Subspace& v, const Vector& psi);

}  // namespace pangle
