#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "../oracles.hpp"
#include "pangle/bounds.hpp"
#include "pangle/data.hpp"
#include "pangle/error.hpp"
#include "pangle/model.hpp"

using namespace pangle;
using std::numbers::pi;

namespace {

GaussianClassModel scalar_model(double lambda, double sigma2) {
    return GaussianClassModel(Subspace(Matrix::Ones(1, 1)), Vector::Constant(1, lambda), sigma2);
}

std::pair<GaussianClassModel, GaussianClassModel> case_models(int id, double sigma2) {
    const auto [u1, u2] = case_subspaces(id);
    return {GaussianClassModel::isotropic(u1, sigma2), GaussianClassModel::isotropic(u2, sigma2)};
}

Vector random_spectrum(std::mt19937_64& rng, int d, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vector v = Vector::NullaryExpr(d, [&] { return u(rng); });
    std::sort(v.data(), v.data() + d, std::greater<>());
    return v;
}

}  // namespace

// ---- exact bound ----

TEST(BhattacharyyaK, IdenticalModelsGiveHalf) {
    const auto [m1, m2] = case_models(2, 0.3);
    EXPECT_EQ(bhattacharyya_K(m1, m1), 0.0);
    EXPECT_EQ(bhattacharyya_bound(m1, m1), 0.5);
}

TEST(BhattacharyyaK, ScalarVariancesFourAndOne) {
    // variance 4 = 3 + 1, variance 1 = 0.5 + 0.5
    const double k = bhattacharyya_K(scalar_model(3.0, 1.0), scalar_model(0.5, 0.5));
    EXPECT_NEAR(k, 0.111571775657104878, 1e-14);
    EXPECT_NEAR(k, 0.5 * std::log(2.5 / 2.0), 1e-14);
}

TEST(BhattacharyyaK, LnTwoGivesQuarter) {
    // (a + b) / (2 sqrt(ab)) = 4 with b = 1  =>  sqrt(a) = 4 + sqrt(15)
    const double r = 4.0 + std::sqrt(15.0);
    const double a = r * r;
    EXPECT_NEAR(bhattacharyya_bound(scalar_model(a - 0.5, 0.5), scalar_model(0.5, 0.5)), 0.25, 1e-12);
}

TEST(BhattacharyyaK, CaseOneMatchesDenseOracle) {
    const auto [m1, m2] = case_models(1, 0.01);
    EXPECT_NEAR(bhattacharyya_K(m1, m2), oracle::dense_bhattacharyya_K(covariance(m1), covariance(m2)), 1e-9);
    EXPECT_NEAR(bhattacharyya_K(m1, m2), 1.6242653743036959, 1e-12);
}

TEST(BhattacharyyaK, RandomModelsMatchDenseOracle) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + trial % 7;
        const int d = 1 + trial % n;
        const double s1 = 0.05 + 0.3 * (trial % 4), s2 = trial % 2 ? s1 : 0.2;
        const GaussianClassModel m1(Subspace(oracle::random_orthonormal(rng, n, d)), random_spectrum(rng, d, 0.1, 3), s1);
        const GaussianClassModel m2(Subspace(oracle::random_orthonormal(rng, n, d)), random_spectrum(rng, d, 0.1, 3), s2);
        ASSERT_NEAR(bhattacharyya_K(m1, m2), oracle::dense_bhattacharyya_K(covariance(m1), covariance(m2)), 1e-9);
        ASSERT_NEAR(bhattacharyya_K(m1, m2), bhattacharyya_K(m2, m1), 1e-10);
    }
}

TEST(BhattacharyyaK, CaseTwoBelowCaseOneAtHighSnr) {
    const auto [a1, a2] = case_models(1, 1e-4);
    const auto [b1, b2] = case_models(2, 1e-4);
    EXPECT_LT(bhattacharyya_bound(b1, b2), bhattacharyya_bound(a1, a2));
    EXPECT_NEAR(bhattacharyya_bound(b1, b2), 0.00039972019186886807, 1e-15);
}

TEST(BhattacharyyaK, ZeroNoiseRejected) {
    const auto [m1, m2] = case_models(1, 0.0);
    EXPECT_THROW(bhattacharyya_K(m1, m2), InvalidArgument);
}

// ---- high SNR ----

TEST(HighSnr, CaseTwoConstants) {
    const auto [m1, m2] = case_models(2, 1e-3);
    const auto rep = high_snr_bound(m1, m2);
    EXPECT_NEAR(rep.constants.at("c1"), 2.0, 1e-12);
    EXPECT_EQ(rep.constants.at("r"), 0.0);
    // c1 sigma^2 (sin^2(pi/4))^{-1} = 4 sigma^2
    EXPECT_NEAR(rep.value, 4.0 * 1e-3, 1e-15);
    EXPECT_NEAR(rep.constants.at("prod_sin_sq"), 0.25, 1e-15);
}

TEST(HighSnr, CaseOneExponentIsHalf) {
    const auto [a1, a2] = case_models(1, 1e-6);
    const auto [b1, b2] = case_models(1, 1e-4);
    const double slope = std::log(high_snr_bound(b1, b2).value / high_snr_bound(a1, a2).value) / std::log(100.0);
    EXPECT_NEAR(slope, 0.5, 1e-12);
    EXPECT_EQ(high_snr_bound(a1, a2).constants.at("r"), 1.0);
    EXPECT_NEAR(high_snr_bound(a1, a2).constants.at("c1"), 1.0, 1e-12);
}

TEST(HighSnr, ExactBoundRatioTendsToOne) {
    for (int id : {1, 2}) {
        const auto [m1, m2] = case_models(id, 1e-8);
        EXPECT_NEAR(bhattacharyya_bound(m1, m2) / high_snr_bound(m1, m2).value, 1.0, 0.05) << "case " << id;
    }
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 6 + trial % 5, d = 1 + trial % 3;
        const GaussianClassModel m1(Subspace(oracle::random_orthonormal(rng, n, d)), random_spectrum(rng, d, 0.5, 2), 1e-8);
        const GaussianClassModel m2(Subspace(oracle::random_orthonormal(rng, n, d)), random_spectrum(rng, d, 0.5, 2), 1e-8);
        ASSERT_NEAR(bhattacharyya_bound(m1, m2) / high_snr_bound(m1, m2).value, 1.0, 0.05);
        ASSERT_NEAR(high_snr_bound(m1, m2).value, high_snr_bound(m2, m1).value, 1e-10);
    }
}

TEST(HighSnr, ErrorsForFloorAndDimension) {
    const auto [m1, m2] = case_models(2, 1e-3);
    EXPECT_THROW(high_snr_bound(m1, m1), RegimeViolation);
    // Two 3-planes in R^4 always meet in a line or more; with zero_tol = 0 nothing
    // counts as shared, which violates n >= 2(d - r).
    std::mt19937_64 rng(1);
    const auto p = GaussianClassModel::isotropic(Subspace(oracle::random_orthonormal(rng, 4, 3)), 1e-3);
    const auto q = GaussianClassModel::isotropic(Subspace(oracle::random_orthonormal(rng, 4, 3)), 1e-3);
    EXPECT_THROW(high_snr_bound(p, q, 0.0), InvalidArgument);
    EXPECT_NO_THROW(high_snr_bound(p, q));
}

// ---- low SNR ----

TEST(LowSnr, CasesCoincide) {
    for (double s2 : {5.0, 10.0, 50.0}) {
        const auto [a1, a2] = case_models(1, s2);
        const auto [b1, b2] = case_models(2, s2);
        const auto ra = low_snr_bounds(a1, a2), rb = low_snr_bounds(b1, b2);
        EXPECT_NEAR(ra.value, rb.value, 1e-12);
        EXPECT_NEAR(ra.lower_value, rb.lower_value, 1e-12);
        EXPECT_NEAR(ra.constants.at("sum_cos_sq"), 1.0, 1e-12);
    }
}

TEST(LowSnr, SandwichAtSigmaTen) {
    const auto [m1, m2] = case_models(2, 10.0);
    const auto rep = low_snr_bounds(m1, m2);
    const double exact = bhattacharyya_bound(m1, m2);
    EXPECT_LT(rep.lower_value, exact);
    EXPECT_LT(exact, rep.value);
}

TEST(LowSnr, IdenticalModelsOrdered) {
    const auto [m1, m2] = case_models(1, 8.0);
    const auto rep = low_snr_bounds(m1, m1);
    EXPECT_LT(rep.lower_value, rep.value);
    EXPECT_GT(rep.lower_value, 0.0);
    EXPECT_LE(rep.value, 0.5);
}

TEST(LowSnr, RandomSandwichAndSymmetry) {
    std::mt19937_64 rng(5150);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 9, d = 1 + trial % n;
        const double s2 = std::array{5.0, 10.0, 50.0}[trial % 3];
        const auto m1 = GaussianClassModel::isotropic(Subspace(oracle::random_orthonormal(rng, n, d)), s2);
        const auto m2 = GaussianClassModel::isotropic(Subspace(oracle::random_orthonormal(rng, n, d)), s2);
        const auto rep = low_snr_bounds(m1, m2);
        const double exact = bhattacharyya_bound(m1, m2);
        ASSERT_LE(rep.lower_value, exact);
        ASSERT_LE(exact, rep.value);
        ASSERT_NEAR(rep.value, low_snr_bounds(m2, m1).value, 1e-10);
    }
}

// ---- quadratic lower bound on ln(1 + x) ----

TEST(ModerateConstants, ReportedValues) {
    EXPECT_NEAR(lemma1_constants(4.0).c_of_p, 3.44, 0.01);
    EXPECT_NEAR(lemma1_constants(5.0).c_of_p, 2.79, 0.01);
}

TEST(ModerateConstants, FrozenHighPrecisionValues) {
    const std::array<std::array<double, 3>, 6> table{{{3.0, 0.2647895049919175, 5.664877088107349},
                                                      {4.0, 0.5809868812398968, 3.442418520245683},
                                                      {5.0, 0.8971842574878733, 2.78649561573899},
                                                      {6.0, 1.2133816337358538, 2.4724290500123747},
                                                      {10.0, 2.4781711387277747, 2.0176169118678637},
                                                      {100.0, 30.93593500104592, 1.6162433751657914}}};
    for (const auto& [p, l, c] : table) {
        const auto mc = lemma1_constants(p);
        EXPECT_NEAR(mc.L_of_p, l, 1e-10) << p;
        EXPECT_NEAR(mc.c_of_p, c, 1e-9) << p;
        EXPECT_NEAR(oracle::gap(mc.L_of_p, p), 0.0, 1e-10);
    }
}

TEST(ModerateConstants, AgreesWithGridScan) {
    for (double p = 1.1; p < 60.0; p *= 1.37) {
        const auto mc = lemma1_constants(p);
        EXPECT_NEAR(mc.L_of_p, oracle::scan_L(p, 200000), 2.0 * p / 200000) << p;
        if (mc.L_of_p > 0.0) EXPECT_NEAR(mc.c_of_p, p / (2.0 * mc.L_of_p), 1e-12);
        EXPECT_LT(mc.L_of_p, (p - 1.0) / 2.0);
    }
}

TEST(ModerateConstants, SmallPHasNoLowerCut) {
    EXPECT_NEAR(lemma1_gap(0.0, 1.5), 0.04370926812584486, 1e-14);
    const auto mc = lemma1_constants(1.5);
    EXPECT_EQ(mc.L_of_p, 0.0);
    EXPECT_EQ(mc.c_of_p, std::numeric_limits<double>::infinity());
}

TEST(ModerateConstants, RejectsPAtMostOne) {
    EXPECT_THROW(lemma1_constants(1.0), InvalidArgument);
    EXPECT_THROW(lemma1_constants(0.5), InvalidArgument);
}

// ---- moderate SNR ----

TEST(ModerateSnr, CaseOneAboveCaseTwoAcrossWindow) {
    const double p = 6.0;
    const double c = lemma1_constants(p).c_of_p;
    for (int i = 0; i <= 10; ++i) {
        const double s2 = (1.0 / p) * std::pow(c, i / 10.0);
        const auto [a1, a2] = case_models(1, s2);
        const auto [b1, b2] = case_models(2, s2);
        const auto r1 = moderate_snr_bound(a1, a2, p), r2 = moderate_snr_bound(b1, b2, p);
        EXPECT_GT(r1.value, r2.value) << s2;
        EXPECT_EQ(r1.constants.at("r"), 1.0);
        EXPECT_EQ(r2.constants.at("r"), 0.0);
        EXPECT_GT(r2.value, 0.0);
        EXPECT_LE(r1.value, 0.5);
    }
}

TEST(ModerateSnr, IdenticalModelsInRange) {
    const auto [m1, m2] = case_models(2, 0.25);
    const auto rep = moderate_snr_bound(m1, m1, 6.0);
    EXPECT_GT(rep.value, 0.0);
    EXPECT_LE(rep.value, 0.5);
}

TEST(ModerateSnr, RegimeViolationNamesEigenvalue) {
    const auto [m1, m2] = case_models(2, 0.01);  // lambda / sigma^2 = 100 > p
    try {
        (void)moderate_snr_bound(m1, m2, 6.0);
        FAIL() << "expected RegimeViolation";
    } catch (const RegimeViolation& e) {
        EXPECT_NE(std::string(e.what()).find("lambda_{1,1}"), std::string::npos) << e.what();
    }
    EXPECT_THROW(moderate_snr_bound(m1, m2, 1.0), InvalidArgument);
}

TEST(ModerateSnr, SwapSymmetry) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 4 + trial % 5, d = 1 + trial % 3;
        const double s2 = 0.2;
        const GaussianClassModel m1(Subspace(oracle::random_orthonormal(rng, n, d)), random_spectrum(rng, d, 0.6, 1.2), s2);
        const GaussianClassModel m2(Subspace(oracle::random_orthonormal(rng, n, d)), random_spectrum(rng, d, 0.6, 1.2), s2);
        ASSERT_NEAR(moderate_snr_bound(m1, m2, 6.0).value, moderate_snr_bound(m2, m1, 6.0).value, 1e-10);
        ASSERT_NEAR(low_snr_bounds(m1, m2).lower_value, low_snr_bounds(m2, m1).lower_value, 1e-10);
        ASSERT_NEAR(bhattacharyya_bound(m1, m2), bhattacharyya_bound(m2, m1), 1e-10);
    }
}

// Eigenvalues of D = (U1 L1 U1^T + U2 L2 U2^T) / (2 sigma^2) under the moderate-regime precondition.
namespace {

Vector moderate_d_spectrum(const GaussianClassModel& m1, const GaussianClassModel& m2) {
    const double s = m1.noise_var();
    const Matrix dm = (covariance(m1) + covariance(m2) - 2.0 * s * Matrix::Identity(m1.ambient_dim(), m1.ambient_dim())) /
                      (2.0 * s);
    return Eigen::SelfAdjointEigenSolver<Matrix>(dm).eigenvalues();
}

}  // namespace

TEST(WeylSandwich, UpperHoldsOnRandomAdmissibleInstances) {
    const double p = 6.0, c = lemma1_constants(p).c_of_p;
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 4 + trial % 6, d = 1 + trial % 3;
        const double s2 = 0.2;
        const GaussianClassModel m1(Subspace(oracle::random_orthonormal(rng, n, d)),
                                    random_spectrum(rng, d, s2 * p / c, s2 * p), s2);
        const GaussianClassModel m2(Subspace(oracle::random_orthonormal(rng, n, d)),
                                    random_spectrum(rng, d, s2 * p / c, s2 * p), s2);
        ASSERT_NO_THROW(moderate_snr_bound(m1, m2, p));
        ASSERT_LE(moderate_d_spectrum(m1, m2).maxCoeff(), p * (1 + 1e-12));
    }
}

TEST(WeylSandwich, LowerHoldsForOrthogonalOrSharedDirections) {
    const double p = 6.0, c = lemma1_constants(p).c_of_p;
    for (int id : {1}) {  // case 1 angles are {0, pi/2}
        for (double s2 : {1.0 / p, 0.3, c / p}) {
            const auto [m1, m2] = case_models(id, s2);
            const Vector ev = moderate_d_spectrum(m1, m2);
            for (Index i = 0; i < ev.size(); ++i) {
                if (ev(i) > 1e-12) EXPECT_GE(ev(i), p / (2.0 * c) * (1 - 1e-12));
            }
        }
    }
}

TEST(WeylSandwich, LowerFailsForIntermediateAngles) {
    // One direction per class at angle t, lambda / sigma^2 = a: the nonzero
    // eigenvalues of D are a(1 +- cos t)/2, and a(1 - cos t)/2 < a/2 <= p/(2c)
    // at the bottom of the window. The claimed lower end does not hold in general.
    const double p = 6.0, c = lemma1_constants(p).c_of_p;
    const double t = pi / 4, s2 = c / p;  // lambda = 1 so a = p / c
    Matrix u1 = Matrix::Zero(2, 1), u2(2, 1);
    u1(0, 0) = 1.0;
    u2 << std::cos(t), std::sin(t);
    const auto m1 = GaussianClassModel::isotropic(Subspace(u1), s2);
    const auto m2 = GaussianClassModel::isotropic(Subspace(u2), s2);
    ASSERT_NO_THROW(moderate_snr_bound(m1, m2, p));
    const Vector ev = moderate_d_spectrum(m1, m2);
    EXPECT_NEAR(ev.minCoeff(), (p / c) * (1 - std::cos(t)) / 2, 1e-12);
    EXPECT_LT(ev.minCoeff(), p / (2.0 * c));
}

// ---- log-det and trace-product brackets ----

TEST(LogdetTaylor, HandValues) {
    const auto z = logdet_taylor_bounds(Matrix::Zero(3, 3));
    EXPECT_EQ(z.lower, 0.0);
    EXPECT_EQ(z.upper, 0.0);
    const auto h = logdet_taylor_bounds(0.5 * Matrix::Identity(2, 2));
    EXPECT_DOUBLE_EQ(h.lower, 0.75);
    EXPECT_DOUBLE_EQ(h.upper, 0.875);  // tr D = 1, tr D^2 = 1/2
    EXPECT_LT(h.lower, 0.81093021621632876);
    EXPECT_GT(h.upper, 0.81093021621632876);
}

TEST(LogdetTaylor, RandomBracketAndErrors) {
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> u(0.0, 0.99);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + trial % 8;
        const Matrix q = oracle::random_orthogonal(rng, n);
        const Vector ev = Vector::NullaryExpr(n, [&] { return u(rng); });
        const Matrix dm = q * ev.asDiagonal() * q.transpose();
        const auto b = logdet_taylor_bounds(0.5 * (dm + dm.transpose()));
        const double truth = ev.array().log1p().sum();
        ASSERT_LE(b.lower, truth + 1e-12);
        ASSERT_GE(b.upper, truth - 1e-12);
    }
    EXPECT_THROW(logdet_taylor_bounds(Matrix::Identity(2, 2)), InvalidArgument);
    EXPECT_THROW(logdet_taylor_bounds(-0.5 * Matrix::Identity(2, 2)), InvalidArgument);
}

TEST(TraceProduct, TightAtUniformSpectra) {
    const auto [u, v] = case_subspaces(2);
    const Vector one = Vector::Ones(2);
    const auto b = trace_product_bounds(u, one, v, one);
    const double tr = (u.basis() * u.basis().transpose() * v.basis() * v.basis().transpose()).trace();
    EXPECT_NEAR(b.lower, tr, 1e-12);
    EXPECT_NEAR(b.upper, tr, 1e-12);
    EXPECT_NEAR(tr, 1.0, 1e-12);
}

TEST(TraceProduct, SameSubspace) {
    const auto [u, v] = case_subspaces(1);
    Vector phi(2), psi(2);
    phi << 3.0, 1.0;
    psi << 2.0, 0.5;
    const auto b = trace_product_bounds(u, phi, u, psi);
    const double tr = phi.dot(psi);
    EXPECT_LE(b.lower, tr);
    EXPECT_GE(b.upper, tr);
}

TEST(TraceProduct, RandomBracketAndErrors) {
    std::mt19937_64 rng(74);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + trial % 11, d = 1 + trial % std::min(4, n);
        const Subspace u(oracle::random_orthonormal(rng, n, d)), v(oracle::random_orthonormal(rng, n, d));
        const Vector phi = random_spectrum(rng, d, 0.0, 5.0), psi = random_spectrum(rng, d, 0.0, 5.0);
        const double tr = (u.basis() * phi.asDiagonal() * u.basis().transpose() * v.basis() * psi.asDiagonal() *
                           v.basis().transpose())
                              .trace();
        const auto b = trace_product_bounds(u, phi, v, psi);
        ASSERT_LE(b.lower, tr + 1e-12);
        ASSERT_GE(b.upper, tr - 1e-12);
    }
    const auto [u, v] = case_subspaces(1);
    Vector up(2);
    up << 1.0, 2.0;
    EXPECT_THROW(trace_product_bounds(u, up, v, Vector::Ones(2)), InvalidArgument);
}
