#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "../oracles.hpp"
#include "pangle/bounds.hpp"
#include "pangle/data.hpp"
#include "pangle/error.hpp"
#include "pangle/gaussian.hpp"
#include "pangle/model.hpp"

using namespace pangle;

namespace {

Subspace axis(Index n, Index i) {
    Matrix b = Matrix::Zero(n, 1);
    b(i, 0) = 1.0;
    return Subspace(b);
}

}  // namespace

TEST(GaussianClassModel, RejectsBadSpectrum) {
    const Subspace s = axis(3, 0);
    EXPECT_THROW(GaussianClassModel(s, Vector::Constant(1, -1.0), 0.1), InvalidArgument);
    EXPECT_THROW(GaussianClassModel(s, Vector::Constant(2, 1.0), 0.1), InvalidArgument);
    EXPECT_THROW(GaussianClassModel(s, Vector::Constant(1, 1.0), -0.1), InvalidArgument);
    Matrix b = Matrix::Identity(3, 2);
    Vector inc(2);
    inc << 1.0, 2.0;
    EXPECT_THROW(GaussianClassModel(Subspace(b), inc, 0.1), InvalidArgument);
}

TEST(Covariance, AxisAligned) {
    const auto m = GaussianClassModel::isotropic(axis(2, 0), 0.01);
    Matrix expect(2, 2);
    expect << 1.01, 0.0, 0.0, 0.01;
    EXPECT_LT((covariance(m) - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Covariance, CaseOneClassOne) {
    const auto [u1, u2] = case_subspaces(1);
    const Matrix c = covariance(GaussianClassModel::isotropic(u1, 0.01));
    Vector diag(4);
    diag << 1.01, 1.01, 0.01, 0.01;
    EXPECT_LT((c - Matrix(diag.asDiagonal())).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((c - c.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Covariance, SmallEigenvalueLimitApproachesNoise) {
    const Matrix c = covariance(GaussianClassModel(axis(3, 1), Vector::Constant(1, 1e-12), 1.0));
    EXPECT_LT((c - Matrix::Identity(3, 3)).norm(), 1e-11);
}

TEST(Sample, CovarianceConvergesAndIsDeterministic) {
    const auto [u1, u2] = case_subspaces(2);
    Vector lam(2);
    lam << 2.0, 0.5;
    const GaussianClassModel m(u2, lam, 0.1);
    const Matrix x = sample(m, 100000, 42);
    const Matrix emp = x * x.transpose() / static_cast<double>(x.cols());
    const Matrix truth = covariance(m);
    EXPECT_LT((emp - truth).norm() / truth.norm(), 0.05);
    EXPECT_TRUE(sample(m, 10, 9) == sample(m, 10, 9));
    EXPECT_FALSE(sample(m, 10, 9) == sample(m, 10, 10));
}

TEST(Sample, NoiselessFullRankGivesIdentity) {
    const GaussianClassModel m = GaussianClassModel::isotropic(Subspace(Matrix::Identity(3, 3)), 0.0);
    const Matrix x = sample(m, 100000, 1);
    const Matrix emp = x * x.transpose() / static_cast<double>(x.cols());
    EXPECT_LT((emp - Matrix::Identity(3, 3)).norm(), 0.03);
}

TEST(LogDensity, MatchesDenseOracle) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 7;
        const int d = 1 + trial % n;
        Vector lam = Vector::NullaryExpr(d, [&] { return 0.1 + std::abs(g(rng)); });
        std::sort(lam.data(), lam.data() + d, std::greater<>());
        const GaussianClassModel m(Subspace(oracle::random_orthonormal(rng, n, d)), lam, 0.05 + 0.1 * (trial % 3));
        const Matrix c = covariance(m);
        const GaussianLogDensity ld(c);
        const Vector x = Vector::NullaryExpr(n, [&] { return g(rng); });
        ASSERT_NEAR(ld(x), oracle::dense_log_density(c, x), 1e-8);
    }
}

TEST(MapClassify, AlignedEnergy) {
    const std::vector<GaussianClassModel> models{GaussianClassModel::isotropic(axis(2, 0), 0.01),
                                                 GaussianClassModel::isotropic(axis(2, 1), 0.01)};
    Vector x(2);
    x << 3.0, 0.0;
    EXPECT_EQ(map_classify(x, models), 0u);
    x << 0.0, 3.0;
    EXPECT_EQ(map_classify(x, models), 1u);
}

TEST(MapClassify, OriginPicksSmallerLogDetThenLowestIndex) {
    const auto tight = GaussianClassModel(axis(2, 0), Vector::Constant(1, 0.5), 0.01);
    const auto wide = GaussianClassModel(axis(2, 1), Vector::Constant(1, 4.0), 0.01);
    const Vector zero = Vector::Zero(2);
    EXPECT_EQ(map_classify(zero, std::vector{wide, tight}), 1u);
    const auto a = GaussianClassModel::isotropic(axis(2, 0), 0.01);
    const auto b = GaussianClassModel::isotropic(axis(2, 1), 0.01);
    EXPECT_EQ(map_classify(zero, std::vector{a, b}), 0u);
    EXPECT_EQ(map_classify(zero, std::vector{b, a}), 0u);
}

TEST(MapClassify, RejectsNonFiniteAndMismatchedInput) {
    const std::vector<GaussianClassModel> models{GaussianClassModel::isotropic(axis(2, 0), 0.01),
                                                 GaussianClassModel::isotropic(axis(2, 1), 0.01)};
    Vector x(2);
    x << std::nan(""), 0.0;
    EXPECT_THROW(map_classify(x, models), InvalidArgument);
    EXPECT_THROW(map_classify(Vector::Zero(3), models), InvalidArgument);
}

TEST(MapClassify, ExchangeInvariance) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g;
    const auto a = GaussianClassModel::isotropic(Subspace(oracle::random_orthonormal(rng, 5, 2)), 0.1);
    const auto b = GaussianClassModel::isotropic(Subspace(oracle::random_orthonormal(rng, 5, 2)), 0.1);
    const std::vector<GaussianClassModel> ab_models{a, b}, ba_models{b, a};
    const MapClassifier ab{std::span<const GaussianClassModel>(ab_models)}, ba{std::span<const GaussianClassModel>(ba_models)};
    for (int i = 0; i < 2000; ++i) {
        const Vector x = Vector::NullaryExpr(5, [&] { return g(rng); });
        ASSERT_EQ(ab.classify(x), 1 - ba.classify(x));
    }
}

TEST(EmpiricalMapError, IdenticalModelsAreChance) {
    const auto [u1, u2] = case_subspaces(1);
    const auto m = GaussianClassModel::isotropic(u1, 0.1);
    const auto e = empirical_map_error(m, m, 20000, 5);
    // lowest-index tie break sends everything to class 1: exactly the class-2 draws fail
    EXPECT_NEAR(e.mean, 0.5, 3.0 * e.std_err);
    EXPECT_NEAR(e.std_err, std::sqrt(e.mean * (1 - e.mean) / 20000.0), 1e-15);
}

TEST(EmpiricalMapError, HighSnrOrderingAndBound) {
    const auto [a1, a2] = case_subspaces(1);
    const auto [b1, b2] = case_subspaces(2);
    const auto c1 = empirical_map_error(GaussianClassModel::isotropic(a1, 1e-4), GaussianClassModel::isotropic(a2, 1e-4),
                                        100000, 77);
    const auto c2 = empirical_map_error(GaussianClassModel::isotropic(b1, 1e-4), GaussianClassModel::isotropic(b2, 1e-4),
                                        100000, 77);
    EXPECT_LT(c2.mean, c1.mean);

    const auto m1 = GaussianClassModel::isotropic(a1, 1e-3), m2 = GaussianClassModel::isotropic(a2, 1e-3);
    const auto e = empirical_map_error(m1, m2, 100000, 3);
    EXPECT_LT(e.mean, high_snr_bound(m1, m2).value);
}

TEST(EmpiricalMapError, DeterministicAndSymmetric) {
    const auto [u1, u2] = case_subspaces(2);
    const auto m1 = GaussianClassModel::isotropic(u1, 0.3), m2 = GaussianClassModel::isotropic(u2, 0.3);
    const auto e1 = empirical_map_error(m1, m2, 100000, 19);
    EXPECT_EQ(e1.mean, empirical_map_error(m1, m2, 100000, 19).mean);
    const auto e2 = empirical_map_error(m2, m1, 100000, 19);
    EXPECT_LT(std::abs(e1.mean - e2.mean), 3.0 * std::hypot(e1.std_err, e2.std_err));
}
