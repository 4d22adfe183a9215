#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "pangle/bounds.hpp"
#include "pangle/data.hpp"
#include "pangle/error.hpp"
#include "pangle/gaussian.hpp"
#include "pangle/model.hpp"
#include "pangle/tools/experiments.hpp"
#include "pangle/tools/pipeline.hpp"
#include "pangle/tools/transform_io.hpp"
#include "pangle/transforms.hpp"

using namespace pangle;
using namespace pangle::tools;
namespace fs = std::filesystem;

namespace {

LabeledDataset small_dataset() {
    Matrix x(3, 4);
    x << 1.0, 0.9, 0.0, 0.1,  //
        0.0, 0.1, 1.0, 0.8,   //
        0.2, -0.1, 0.05, 0.3;
    return LabeledDataset(x, {0, 0, 1, 1});
}

std::size_t transform_error_line(const std::string& text) {
    std::istringstream in(text);
    try {
        (void)read_transform(in);
    } catch (const ParseError& e) {
        return e.line();
    }
    return static_cast<std::size_t>(-1);
}

}  // namespace

// ---- transform container ----

TEST(TransformIo, RoundTripIsExact) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    Matrix a(2, 5);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng) * std::pow(10.0, static_cast<double>(i % 7) - 3);
    TrainingMeta meta;
    meta.seed = 42;
    meta.iterations = 17;
    meta.final_objective = 0.125;
    const LinearTransform t(a, TransformMethod::trait, meta);
    std::ostringstream out;
    write_transform(out, t, {{"m", 2}, {"max_iters", 10}});
    std::istringstream in(out.str());
    const TransformFile f = read_transform(in);
    EXPECT_TRUE(f.transform.matrix() == a);
    EXPECT_EQ(f.transform.method(), TransformMethod::trait);
    EXPECT_EQ(f.transform.meta().seed, 42u);
    EXPECT_EQ(f.transform.meta().iterations, 17u);
    EXPECT_EQ(f.config.at("max_iters"), 10);
    EXPECT_EQ(f.config_hash, config_hash(f.config));
}

TEST(TransformIo, HeaderCarriesRequiredFields) {
    std::ostringstream out;
    write_transform(out, LinearTransform::identity(3), {{"k", 1}});
    const std::string header = out.str().substr(0, out.str().find('\n'));
    const auto j = nlohmann::json::parse(header);
    for (const char* key : {"method", "m", "n", "seed", "config", "config_hash"}) EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j.at("method"), "identity");
    EXPECT_EQ(j.at("m"), 3);
}

TEST(TransformIo, HashIsStableAndKeyOrderIndependent) {
    nlohmann::json a = {{"x", 1}, {"y", 2.5}};
    nlohmann::json b;
    b["y"] = 2.5;
    b["x"] = 1;
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_NE(config_hash(a), config_hash({{"x", 2}, {"y", 2.5}}));
    EXPECT_EQ(config_hash(a).rfind("fnv1a64:", 0), 0u);
    EXPECT_EQ(config_hash(a).size(), 8u + 16u);
}

TEST(TransformIo, MalformedFilesReportLines) {
    const std::string header =
        R"({"method":"random","m":2,"n":2,"seed":1,"config":{},"config_hash":")" + config_hash(nlohmann::json::object()) +
        "\"}\n";
    EXPECT_EQ(transform_error_line(""), 0u);
    EXPECT_EQ(transform_error_line("not json\n"), 1u);
    EXPECT_EQ(transform_error_line(R"({"method":"random"})" "\n"), 1u);
    EXPECT_EQ(transform_error_line(header + "1,2\n"), 3u);             // missing row
    EXPECT_EQ(transform_error_line(header + "1,2\n3\n"), 3u);          // short row
    EXPECT_EQ(transform_error_line(header + "1,2\n3,4,5\n"), 3u);      // long row
    EXPECT_EQ(transform_error_line(header + "1,x\n3,4\n"), 2u);        // non-numeric
    EXPECT_EQ(transform_error_line(header + "1,2\n3,4\n5,6\n"), 4u);   // trailing row
    std::string bad_hash = header;
    bad_hash.replace(bad_hash.find("fnv1a64:") + 8, 1, "z");
    EXPECT_EQ(transform_error_line(bad_hash + "1,2\n3,4\n"), 1u);
    std::istringstream ok(header + "1,2\n3,4\n");
    EXPECT_EQ(read_transform(ok).transform.matrix()(1, 0), 3.0);
}

TEST(TransformIo, SaveLoadFile) {
    const fs::path p = fs::temp_directory_path() / "pangle_tools_test_transform.txt";
    const LinearTransform t = random_projection(4, 2, 9);
    save_transform(p, t, {{"m", 2}});
    EXPECT_TRUE(load_transform(p).transform.matrix() == t.matrix());
    fs::remove(p);
    EXPECT_THROW(load_transform(p), Error);
}

// ---- pipeline ----

TEST(Pipeline, ParseClassifier) {
    EXPECT_EQ(parse_classifier("map"), ClassifierKind::map);
    EXPECT_EQ(parse_classifier("nsc"), ClassifierKind::nsc);
    EXPECT_THROW(parse_classifier("knn"), InvalidArgument);
}

TEST(Pipeline, NoiselessSubspaceDataIsSeparable) {
    const GeneratedSubspaceData gen = gen_uniform_subspace_data(3, 12, 2, 0.0, 5, 20);
    const ClassifyReport r = classify(gen.dataset, gen.dataset, ClassifierKind::nsc, 2);
    EXPECT_EQ(r.accuracy, 1.0);
    EXPECT_EQ(r.n_test, 60u);
    ASSERT_EQ(r.confusion.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(r.confusion[k][k], 20u);
    const auto j = r.to_json();
    EXPECT_EQ(j.at("accuracy"), 1.0);
}

TEST(Pipeline, FittedCovarianceRecoversModel) {
    const GeneratedGmm gen = gen_gmm_classes(2, 6, 2, 0.05, 20000, 8);
    const auto covs = fit_class_covariances(gen.dataset, 2);
    for (std::size_t k = 0; k < 2; ++k) {
        const Matrix truth = covariance(gen.models[k]);
        EXPECT_LT((covs[k] - truth).norm() / truth.norm(), 0.05);
        EXPECT_LT((covs[k] - covs[k].transpose()).norm(), 1e-12);
    }
    const auto full = fit_class_covariances(gen.dataset, 6);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(full[0]).eigenvalues().minCoeff(), 0.0);
}

TEST(Pipeline, MapNearBayesOnGaussianData) {
    const GeneratedGmm gen = gen_gmm_classes(3, 10, 1, 1e-2, 200, 21);
    const LabeledDataset test = draw_gmm_dataset(gen.models, 2000, 22);
    const double fitted = classify(gen.dataset, test, ClassifierKind::map, 1).accuracy;
    const MapClassifier exact{std::span<const GaussianClassModel>(gen.models)};
    std::size_t right = 0;
    for (Index j = 0; j < test.size(); ++j) right += exact.classify(test.samples().col(j)) == test.labels()[j];
    const double bayes = static_cast<double>(right) / test.size();
    EXPECT_GT(fitted, bayes - 0.03);
}

TEST(Pipeline, ErrorsOnShapeAndRank) {
    const LabeledDataset ds = small_dataset();
    EXPECT_THROW(classify(ds, ds, ClassifierKind::nsc, 3), InvalidArgument);  // 2 samples per class
    EXPECT_THROW(classify(ds, ds, ClassifierKind::nsc, 0), InvalidArgument);
    const LabeledDataset wide(Matrix::Ones(4, 2), {0, 1});
    EXPECT_THROW(classify(ds, wide, ClassifierKind::nsc, 1), InvalidArgument);
    const LinearTransform t = random_projection(4, 2, 1);
    EXPECT_THROW(classify(ds, ds, ClassifierKind::nsc, 1, &t), InvalidArgument);
    const LabeledDataset three(Matrix::Identity(3, 3), {0, 1, 2});
    EXPECT_THROW(classify(ds, three, ClassifierKind::nsc, 1), InvalidArgument);  // unseen class
}

TEST(Pipeline, TransformAppliedBeforeFitting) {
    const LabeledDataset ds = small_dataset();
    const LinearTransform id = LinearTransform::identity(3);
    EXPECT_EQ(classify(ds, ds, ClassifierKind::nsc, 1, &id).accuracy, classify(ds, ds, ClassifierKind::nsc, 1).accuracy);
}

TEST(Pipeline, PairwiseAnglesOfCases) {
    auto [u1, u2] = case_subspaces(1);
    const auto pairs = pairwise_angles({u1, u2, u1});
    ASSERT_EQ(pairs.size(), 3u);
    EXPECT_EQ(pairs[0].intersection_rank, 1);
    EXPECT_NEAR(pairs[0].chordal_sq, 1.0, 1e-12);
    EXPECT_EQ(pairs[1].first, 0u);
    EXPECT_EQ(pairs[1].second, 2u);
    EXPECT_EQ(pairs[1].intersection_rank, 2);
    EXPECT_TRUE(pairwise_angles({u1}).empty());
}

TEST(Pipeline, CenteringUsesGivenMean) {
    const LabeledDataset ds = small_dataset();
    const Vector mu = feature_mean(ds);
    const LabeledDataset c = shifted(ds, mu);
    EXPECT_LT(feature_mean(c).norm(), 1e-15);
    EXPECT_EQ(c.labels(), ds.labels());
    EXPECT_THROW(shifted(ds, Vector::Zero(2)), InvalidArgument);
}

// ---- experiment configuration ----

TEST(ExperimentConfig, DefaultsPerFigure) {
    ExperimentConfig c;
    c.id = "fig1c";
    const auto r = c.resolved();
    r.validate();
    ASSERT_EQ(r.sigma2.size(), 20u);
    EXPECT_DOUBLE_EQ(r.sigma2.front(), 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(r.sigma2.back(), lemma1_constants(6.0).c_of_p / 6.0);
    c.id = "fig2a";
    EXPECT_DOUBLE_EQ(c.resolved().sigma2.front(), 0.01);
    EXPECT_DOUBLE_EQ(c.resolved().sigma2.back(), 0.5);
    c.id = "fig5";
    EXPECT_EQ(c.resolved().m, (std::vector<Index>{3, 4, 5, 6, 7, 8, 9, 10}));
    c.id = "fig8";
    EXPECT_EQ(c.resolved().m, std::vector<Index>{30});
    for (const auto& id : figure_ids()) {
        c.id = id;
        EXPECT_NO_THROW(c.resolved().validate()) << id;
    }
}

TEST(ExperimentConfig, ValidationAndJson) {
    ExperimentConfig c;
    c.id = "fig9";
    EXPECT_THROW(c.resolved().validate(), InvalidArgument);
    c.id = "fig1a";
    c.trials = 0;
    EXPECT_THROW(c.resolved().validate(), InvalidArgument);
    c.trials = 10;
    c.sigma2 = {-1.0};
    EXPECT_THROW(c.resolved().validate(), InvalidArgument);

    const auto parsed = ExperimentConfig::from_json({{"id", "fig2b"}, {"sigma2", {0.1, 0.2}}, {"trials", 50}, {"seed", 9}});
    EXPECT_EQ(parsed.id, "fig2b");
    EXPECT_EQ(parsed.sigma2, (std::vector<double>{0.1, 0.2}));
    EXPECT_EQ(parsed.trials, 50u);
    EXPECT_EQ(parsed.seed, 9u);
    EXPECT_EQ(ExperimentConfig::from_json(parsed.to_json()).to_json(), parsed.to_json());
    EXPECT_THROW(ExperimentConfig::from_json({{"id", "fig2b"}, {"sigma", 1}}), InvalidArgument);
    EXPECT_THROW(ExperimentConfig::from_json({{"trials", "many"}}), InvalidArgument);
}

TEST(ExperimentConfig, LogGrid) {
    const auto g = log_grid(1e-4, 1e-2, 3);
    ASSERT_EQ(g.size(), 3u);
    EXPECT_EQ(g[0], 1e-4);
    EXPECT_NEAR(g[1], 1e-3, 1e-15);
    EXPECT_EQ(g[2], 1e-2);
    EXPECT_EQ(log_grid(2.0, 3.0, 1), std::vector<double>{2.0});
    EXPECT_THROW(log_grid(0.0, 1.0, 3), InvalidArgument);
}

// ---- figures ----

TEST(Figures, Fig1aCurvesAndOrdering) {
    ExperimentConfig c;
    c.id = "fig1a";
    c.sigma2 = {1e-3, 1e-2};
    c.trials = 20000;
    const FigureResult f = run_figure(c);
    ASSERT_EQ(f.curves.size(), 4u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_LT(f.curve("empirical_case2").y[i], f.curve("empirical_case1").y[i]);
        EXPECT_GE(f.curve("bound_case1").y[i], f.curve("empirical_case1").y[i]);
    }
    EXPECT_NEAR(f.curve("bound_case2").y[0], 4e-3, 1e-15);  // 4 sigma^2 in case 2
    EXPECT_EQ(f.manifest.at("config").at("trials"), 20000);
}

TEST(Figures, Fig1bUpperBoundsCoincide) {
    ExperimentConfig c;
    c.id = "fig1b";
    c.trials = 200;
    const FigureResult f = run_figure(c);
    EXPECT_EQ(f.curves.size(), 6u);
    for (std::size_t i = 0; i < 20; ++i) {
        EXPECT_NEAR(f.curve("bound_case1").y[i], f.curve("bound_case2").y[i], 1e-12);
        EXPECT_LE(f.curve("lower_bound_case1").y[i], f.curve("bound_case1").y[i]);
    }
}

TEST(Figures, Fig1cRecordsConstantsAndSkipsNothingInWindow) {
    ExperimentConfig c;
    c.id = "fig1c";
    c.trials = 200;
    c.sigma2 = log_grid(1.0 / 6.0, lemma1_constants(6.0).c_of_p / 6.0, 4);
    c.sigma2.push_back(10.0);  // outside the window
    const FigureResult f = run_figure(c);
    EXPECT_EQ(f.curve("bound_case1").x.size(), 4u);
    EXPECT_EQ(f.manifest.at("skipped_points").size(), 2u);
    EXPECT_EQ(f.manifest.at("quadratic_log_bound").at("c(p)").get<double>(), lemma1_constants(6.0).c_of_p);
    EXPECT_TRUE(f.manifest.at("constants").contains("case1"));
}

TEST(Figures, DeterministicPerSeed) {
    ExperimentConfig c;
    c.id = "fig2b";
    c.sigma2 = {0.05};
    c.trials = 500;
    c.mc_samples = 500;
    const FigureResult a = run_figure(c);
    const FigureResult b = run_figure(c);
    for (std::size_t k = 0; k < a.curves.size(); ++k) EXPECT_EQ(a.curves[k].y, b.curves[k].y);
    c.seed = 2;
    EXPECT_NE(run_figure(c).curves[0].y, a.curves[0].y);
}

TEST(Figures, WriteFigureFiles) {
    ExperimentConfig c;
    c.id = "fig4";
    const FigureResult f = run_figure(c);
    const fs::path dir = fs::temp_directory_path() / "pangle_tools_test_fig4";
    fs::remove_all(dir);
    const auto written = write_figure(f, dir);
    EXPECT_EQ(written.size(), f.curves.size() + 1);
    std::ifstream in(dir / "fig4_trait.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "x_value,y_value,y_stderr");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 3);
    std::ifstream mf(dir / "fig4_manifest.json");
    const auto manifest = nlohmann::json::parse(mf);
    EXPECT_EQ(manifest.at("curves").size(), f.curves.size());
    EXPECT_TRUE(manifest.contains("build"));
    EXPECT_FALSE(fs::exists(dir / "fig4_trait.csv.tmp"));
    fs::remove_all(dir);
}

TEST(Figures, UnknownCurveThrows) {
    ExperimentConfig c;
    c.id = "fig4";
    EXPECT_THROW(run_figure(c).curve("nope"), InvalidArgument);
}
