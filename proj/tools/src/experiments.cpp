#include "pangle/tools/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "pangle/bounds.hpp"
#include "pangle/data.hpp"
#include "pangle/error.hpp"
#include "pangle/gaussian.hpp"
#include "pangle/model.hpp"
#include "pangle/nsc.hpp"
#include "pangle/random.hpp"
#include "pangle/tools/pipeline.hpp"
#include "pangle/transforms.hpp"

#ifndef PANGLE_VERSION
#define PANGLE_VERSION "unknown"
#endif

namespace pangle::tools {
namespace {

constexpr std::size_t kNumClasses = 3;

// Independent stream per (curve, grid point).
std::uint64_t point_seed(std::uint64_t seed, std::uint64_t curve, std::uint64_t point) {
    return mix_seed(mix_seed(seed + 0x9e3779b97f4a7c15ULL * (curve + 1)) ^ point);
}

double binomial_stderr(double p, std::size_t n) { return std::sqrt(std::max(p * (1.0 - p), 0.0) / n); }

std::string fmt(double v) {
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

// --- fig1: MAP error and regime bounds for the two fixed subspace pairs ---

struct CasePair {
    Subspace u1;
    Subspace u2;
};

CasePair case_pair(int id) {
    auto [a, b] = case_subspaces(id);
    return {std::move(a), std::move(b)};
}

FigureResult fig1_common(const ExperimentConfig& cfg, const std::string& regime) {
    FigureResult res;
    res.id = cfg.id;
    const CasePair cases[2] = {case_pair(1), case_pair(2)};
    Curve empirical[2] = {{"empirical_case1", {}, {}, {}}, {"empirical_case2", {}, {}, {}}};
    Curve upper[2] = {{"bound_case1", {}, {}, {}}, {"bound_case2", {}, {}, {}}};
    Curve lower[2] = {{"lower_bound_case1", {}, {}, {}}, {"lower_bound_case2", {}, {}, {}}};
    nlohmann::json constants = nlohmann::json::object();
    nlohmann::json skipped = nlohmann::json::array();

    for (std::size_t i = 0; i < cfg.sigma2.size(); ++i) {
        const double s2 = cfg.sigma2[i];
        for (int c = 0; c < 2; ++c) {
            const auto m1 = GaussianClassModel::isotropic(cases[c].u1, s2);
            const auto m2 = GaussianClassModel::isotropic(cases[c].u2, s2);
            const std::string key = "case" + std::to_string(c + 1);
            try {
                BoundReport rep;
                if (regime == "high") {
                    rep = high_snr_bound(m1, m2);
                } else if (regime == "low") {
                    rep = low_snr_bounds(m1, m2);
                    lower[c].push(s2, rep.lower_value, 0.0);
                } else {
                    rep = moderate_snr_bound(m1, m2, cfg.p);
                }
                upper[c].push(s2, rep.value, 0.0);
                for (const auto& [name, v] : rep.constants) constants[key][name].push_back(v);
            } catch (const RegimeViolation& e) {
                skipped.push_back({{"sigma2", s2}, {"case", c + 1}, {"reason", e.what()}});
                continue;
            }
            const ErrorEstimate est = empirical_map_error(m1, m2, cfg.trials, point_seed(cfg.seed, c, i));
            empirical[c].push(s2, est.mean, est.std_err);
        }
    }
    res.curves = {empirical[0], empirical[1], upper[0], upper[1]};
    if (regime == "low") {
        res.curves.push_back(lower[0]);
        res.curves.push_back(lower[1]);
    }
    res.manifest["constants"] = constants;
    res.manifest["skipped_points"] = skipped;
    res.manifest["bound"] = regime == "high" ? "high_snr" : regime == "low" ? "low_snr_pair" : "moderate_snr";
    if (regime == "moderate") {
        const ModerateRegimeConstants mc = lemma1_constants(cfg.p);
        res.manifest["quadratic_log_bound"] = {{"p", mc.p}, {"L(p)", mc.L_of_p}, {"c(p)", mc.c_of_p}};
    }
    return res;
}

// --- fig2: NSC error vs the integrated error bound ---

Subspace fig2_u1() {
    Matrix u = Matrix::Zero(6, 2);
    u(0, 0) = 1.0;
    u(1, 1) = 1.0;
    return Subspace(std::move(u));
}

// Columns (cos a, 0, 0, 0, sin a, 0) and (0, cos b, 0, 0, 0, sin b): angles a and b to fig2_u1.
Subspace fig2_u2(double a, double b) {
    Matrix u = Matrix::Zero(6, 2);
    u(0, 0) = std::cos(a);
    u(4, 0) = std::sin(a);
    u(1, 1) = std::cos(b);
    u(5, 1) = std::sin(b);
    return Subspace(std::move(u));
}

std::string degrees_tag(double rad) { return std::to_string(static_cast<int>(std::lround(rad * 180.0 / std::numbers::pi))); }

// The same seed is used for every curve at a grid point (common random numbers), so
// curve-to-curve comparisons are not blurred by independent sampling noise.
void nsc_curves(const ExperimentConfig& cfg, const Subspace& u1, const Subspace& u2, const CoefficientSampler& p,
                const CoefficientSampler& q, const std::string& tag, FigureResult& res) {
    const PrincipalAngles angles = principal_angles(u1, u2);
    Curve emp{"empirical_" + tag, {}, {}, {}};
    Curve bnd{"bound_" + tag, {}, {}, {}};
    for (std::size_t i = 0; i < cfg.sigma2.size(); ++i) {
        const double s2 = cfg.sigma2[i];
        const ErrorEstimate e = empirical_nsc_error(u1, u2, p, q, s2, cfg.trials, point_seed(cfg.seed, 0, i));
        const ErrorEstimate b = nsc_bound_mc(angles, p, q, s2, cfg.mc_samples, point_seed(cfg.seed, 1, i));
        emp.push(s2, e.mean, e.std_err);
        bnd.push(s2, b.mean, b.std_err);
    }
    res.curves.push_back(std::move(emp));
    res.curves.push_back(std::move(bnd));
    std::vector<double> deg(angles.radians().data(), angles.radians().data() + angles.size());
    for (double& a : deg) a *= 180.0 / std::numbers::pi;
    res.manifest["angles_deg"][tag] = deg;
    res.manifest["samplers"][tag] = {p.tag(), q.tag()};
}

FigureResult fig2a(const ExperimentConfig& cfg) {
    FigureResult res;
    res.id = cfg.id;
    const Subspace u1 = fig2_u1();
    const auto normal = CoefficientSampler::standard_normal(2);
    for (const double theta : {std::numbers::pi / 6, std::numbers::pi / 4, std::numbers::pi / 3}) {
        nsc_curves(cfg, u1, fig2_u2(theta, theta), normal, normal, "theta" + degrees_tag(theta), res);
    }
    return res;
}

FigureResult fig2b(const ExperimentConfig& cfg) {
    FigureResult res;
    res.id = cfg.id;
    const Subspace u1 = fig2_u1();
    const Subspace u2 = fig2_u2(std::numbers::pi / 6, std::numbers::pi / 3);
    // case 3: energy mostly on the large-angle mode; case 4: on the small-angle mode
    const auto case3 = CoefficientSampler::unit_energy_dominant(1);
    const auto case4 = CoefficientSampler::unit_energy_dominant(0);
    nsc_curves(cfg, u1, u2, case3, case3, "case3", res);
    nsc_curves(cfg, u1, u2, case4, case4, "case4", res);
    return res;
}

// --- Figures 4, 5, 8: learned transforms ---

struct TrainedSet {
    std::vector<std::pair<std::string, LinearTransform>> transforms;
    nlohmann::json meta = nlohmann::json::object();
};

TrainedSet train_all(const LabeledDataset& train, Index m, std::uint64_t seed, bool with_lda) {
    TrainedSet out;
    TraitConfig tc;
    tc.target_dim = m;
    LrtConfig lc;
    lc.target_dim = m;
    auto record = [&](const std::string& name, LinearTransform t) {
        out.meta[name] = {{"m", t.output_dim()},
                          {"iterations", t.meta().iterations},
                          {"initial_objective", t.meta().initial_objective},
                          {"final_objective", t.meta().final_objective}};
        out.transforms.emplace_back(name, std::move(t));
    };
    record("trait", train_trait(train, tc, seed));
    record("lrt", train_lrt(train, lc, seed));
    if (with_lda) {
        const Index lda_m = std::min<Index>(m, static_cast<Index>(train.num_classes()) - 1);
        record("lda", train_lda(train, lda_m));
    }
    record("random", random_projection(train.dim(), m, seed));
    return out;
}

FigureResult fig4(const ExperimentConfig& cfg) {
    FigureResult res;
    res.id = cfg.id;
    const Index m = cfg.m.front();
    const GeneratedGmm gen = gen_gmm_classes(kNumClasses, 10, 1, cfg.sigma2.front(), cfg.train_per_class, cfg.seed);
    const LabeledDataset& train = gen.dataset;
    TrainedSet ts = train_all(train, m, cfg.seed, true);
    ts.transforms.insert(ts.transforms.begin(), {"original", LinearTransform::identity(train.dim())});

    nlohmann::json min_angles;
    for (const auto& [name, t] : ts.transforms) {
        Curve c{name, {}, {}, {}};
        const auto pairs = pairwise_angles(fit_class_subspaces(t.apply(train), 1));
        double lo = 90.0;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const double deg = pairs[k].angles[0] * 180.0 / std::numbers::pi;
            c.push(static_cast<double>(k + 1), deg, 0.0);
            lo = std::min(lo, deg);
        }
        min_angles[name] = lo;
        res.curves.push_back(std::move(c));
    }
    res.manifest["x_value"] = "class pair index: 1 = (1,2), 2 = (1,3), 3 = (2,3)";
    res.manifest["y_value"] = "principal angle between rank-1 class subspaces of the transformed training data (degrees)";
    res.manifest["min_angle_deg"] = min_angles;
    res.manifest["training"] = ts.meta;
    res.manifest["data"] = {{"K", kNumClasses}, {"n", 10}, {"d", 1}, {"sigma2", cfg.sigma2.front()}};
    return res;
}

// MAP with the exact class laws N(0, A Sigma_k A^T) of the transformed features.
double map_error_exact(const std::vector<GaussianClassModel>& models, const Matrix& a, const LabeledDataset& test) {
    std::vector<Matrix> covs;
    for (const auto& mdl : models) {
        const Matrix c = a * covariance(mdl) * a.transpose();
        covs.push_back(0.5 * (c + c.transpose()));
    }
    const MapClassifier clf(covs);
    const Matrix y = a * test.samples();
    std::size_t errors = 0;
    for (Index j = 0; j < y.cols(); ++j) {
        if (clf.classify(y.col(j)) != test.labels()[static_cast<std::size_t>(j)]) ++errors;
    }
    return static_cast<double>(errors) / static_cast<double>(y.cols());
}

FigureResult fig5(const ExperimentConfig& cfg) {
    FigureResult res;
    res.id = cfg.id;
    const GeneratedGmm gen = gen_gmm_classes(kNumClasses, 10, 1, cfg.sigma2.front(), cfg.train_per_class, cfg.seed);
    const LabeledDataset test = draw_gmm_dataset(gen.models, cfg.test_per_class, point_seed(cfg.seed, 99, 0));
    const std::size_t n_test = static_cast<std::size_t>(test.size());
    const Index n = gen.dataset.dim();

    const double pe_orig = map_error_exact(gen.models, Matrix::Identity(n, n), test);
    Curve original{"original", {}, {}, {}};
    std::vector<Curve> curves;
    nlohmann::json training;
    for (const Index m : cfg.m) {
        const TrainedSet ts = train_all(gen.dataset, m, cfg.seed, true);
        if (curves.empty()) {
            for (const auto& [name, t] : ts.transforms) curves.push_back(Curve{name, {}, {}, {}});
        }
        for (std::size_t k = 0; k < ts.transforms.size(); ++k) {
            const double pe = map_error_exact(gen.models, ts.transforms[k].second.matrix(), test);
            curves[k].push(static_cast<double>(m), pe, binomial_stderr(pe, n_test));
        }
        original.push(static_cast<double>(m), pe_orig, binomial_stderr(pe_orig, n_test));
        training[std::to_string(m)] = ts.meta;
    }
    res.curves.push_back(std::move(original));
    for (auto& c : curves) res.curves.push_back(std::move(c));
    res.manifest["x_value"] = "target dimension m";
    res.manifest["y_value"] = "MAP misclassification rate on the test set using the exact transformed class covariances";
    res.manifest["lda_dim"] = "min(m, K - 1)";
    res.manifest["training"] = training;
    res.manifest["data"] = {{"K", kNumClasses}, {"n", 10}, {"d", 1}, {"sigma2", cfg.sigma2.front()}};
    return res;
}

FigureResult fig8(const ExperimentConfig& cfg) {
    FigureResult res;
    res.id = cfg.id;
    const Index m = cfg.m.front();
    constexpr Index kN = 100;
    constexpr Index kD = 5;
    Curve original{"original", {}, {}, {}};
    Curve trait{"trait", {}, {}, {}};
    Curve lrt{"lrt", {}, {}, {}};
    nlohmann::json training;
    for (std::size_t i = 0; i < cfg.sigma2.size(); ++i) {
        const double sigma = std::sqrt(cfg.sigma2[i]);
        // same class subspaces at every noise level; fresh noise per level
        const GeneratedSubspaceData gen = gen_uniform_subspace_data(kNumClasses, kN, kD, sigma, cfg.seed,
                                                                    cfg.train_per_class);
        const LabeledDataset test =
            draw_uniform_subspace_dataset(gen.bases, sigma, cfg.test_per_class, point_seed(cfg.seed, 98, i));
        const std::size_t n_test = static_cast<std::size_t>(test.size());
        const TrainedSet ts = train_all(gen.dataset, m, cfg.seed, false);
        const double acc0 = classify(gen.dataset, test, ClassifierKind::nsc, kD).accuracy;
        original.push(sigma, acc0, binomial_stderr(acc0, n_test));
        for (const auto& [name, t] : ts.transforms) {
            if (name == "random") continue;
            const double acc = classify(gen.dataset, test, ClassifierKind::nsc, kD, &t).accuracy;
            (name == "trait" ? trait : lrt).push(sigma, acc, binomial_stderr(acc, n_test));
        }
        training[fmt(sigma)] = ts.meta;
    }
    res.curves = {original, trait, lrt};
    res.manifest["x_value"] = "noise standard deviation sigma";
    res.manifest["y_value"] = "NSC accuracy (rank-5 class subspaces fitted on the transformed training set)";
    res.manifest["training"] = training;
    res.manifest["data"] = {{"K", kNumClasses}, {"n", kN}, {"d", kD}, {"alpha", "Uniform[-2,2]"}};
    return res;
}

}  // namespace

const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids = {"fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig4", "fig5", "fig8"};
    return ids;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0 && hi >= lo) || n < 1) throw InvalidArgument("log_grid: need 0 < lo <= hi and n >= 1");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * static_cast<double>(i) / (n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

ExperimentConfig ExperimentConfig::resolved() const {
    ExperimentConfig c = *this;
    if (c.sigma2.empty()) {
        if (c.id == "fig1a") c.sigma2 = log_grid(1e-6, 1e-2, 20);
        else if (c.id == "fig1b") c.sigma2 = log_grid(5.0, 50.0, 20);
        else if (c.id == "fig1c") c.sigma2 = log_grid(1.0 / c.p, lemma1_constants(c.p).c_of_p / c.p, 20);
        else if (c.id == "fig2a" || c.id == "fig2b") c.sigma2 = log_grid(0.01, 0.5, 20);
        else if (c.id == "fig4" || c.id == "fig5") c.sigma2 = {1e-2};
        else if (c.id == "fig8") c.sigma2 = {0.0625, 0.25, 0.5625, 1.0, 1.5625, 2.25};  // sigma = 0.25 .. 1.5
    }
    if (c.m.empty()) {
        if (c.id == "fig5") c.m = {3, 4, 5, 6, 7, 8, 9, 10};
        else if (c.id == "fig8") c.m = {30};
        else c.m = {3};
    }
    return c;
}

void ExperimentConfig::validate() const {
    const auto& ids = figure_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) throw InvalidArgument("unknown figure id '" + id + "'");
    if (sigma2.empty()) throw InvalidArgument("ExperimentConfig: sigma2 grid is empty");
    for (const double s : sigma2) {
        if (!(s > 0.0 && std::isfinite(s))) throw InvalidArgument("ExperimentConfig: sigma2 values must be positive");
    }
    if (m.empty()) throw InvalidArgument("ExperimentConfig: m list is empty");
    for (const Index v : m) {
        if (v < 1) throw InvalidArgument("ExperimentConfig: m values must be >= 1");
    }
    if (trials < 1 || mc_samples < 1) throw InvalidArgument("ExperimentConfig: trials and mc_samples must be >= 1");
    if (!(p > 1.0)) throw InvalidArgument("ExperimentConfig: p must exceed 1");
    if (train_per_class < 2 || test_per_class < 1) {
        throw InvalidArgument("ExperimentConfig: need train_per_class >= 2 and test_per_class >= 1");
    }
}

nlohmann::json ExperimentConfig::to_json() const {
    return {{"id", id},
            {"sigma2", sigma2},
            {"p", p},
            {"trials", trials},
            {"mc_samples", mc_samples},
            {"m", m},
            {"seed", seed},
            {"out", out},
            {"train_per_class", train_per_class},
            {"test_per_class", test_per_class}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    static const std::set<std::string> known = {"id", "sigma2", "p", "trials", "mc_samples", "m",
                                                "seed", "out", "train_per_class", "test_per_class"};
    if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw InvalidArgument("config: unknown key '" + key + "'");
    }
    ExperimentConfig c;
    try {
        c.id = j.value("id", c.id);
        c.sigma2 = j.value("sigma2", c.sigma2);
        c.p = j.value("p", c.p);
        c.trials = j.value("trials", c.trials);
        c.mc_samples = j.value("mc_samples", c.mc_samples);
        c.m = j.value("m", c.m);
        c.seed = j.value("seed", c.seed);
        c.out = j.value("out", c.out);
        c.train_per_class = j.value("train_per_class", c.train_per_class);
        c.test_per_class = j.value("test_per_class", c.test_per_class);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    return c;
}

const Curve& FigureResult::curve(const std::string& name) const {
    for (const auto& c : curves) {
        if (c.name == name) return c;
    }
    throw InvalidArgument("figure " + id + " has no curve '" + name + "'");
}

FigureResult run_figure(const ExperimentConfig& config) {
    const ExperimentConfig cfg = config.resolved();
    cfg.validate();
    FigureResult res;
    if (cfg.id == "fig1a") res = fig1_common(cfg, "high");
    else if (cfg.id == "fig1b") res = fig1_common(cfg, "low");
    else if (cfg.id == "fig1c") res = fig1_common(cfg, "moderate");
    else if (cfg.id == "fig2a") res = fig2a(cfg);
    else if (cfg.id == "fig2b") res = fig2b(cfg);
    else if (cfg.id == "fig4") res = fig4(cfg);
    else if (cfg.id == "fig5") res = fig5(cfg);
    else res = fig8(cfg);
    res.manifest["figure"] = cfg.id;
    res.manifest["config"] = cfg.to_json();
    res.manifest["seed_derivation"] = "per curve and grid point: splitmix64(splitmix64(seed + golden * (curve + 1)) ^ point)";
    res.manifest["build"] = build_info();
    return res;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << text;
        if (!out.flush()) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::vector<std::filesystem::path> write_figure(const FigureResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    nlohmann::json manifest = result.manifest;
    manifest["curves"] = nlohmann::json::array();
    for (const auto& c : result.curves) {
        std::ostringstream os;
        os << "x_value,y_value,y_stderr\n";
        for (std::size_t i = 0; i < c.x.size(); ++i) {
            os << fmt(c.x[i]) << ',' << fmt(c.y[i]) << ',' << fmt(c.y_stderr[i]) << '\n';
        }
        const std::string file = result.id + "_" + c.name + ".csv";
        write_file_atomic(dir / file, os.str());
        written.push_back(dir / file);
        manifest["curves"].push_back({{"name", c.name}, {"file", file}, {"points", c.x.size()}});
    }
    const std::filesystem::path mpath = dir / (result.id + "_manifest.json");
    write_file_atomic(mpath, manifest.dump(2) + "\n");
    written.push_back(mpath);
    return written;
}

nlohmann::json build_info() {
    return {{"pangle_version", PANGLE_VERSION},
            {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                  std::to_string(EIGEN_MINOR_VERSION)},
            {"compiler", __VERSION__},
            {"cplusplus", __cplusplus}};
}

}  // namespace pangle::tools
