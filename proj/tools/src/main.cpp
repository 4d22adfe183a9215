#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pangle/bounds.hpp"
#include "pangle/data.hpp"
#include "pangle/error.hpp"
#include "pangle/gaussian.hpp"
#include "pangle/model.hpp"
#include "pangle/nsc.hpp"
#include "pangle/random.hpp"
#include "pangle/tools/experiments.hpp"
#include "pangle/tools/pipeline.hpp"
#include "pangle/tools/transform_io.hpp"
#include "pangle/transforms.hpp"

namespace fs = std::filesystem;
using namespace pangle;
using nlohmann::json;

namespace {

struct Globals {
    std::uint64_t seed = 1;
    std::string out = ".";
    std::size_t trials = 100000;
    std::string config;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* out_opt = nullptr;
    CLI::Option* trials_opt = nullptr;
};

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

LabeledDataset load_maybe_centered(const std::string& path, bool center, const Vector* mean = nullptr) {
    LabeledDataset ds = load_dataset(path);
    if (!center) return ds;
    return tools::shifted(ds, mean ? *mean : tools::feature_mean(ds));
}

Matrix matrix_from_json(const json& rows, const char* name) {
    if (!rows.is_array() || rows.empty()) throw InvalidArgument(std::string("model spec: '") + name + "' must be a nonempty array of rows");
    const Index r = static_cast<Index>(rows.size());
    const Index c = static_cast<Index>(rows.at(0).size());
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i) {
        if (static_cast<Index>(rows.at(i).size()) != c) throw InvalidArgument(std::string("model spec: ragged rows in '") + name + "'");
        for (Index j = 0; j < c; ++j) m(i, j) = rows.at(i).at(j).get<double>();
    }
    return m;
}

// Model pair from a case id or a JSON spec {"u1": rows, "u2": rows, "lambda1": [...], "lambda2": [...]}.
std::pair<GaussianClassModel, GaussianClassModel> model_pair(int case_id, const std::string& spec_path) {
    if (!spec_path.empty()) {
        std::ifstream in(spec_path);
        if (!in) throw Error("cannot open model spec " + spec_path);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw InvalidArgument(std::string("model spec: ") + e.what());
        }
        const Subspace u1(matrix_from_json(j.at("u1"), "u1"));
        const Subspace u2(matrix_from_json(j.at("u2"), "u2"));
        auto spectrum = [&](const char* key, Index d) {
            if (!j.contains(key)) return Vector(Vector::Ones(d));
            const auto v = j.at(key).get<std::vector<double>>();
            return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())));
        };
        return {GaussianClassModel(u1, spectrum("lambda1", u1.rank()), 1.0),
                GaussianClassModel(u2, spectrum("lambda2", u2.rank()), 1.0)};
    }
    auto [u1, u2] = case_subspaces(case_id);
    return {GaussianClassModel::isotropic(std::move(u1), 1.0), GaussianClassModel::isotropic(std::move(u2), 1.0)};
}

void write_outputs(const Globals& g, const std::string& stem, const std::string& csv, const json& manifest) {
    const fs::path dir(g.out);
    fs::create_directories(dir);
    tools::write_file_atomic(dir / (stem + ".csv"), csv);
    tools::write_file_atomic(dir / (stem + "_manifest.json"), manifest.dump(2) + "\n");
}

int cmd_angles(int case_id, const std::string& data, Index rank, bool center, int digits) {
    std::vector<Subspace> subs;
    if (!data.empty()) {
        subs = tools::fit_class_subspaces(load_maybe_centered(data, center), rank);
    } else {
        auto [u1, u2] = case_subspaces(case_id);
        subs = {std::move(u1), std::move(u2)};
    }
    const auto pairs = tools::pairwise_angles(subs);
    if (pairs.empty()) std::cout << "no class pairs\n";
    for (const auto& p : pairs) {
        std::string list;
        for (Index i = 0; i < p.angles.size(); ++i) {
            if (i > 0) list += ", ";
            list += fixed(p.angles[i] * 180.0 / std::numbers::pi, digits);
        }
        std::cout << "classes " << p.first + 1 << "-" << p.second + 1 << ": angles_deg = " << list
                  << "; chordal_sq = " << num(p.chordal_sq) << "; intersection_rank = " << p.intersection_rank << "\n";
    }
    return 0;
}

int cmd_bounds(const Globals& g, int case_id, const std::string& spec, std::vector<double> grid, double p) {
    if (grid.empty()) grid = tools::log_grid(1e-8, 1e2, 21);
    const auto [base1, base2] = model_pair(case_id, spec);
    const ModerateRegimeConstants mc = lemma1_constants(p);
    std::ostringstream csv;
    csv << "sigma2,exact,high_snr,high_snr_status,low_snr_upper,low_snr_lower,low_snr_status,moderate,moderate_status\n";
    json notes = json::array();
    for (const double s2 : grid) {
        const auto m1 = base1.with_noise_var(s2);
        const auto m2 = base2.with_noise_var(s2);
        csv << num(s2) << ',' << num(bhattacharyya_bound(m1, m2));
        auto column = [&](const char* name, auto&& fn, bool two) {
            try {
                const BoundReport r = fn();
                csv << ',' << num(r.value);
                if (two) csv << ',' << num(r.lower_value);
                csv << ",ok";
            } catch (const RegimeViolation& e) {
                csv << (two ? ",,," : ",,") << "regime_violation";
                notes.push_back({{"sigma2", s2}, {"bound", name}, {"reason", e.what()}});
            } catch (const InvalidArgument& e) {
                csv << (two ? ",,," : ",,") << "invalid";
                notes.push_back({{"sigma2", s2}, {"bound", name}, {"reason", e.what()}});
            }
        };
        column("high_snr", [&] { return high_snr_bound(m1, m2); }, false);
        column("low_snr", [&] { return low_snr_bounds(m1, m2); }, true);
        column("moderate", [&] { return moderate_snr_bound(m1, m2, p); }, false);
        csv << '\n';
    }
    json manifest;
    manifest["command"] = "bounds";
    manifest["case"] = spec.empty() ? json(case_id) : json(nullptr);
    manifest["model_spec"] = spec;
    manifest["sigma2"] = grid;
    manifest["constants"] = {{"p", p}, {"L(p)", mc.L_of_p}, {"c(p)", mc.c_of_p}};
    manifest["regime_notes"] = notes;
    manifest["build"] = tools::build_info();
    write_outputs(g, "bounds", csv.str(), manifest);
    std::cout << csv.str();
    std::cerr << "c(p) = " << num(mc.c_of_p) << " at p = " << num(p) << "\n";
    return 0;
}

int cmd_map_sim(const Globals& g, int case_id, std::vector<double> grid) {
    if (grid.empty()) grid = tools::log_grid(1e-4, 1e-2, 5);
    const auto [base1, base2] = model_pair(case_id, "");
    std::ostringstream csv;
    csv << "sigma2,pe,pe_stderr,bhattacharyya_bound\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto m1 = base1.with_noise_var(grid[i]);
        const auto m2 = base2.with_noise_var(grid[i]);
        const ErrorEstimate e = empirical_map_error(m1, m2, g.trials, mix_seed(g.seed) ^ i);
        csv << num(grid[i]) << ',' << num(e.mean) << ',' << num(e.std_err) << ',' << num(bhattacharyya_bound(m1, m2))
            << '\n';
    }
    json manifest = {{"command", "map-sim"}, {"case", case_id}, {"sigma2", grid}, {"trials", g.trials},
                     {"seed", g.seed}, {"build", tools::build_info()}};
    write_outputs(g, "map_sim", csv.str(), manifest);
    std::cout << csv.str();
    return 0;
}

int cmd_nsc_sim(const Globals& g, const std::vector<double>& angles_deg, const std::string& alpha,
                std::vector<double> grid, std::size_t mc_samples) {
    if (grid.empty()) grid = tools::log_grid(0.01, 0.5, 5);
    const Index d = static_cast<Index>(angles_deg.size());
    if (d < 1) throw InvalidArgument("nsc-sim: need at least one angle");
    // U1 = [e_1 .. e_d]; column i of U2 rotates e_i towards e_{2d+i} by angle i.
    Matrix b1 = Matrix::Zero(3 * d, d);
    Matrix b2 = Matrix::Zero(3 * d, d);
    for (Index i = 0; i < d; ++i) {
        const double a = angles_deg[static_cast<std::size_t>(i)] * std::numbers::pi / 180.0;
        if (!(a >= 0.0 && a <= std::numbers::pi / 2)) throw InvalidArgument("nsc-sim: angles must lie in [0, 90]");
        b1(i, i) = 1.0;
        b2(i, i) = std::cos(a);
        b2(2 * d + i, i) = std::sin(a);
    }
    const Subspace u1(b1);
    const Subspace u2(b2);
    std::optional<CoefficientSampler> sampler;
    if (alpha == "normal") sampler = CoefficientSampler::standard_normal(d);
    else if (alpha == "uniform") sampler = CoefficientSampler::uniform(d, -2.0, 2.0);
    else if (alpha == "case3" || alpha == "case4") {
        if (d != 2) throw InvalidArgument("nsc-sim: case3/case4 coefficients need exactly two angles");
        sampler = CoefficientSampler::unit_energy_dominant(alpha == "case3" ? 1 : 0);
    } else {
        throw InvalidArgument("nsc-sim: unknown --alpha '" + alpha + "' (normal, uniform, case3, case4)");
    }
    const PrincipalAngles pa = principal_angles(u1, u2);
    std::ostringstream csv;
    csv << "sigma2,empirical,empirical_stderr,bound,bound_stderr\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::uint64_t s = mix_seed(g.seed) ^ i;
        const ErrorEstimate e = empirical_nsc_error(u1, u2, *sampler, *sampler, grid[i], g.trials, s);
        const ErrorEstimate b = nsc_bound_mc(pa, *sampler, *sampler, grid[i], mc_samples, s);
        csv << num(grid[i]) << ',' << num(e.mean) << ',' << num(e.std_err) << ',' << num(b.mean) << ','
            << num(b.std_err) << '\n';
    }
    json manifest = {{"command", "nsc-sim"}, {"angles_deg", angles_deg}, {"alpha", alpha},  {"sigma2", grid},
                     {"trials", g.trials},   {"mc_samples", mc_samples}, {"seed", g.seed}, {"build", tools::build_info()}};
    write_outputs(g, "nsc_sim", csv.str(), manifest);
    std::cout << csv.str();
    return 0;
}

int cmd_train(const Globals& g, const std::string& data, const std::string& method_name, Index m, bool center,
              std::string transform_out, const TraitConfig& trait_defaults) {
    const LabeledDataset ds = load_maybe_centered(data, center);
    const TransformMethod method = parse_transform_method(method_name);
    json config = {{"method", method_name}, {"m", m}, {"center", center}};
    std::optional<LinearTransform> t;
    switch (method) {
        case TransformMethod::trait: {
            TraitConfig c = trait_defaults;
            c.target_dim = m;
            config["max_iters"] = c.max_iters;
            config["initial_step"] = c.initial_step;
            config["backtrack"] = c.backtrack;
            config["armijo_slope"] = c.armijo_slope;
            config["grad_tol"] = c.grad_tol;
            config["rel_decrease_tol"] = c.rel_decrease_tol;
            t = train_trait(ds, c, g.seed);
            break;
        }
        case TransformMethod::lrt: {
            LrtConfig c;
            c.target_dim = m;
            config["spectral_cap"] = c.spectral_cap;
            config["iterations"] = c.iterations;
            config["step"] = c.step;
            t = train_lrt(ds, c, g.seed);
            break;
        }
        case TransformMethod::lda:
            t = train_lda(ds, m);
            break;
        case TransformMethod::random:
            t = random_projection(ds.dim(), m, g.seed);
            break;
        case TransformMethod::identity:
            throw InvalidArgument("train: method must be trait, lrt, lda or random");
    }
    if (transform_out.empty()) {
        fs::create_directories(g.out);
        transform_out = (fs::path(g.out) / ("transform_" + method_name + ".txt")).string();
    }
    std::ostringstream os;
    tools::write_transform(os, *t, config);
    tools::write_file_atomic(transform_out, os.str());
    std::cout << "final objective: " << num(t->meta().final_objective) << " (initial " << num(t->meta().initial_objective)
              << ", " << t->meta().iterations << " iterations)\n"
              << "wrote " << transform_out << "\n";
    return 0;
}

int cmd_classify(const std::string& train_path, const std::string& test_path, const std::string& classifier,
                 Index rank, const std::string& transform_path, bool center) {
    LabeledDataset train = load_dataset(train_path);
    LabeledDataset test = load_dataset(test_path);
    if (center) {
        if (train.dim() != test.dim()) throw InvalidArgument("train and test feature dimensions differ");
        const Vector mu = tools::feature_mean(train);
        train = tools::shifted(train, mu);
        test = tools::shifted(test, mu);
    }
    std::optional<tools::TransformFile> tf;
    if (!transform_path.empty()) tf = tools::load_transform(transform_path);
    const tools::ClassifyReport rep = tools::classify(train, test, tools::parse_classifier(classifier), rank,
                                                      tf ? &tf->transform : nullptr);
    json j = rep.to_json();
    j["classifier"] = classifier;
    j["rank"] = rank;
    if (tf) j["transform"] = to_string(tf->transform.method());
    std::cout << j.dump() << "\n";
    return 0;
}

int cmd_reproduce(const Globals& g, const std::string& figure) {
    tools::ExperimentConfig cfg;
    if (!g.config.empty()) {
        std::ifstream in(g.config);
        if (!in) throw Error("cannot open config " + g.config);
        try {
            cfg = tools::ExperimentConfig::from_json(json::parse(in));
        } catch (const json::exception& e) {
            throw InvalidArgument(std::string("config: ") + e.what());
        }
    }
    if (!figure.empty()) cfg.id = figure;
    if (g.seed_opt->count() > 0 || g.config.empty()) cfg.seed = g.seed;
    if (g.trials_opt->count() > 0 || g.config.empty()) cfg.trials = g.trials;
    if (g.out_opt->count() > 0 || g.config.empty()) cfg.out = g.out;
    const tools::FigureResult res = tools::run_figure(cfg);
    for (const auto& p : tools::write_figure(res, cfg.out)) std::cout << "wrote " << p.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pangle: principal-angle classification bounds, transforms and experiments"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    g.seed_opt = app.add_option("--seed", g.seed, "Random seed (u64)");
    g.out_opt = app.add_option("--out", g.out, "Output directory");
    g.trials_opt = app.add_option("--trials", g.trials, "Monte Carlo trials per grid point")->check(CLI::PositiveNumber);
    app.add_option("--config", g.config, "ExperimentConfig JSON file")->check(CLI::ExistingFile);

    int case_id = 1;
    std::string data;
    std::string spec;
    Index rank = 1;
    bool center = false;
    int digits = 1;
    std::vector<double> grid;
    double p = 6.0;

    auto* angles = app.add_subcommand("angles", "Principal angles between class subspaces");
    auto* angles_case = angles->add_option("--case", case_id, "Built-in subspace pair (1 or 2)");
    angles->add_option("--data", data, "Dataset CSV; class subspaces are fitted at --rank")->excludes(angles_case);
    angles->add_option("--rank", rank, "Subspace rank d for --data");
    angles->add_flag("--center", center, "Subtract the feature mean before fitting");
    angles->add_option("--digits", digits, "Decimals printed for angles in degrees");

    auto* bounds = app.add_subcommand("bounds", "Tabulate the exact and regime error bounds over sigma^2");
    auto* bounds_case = bounds->add_option("--case", case_id, "Built-in subspace pair (1 or 2)");
    bounds->add_option("--model", spec, "JSON model spec {u1, u2, lambda1, lambda2}")->excludes(bounds_case);
    bounds->add_option("--sigma2", grid, "sigma^2 grid")->delimiter(',');
    bounds->add_option("--p", p, "Moderate-regime parameter p > 1");

    auto* map_sim = app.add_subcommand("map-sim", "Empirical MAP error for a built-in case");
    map_sim->add_option("--case", case_id, "Built-in subspace pair (1 or 2)");
    map_sim->add_option("--sigma2", grid, "sigma^2 grid")->delimiter(',');

    std::vector<double> angles_deg = {45.0, 45.0};
    std::string alpha = "normal";
    std::size_t mc_samples = 100000;
    auto* nsc_sim = app.add_subcommand("nsc-sim", "Empirical NSC error and the integrated bound");
    nsc_sim->add_option("--angles", angles_deg, "Principal angles in degrees")->delimiter(',');
    nsc_sim->add_option("--alpha", alpha, "Coefficient law: normal, uniform, case3, case4");
    nsc_sim->add_option("--sigma2", grid, "sigma^2 grid")->delimiter(',');
    nsc_sim->add_option("--mc-samples", mc_samples, "Draws for the bound integral")->check(CLI::PositiveNumber);

    std::string method;
    Index m = 0;
    std::string transform_out;
    TraitConfig trait_cfg;
    auto* train = app.add_subcommand("train", "Learn a feature transform and save it");
    train->add_option("--data", data, "Training dataset CSV")->required()->check(CLI::ExistingFile);
    train->add_option("--method", method, "trait, lrt, lda or random")->required();
    train->add_option("--m", m, "Target dimension")->required();
    train->add_option("--transform-out", transform_out, "Output path (default <out>/transform_<method>.txt)");
    train->add_option("--max-iters", trait_cfg.max_iters, "TRAIT iteration cap");
    train->add_flag("--center", center, "Subtract the feature mean before training");

    std::string test_path;
    std::string classifier = "nsc";
    std::string transform_path;
    auto* cls = app.add_subcommand("classify", "Fit on a training CSV, report accuracy on a test CSV");
    cls->add_option("--train", data, "Training dataset CSV")->required()->check(CLI::ExistingFile);
    cls->add_option("--test", test_path, "Test dataset CSV")->required()->check(CLI::ExistingFile);
    cls->add_option("--classifier", classifier, "map or nsc");
    cls->add_option("--rank", rank, "Class subspace / model rank d")->required();
    cls->add_option("--transform", transform_path, "Transform file from `train`")->check(CLI::ExistingFile);
    cls->add_flag("--center", center, "Subtract the training feature mean from both sets");

    std::string figure;
    auto* rep = app.add_subcommand("reproduce", "Regenerate a figure's curves as CSV plus a JSON manifest");
    rep->add_option("figure", figure, "fig1a fig1b fig1c fig2a fig2b fig4 fig5 fig8");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*angles) return cmd_angles(case_id, data, rank, center, digits);
        if (*bounds) return cmd_bounds(g, case_id, spec, grid, p);
        if (*map_sim) return cmd_map_sim(g, case_id, grid);
        if (*nsc_sim) return cmd_nsc_sim(g, angles_deg, alpha, grid, mc_samples);
        if (*train) return cmd_train(g, data, method, m, center, transform_out, trait_cfg);
        if (*cls) return cmd_classify(data, test_path, classifier, rank, transform_path, center);
        if (*rep) {
            if (figure.empty() && g.config.empty()) throw InvalidArgument("reproduce: give a figure id or --config");
            return cmd_reproduce(g, figure);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
