#include "pangle/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "pangle/error.hpp"
#include "pangle/random.hpp"

namespace pangle {

std::string to_string(TransformMethod method) {
    switch (method) {
        case TransformMethod::trait: return "trait";
        case TransformMethod::lrt: return "lrt";
        case TransformMethod::lda: return "lda";
        case TransformMethod::random: return "random";
        case TransformMethod::identity: return "identity";
    }
    return "unknown";
}

TransformMethod parse_transform_method(std::string_view name) {
    for (auto m : {TransformMethod::trait, TransformMethod::lrt, TransformMethod::lda, TransformMethod::random,
                   TransformMethod::identity}) {
        if (name == to_string(m)) return m;
    }
    throw InvalidArgument("unknown transform method '" + std::string(name) + "'");
}

LinearTransform::LinearTransform(Matrix matrix, TransformMethod method, TrainingMeta meta)
    : matrix_(std::move(matrix)), method_(method), meta_(std::move(meta)) {
    if (matrix_.rows() < 1 || matrix_.rows() > matrix_.cols()) {
        throw InvalidArgument("LinearTransform: need 1 <= m <= n, got " + std::to_string(matrix_.rows()) + "x" +
                              std::to_string(matrix_.cols()));
    }
    if (!matrix_.allFinite()) throw NumericalError("LinearTransform: non-finite entries");
}

LinearTransform LinearTransform::identity(Index n) {
    return LinearTransform(Matrix::Identity(n, n), TransformMethod::identity);
}

Matrix LinearTransform::apply(const Matrix& x) const {
    if (x.rows() != input_dim()) {
        throw InvalidArgument("transform expects " + std::to_string(input_dim()) + " features, data has " +
                              std::to_string(x.rows()));
    }
    return matrix_ * x;
}

LabeledDataset LinearTransform::apply(const LabeledDataset& ds) const { return ds.transformed(matrix_); }

TargetGram::TargetGram(Matrix dense, std::vector<Index> block_sizes)
    : dense_(std::move(dense)), block_sizes_(std::move(block_sizes)) {
    Index total = 0;
    for (auto b : block_sizes_) {
        if (b < 1) throw InvalidArgument("TargetGram: empty block");
        total += b;
    }
    if (dense_.rows() != total || dense_.cols() != total) {
        throw InvalidArgument("TargetGram: matrix size does not match block sizes");
    }
    if (!linalg::is_symmetric(dense_, 1e-10)) throw InvalidArgument("TargetGram: not symmetric");
    Index start = 0;
    for (auto b : block_sizes_) {
        // off-block entries must be exactly zero
        if ((dense_.block(start, 0, b, start).array() != 0.0).any() ||
            (dense_.block(start, start + b, b, total - start - b).array() != 0.0).any()) {
            throw InvalidArgument("TargetGram: nonzero entry outside the diagonal blocks");
        }
        start += b;
    }
}

TargetGram build_target_gram(const LabeledDataset& ds) {
    const Index n_total = ds.size();
    Matrix t = Matrix::Zero(n_total, n_total);
    std::vector<Index> sizes;
    Index start = 0;
    for (std::size_t k = 0; k < ds.num_classes(); ++k) {
        const Matrix xk = ds.class_samples(k);
        Matrix block = xk.transpose() * xk;
        t.block(start, start, xk.cols(), xk.cols()) = 0.5 * (block + block.transpose());
        sizes.push_back(xk.cols());
        start += xk.cols();
    }
    return TargetGram(std::move(t), std::move(sizes));
}

namespace {

void check_trait_dims(const Matrix& a, const Matrix& x, const Matrix& t) {
    if (a.cols() != x.rows()) throw InvalidArgument("trait: A has " + std::to_string(a.cols()) +
                                                    " columns but X has " + std::to_string(x.rows()) + " rows");
    if (t.rows() != x.cols() || t.cols() != x.cols()) {
        throw InvalidArgument("trait: T must be N x N with N = " + std::to_string(x.cols()));
    }
}

}  // namespace

double trait_objective(const Matrix& a, const Matrix& x, const Matrix& t) {
    check_trait_dims(a, x, t);
    const Matrix ax = a * x;
    const double n = static_cast<double>(x.cols());
    return (ax.transpose() * ax - t).squaredNorm() / (n * n);
}

Matrix trait_gradient(const Matrix& a, const Matrix& x, const Matrix& t) {
    check_trait_dims(a, x, t);
    const Matrix c = x * x.transpose();
    return a * (c * a.transpose() * a * c - x * t * x.transpose());
}

TraitProblem::TraitProblem(const Matrix& x, const Matrix& t)
    : c_(x * x.transpose()),
      s_(x * t * x.transpose()),
      t_norm_sq_(t.squaredNorm()),
      n_samples_(static_cast<double>(x.cols())) {
    check_trait_dims(Matrix::Zero(1, x.rows()), x, t);
    c_ = 0.5 * (c_ + c_.transpose()).eval();
    s_ = 0.5 * (s_ + s_.transpose()).eval();
}

double TraitProblem::objective(const Matrix& a) const {
    // ||X^T P X - T||^2 = tr(PCPC) - 2 tr(PS) + ||T||^2 with P = A^T A
    const Matrix aca = a * c_ * a.transpose();
    const double cross = (a * s_).cwiseProduct(a).sum();
    const double v = aca.squaredNorm() - 2.0 * cross + t_norm_sq_;
    return std::max(v, 0.0) / (n_samples_ * n_samples_);
}

Matrix TraitProblem::gradient(const Matrix& a) const {
    const Matrix ac = a * c_;
    return (ac * a.transpose()) * ac - a * s_;
}

void TraitConfig::validate() const {
    if (target_dim < 1) throw InvalidArgument("TraitConfig: target_dim must be >= 1");
    if (max_iters < 1) throw InvalidArgument("TraitConfig: max_iters must be >= 1");
    if (!(initial_step > 0.0)) throw InvalidArgument("TraitConfig: initial_step must be > 0");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw InvalidArgument("TraitConfig: backtrack must lie in (0, 1)");
    if (!(armijo_slope > 0.0 && armijo_slope < 1.0)) throw InvalidArgument("TraitConfig: armijo_slope must lie in (0, 1)");
    if (!(grad_tol > 0.0)) throw InvalidArgument("TraitConfig: grad_tol must be > 0");
    if (!(rel_decrease_tol > 0.0)) throw InvalidArgument("TraitConfig: rel_decrease_tol must be > 0");
}

LinearTransform train_trait(const LabeledDataset& ds, const TraitConfig& config, std::uint64_t seed) {
    config.validate();
    const Index n = ds.dim();
    const Index m = config.target_dim;
    if (m > n) throw InvalidArgument("train_trait: target_dim " + std::to_string(m) + " exceeds n = " + std::to_string(n));

    const Matrix x = ds.grouped_samples();
    const TargetGram t = build_target_gram(ds);
    const TraitProblem problem(x, t.dense());

    Matrix a = Matrix::Identity(m, n);
    double f = problem.objective(a);
    if (!std::isfinite(f)) throw NumericalError("train_trait: non-finite objective at iteration 0");

    TrainingMeta meta;
    meta.seed = seed;
    meta.initial_objective = f;
    meta.objectives.push_back(f);

    // The first trial step of each iteration is min(eta0, 2 * last accepted step):
    // backtracking from eta0 every time wastes ~log2(eta0 ||C||^2) evaluations.
    double eta = config.initial_step;
    std::size_t it = 0;
    for (; it < config.max_iters; ++it) {
        const Matrix g = problem.gradient(a);
        const double g_sq = g.squaredNorm();
        const double true_grad_norm = problem.gradient_scale() * std::sqrt(g_sq);
        if (!std::isfinite(g_sq)) throw NumericalError("train_trait: non-finite gradient at iteration " + std::to_string(it));
        if (true_grad_norm < config.grad_tol * (1.0 + f)) break;

        const double slope = problem.gradient_scale() * g_sq;  // <grad f, G>
        eta = std::min(config.initial_step, 2.0 * eta);
        Matrix trial;
        double f_new = 0.0;
        bool accepted = false;
        while (eta > std::numeric_limits<double>::min()) {
            trial = a - eta * g;
            f_new = problem.objective(trial);
            if (std::isfinite(f_new) && f_new <= f - config.armijo_slope * eta * slope) {
                accepted = true;
                break;
            }
            eta *= config.backtrack;
        }
        if (!accepted) break;  // no representable step decreases f: stationary to machine precision
        if (!trial.allFinite()) throw NumericalError("train_trait: non-finite iterate at iteration " + std::to_string(it + 1));

        const double decrease = f - f_new;
        a = std::move(trial);
        meta.step_sizes.push_back(eta);
        meta.objectives.push_back(f_new);
        const double f_old = f;
        f = f_new;
        if (decrease <= config.rel_decrease_tol * std::max(f_old, std::numeric_limits<double>::min())) {
            ++it;
            break;
        }
    }
    meta.iterations = meta.step_sizes.size();
    meta.final_objective = f;
    return LinearTransform(std::move(a), TransformMethod::trait, std::move(meta));
}

Matrix closed_form_gram_fit(const Matrix& x, const Matrix& t) {
    check_trait_dims(Matrix::Zero(1, x.rows()), x, t);
    Matrix c = x * x.transpose();
    c = 0.5 * (c + c.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(c);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo >= 1e12) {
        Index rank = 0;
        for (Index i = 0; i < eig.eigenvalues().size(); ++i)
            if (eig.eigenvalues()(i) > 1e-12 * hi) ++rank;
        throw RankDeficient(
            "closed_form_gram_fit: X X^T is ill-conditioned (cond >= 1e12); a ridge term X X^T + eps I "
            "would be needed and is not applied implicitly",
            rank);
    }
    const Matrix s = x * t * x.transpose();
    const Eigen::LDLT<Matrix> ldlt(c);
    const Matrix left = ldlt.solve(s);                                    // C^-1 S
    Matrix p = ldlt.solve(left.transpose()).transpose();                  // C^-1 S C^-1 (C symmetric)
    return 0.5 * (p + p.transpose());
}

void LrtConfig::validate() const {
    if (target_dim < 1) throw InvalidArgument("LrtConfig: target_dim must be >= 1");
    if (!(spectral_cap > 0.0)) throw InvalidArgument("LrtConfig: spectral_cap must be > 0");
    if (iterations < 1) throw InvalidArgument("LrtConfig: iterations must be >= 1");
    if (!(step > 0.0)) throw InvalidArgument("LrtConfig: step must be > 0");
}

namespace {

// ||M||_* and, when `sub` is non-null, the subgradient U V^T over the nonzero singular values.
double nuclear_norm(const Matrix& m, Matrix* sub) {
    Eigen::BDCSVD<Matrix> svd(m, sub ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : 0);
    const Vector& s = svd.singularValues();
    if (sub) {
        const double tol = s.size() > 0 ? s(0) * 1e-12 * static_cast<double>(std::max(m.rows(), m.cols())) : 0.0;
        Index r = 0;
        while (r < s.size() && s(r) > tol) ++r;
        *sub = svd.matrixU().leftCols(r) * svd.matrixV().leftCols(r).transpose();
    }
    return s.sum();
}

}  // namespace

double lrt_objective(const Matrix& a, const LabeledDataset& ds) {
    double v = -nuclear_norm(a * ds.samples(), nullptr);
    for (std::size_t k = 0; k < ds.num_classes(); ++k) v += nuclear_norm(a * ds.class_samples(k), nullptr);
    return v;
}

LinearTransform train_lrt(const LabeledDataset& ds, const LrtConfig& config, std::uint64_t seed) {
    config.validate();
    const Index n = ds.dim();
    const Index m = config.target_dim;
    if (m > n) throw InvalidArgument("train_lrt: target_dim " + std::to_string(m) + " exceeds n = " + std::to_string(n));

    // The objective is positively homogeneous in X, so solving on X / ||X||_2 has the
    // same minimizers while making the fixed step schedule independent of data scale.
    const Eigen::BDCSVD<Matrix> data_svd(ds.samples(), Eigen::ComputeFullU);
    const double scale = data_svd.singularValues().size() > 0 ? data_svd.singularValues()(0) : 0.0;
    if (!(scale > 0.0)) throw InvalidArgument("train_lrt: data matrix is zero");
    const Matrix all = ds.samples() / scale;
    std::vector<Matrix> classes;
    for (std::size_t k = 0; k < ds.num_classes(); ++k) classes.push_back(ds.class_samples(k) / scale);

    // Start from the top-m principal directions of the data (spectral norm 1).
    Matrix init = data_svd.matrixU().leftCols(m);
    linalg::canonicalize_column_signs(init);
    Matrix a = linalg::clip_spectral_norm(init.transpose(), config.spectral_cap);

    auto evaluate = [&](const Matrix& cur, Matrix* grad) {
        Matrix sub;
        double v = -nuclear_norm(cur * all, grad ? &sub : nullptr);
        if (grad) *grad = -sub * all.transpose();
        for (const auto& xk : classes) {
            v += nuclear_norm(cur * xk, grad ? &sub : nullptr);
            if (grad) *grad += sub * xk.transpose();
        }
        return v;
    };

    TrainingMeta meta;
    meta.seed = seed;
    Matrix grad;
    double f = evaluate(a, &grad);
    meta.initial_objective = f * scale;
    meta.objectives.push_back(f * scale);
    Matrix best = a;
    double best_f = f;
    for (std::size_t t = 1; t <= config.iterations; ++t) {
        const double eta = config.step / std::sqrt(static_cast<double>(t));
        a = linalg::clip_spectral_norm(a - eta * grad, config.spectral_cap);
        f = evaluate(a, &grad);
        if (!std::isfinite(f)) throw NumericalError("train_lrt: non-finite objective at iteration " + std::to_string(t));
        meta.step_sizes.push_back(eta);
        meta.objectives.push_back(f * scale);
        if (f < best_f) {
            best_f = f;
            best = a;
        }
    }
    meta.iterations = config.iterations;
    meta.final_objective = best_f * scale;
    return LinearTransform(std::move(best), TransformMethod::lrt, std::move(meta));
}

LinearTransform train_lda(const LabeledDataset& ds, Index m) {
    const Index n = ds.dim();
    const Index k_classes = static_cast<Index>(ds.num_classes());
    const Index limit = std::min(n, k_classes - 1);
    if (m < 1 || m > limit) {
        throw InvalidArgument("train_lda: m = " + std::to_string(m) + " outside [1, min(n, K-1)] = [1, " +
                              std::to_string(limit) + "]");
    }
    const Vector mu = ds.samples().rowwise().mean();
    Matrix sw = Matrix::Zero(n, n);
    Matrix sb = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < ds.num_classes(); ++k) {
        const Matrix xk = ds.class_samples(k);
        const Vector mk = xk.rowwise().mean();
        const Matrix centered = xk.colwise() - mk;
        sw.noalias() += centered * centered.transpose();
        const Vector diff = mk - mu;
        sb.noalias() += static_cast<double>(xk.cols()) * diff * diff.transpose();
    }
    sw = 0.5 * (sw + sw.transpose()).eval();
    sb = 0.5 * (sb + sb.transpose()).eval();
    double gamma = 1e-6 * sw.trace() / static_cast<double>(n);
    if (!(gamma > 0.0)) gamma = 1e-12;  // every class a single point: S_W = 0
    sw.diagonal().array() += gamma;

    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> gev(sb, sw);
    if (gev.info() != Eigen::Success) throw NumericalError("train_lda: generalized eigensolver failed");
    // eigenvalues ascending: take the last m, largest first
    Matrix rows(m, n);
    for (Index i = 0; i < m; ++i) {
        Vector v = gev.eigenvectors().col(n - 1 - i);
        v.normalize();
        Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) v = -v;
        rows.row(i) = v.transpose();
    }
    return LinearTransform(std::move(rows), TransformMethod::lda);
}

LinearTransform random_projection(Index n, Index m, std::uint64_t seed) {
    if (m < 1 || m > n) throw InvalidArgument("random_projection: need 1 <= m <= n");
    std::mt19937_64 rng(mix_seed(seed));
    TrainingMeta meta;
    meta.seed = seed;
    return LinearTransform(standard_normal_matrix(rng, m, n), TransformMethod::random, std::move(meta));
}

}  // namespace pangle
