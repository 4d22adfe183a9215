#include "pangle/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include "pangle/error.hpp"
#include "pangle/gaussian.hpp"
#include "pangle/random.hpp"

namespace pangle {

LabeledDataset::LabeledDataset(Matrix samples, std::vector<std::size_t> labels)
    : samples_(std::move(samples)), labels_(std::move(labels)) {
    if (samples_.cols() == 0) throw InvalidArgument("LabeledDataset: no samples");
    if (static_cast<Index>(labels_.size()) != samples_.cols()) {
        throw InvalidArgument("LabeledDataset: " + std::to_string(labels_.size()) + " labels for " +
                              std::to_string(samples_.cols()) + " samples");
    }
    if (!samples_.allFinite()) throw InvalidArgument("LabeledDataset: non-finite sample entries");
    const std::size_t k = *std::max_element(labels_.begin(), labels_.end()) + 1;
    counts_.assign(k, 0);
    for (auto l : labels_) ++counts_[l];
    for (std::size_t c = 0; c < k; ++c) {
        if (counts_[c] == 0) {
            throw InvalidArgument("LabeledDataset: class " + std::to_string(c + 1) + " has no samples");
        }
    }
}

Matrix LabeledDataset::class_samples(std::size_t k) const {
    Matrix out(dim(), counts_.at(k));
    Index j = 0;
    for (Index i = 0; i < size(); ++i) {
        if (labels_[i] == k) out.col(j++) = samples_.col(i);
    }
    return out;
}

Matrix LabeledDataset::grouped_samples() const {
    Matrix out(dim(), size());
    Index j = 0;
    for (std::size_t k = 0; k < num_classes(); ++k) {
        for (Index i = 0; i < size(); ++i) {
            if (labels_[i] == k) out.col(j++) = samples_.col(i);
        }
    }
    return out;
}

LabeledDataset LabeledDataset::transformed(const Matrix& a) const {
    if (a.cols() != dim()) {
        throw InvalidArgument("LabeledDataset::transformed: transform expects " + std::to_string(a.cols()) +
                              " features, data has " + std::to_string(dim()));
    }
    return LabeledDataset(a * samples_, labels_);
}

LabeledDataset LabeledDataset::class_centered() const {
    Matrix centered = samples_;
    for (std::size_t k = 0; k < num_classes(); ++k) {
        const Vector mean = class_samples(k).rowwise().mean();
        for (Index i = 0; i < size(); ++i) {
            if (labels_[i] == k) centered.col(i) -= mean;
        }
    }
    return LabeledDataset(std::move(centered), labels_);
}

std::pair<Subspace, Subspace> case_subspaces(int case_id) {
    Matrix u1 = Matrix::Zero(4, 2);
    u1(0, 0) = 1.0;
    u1(1, 1) = 1.0;
    Matrix u2 = Matrix::Zero(4, 2);
    if (case_id == 1) {
        u2(0, 0) = 1.0;
        u2(2, 1) = 1.0;
    } else if (case_id == 2) {
        const double h = 1.0 / std::sqrt(2.0);
        u2(0, 0) = h;
        u2(3, 0) = -h;
        u2(1, 1) = h;
        u2(2, 1) = h;
    } else {
        throw InvalidArgument("case_subspaces: case id must be 1 or 2, got " + std::to_string(case_id));
    }
    return {Subspace(std::move(u1)), Subspace(std::move(u2))};
}

Subspace random_subspace(Index n, Index d, std::mt19937_64& rng) {
    if (d < 1 || d > n) throw InvalidArgument("random_subspace: need 1 <= d <= n");
    const Matrix g = standard_normal_matrix(rng, n, d);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n, d);
    linalg::canonicalize_column_signs(q);
    return Subspace(std::move(q));
}

LabeledDataset draw_gmm_dataset(const std::vector<GaussianClassModel>& models, Index count_per_class,
                                std::uint64_t seed) {
    if (models.empty()) throw InvalidArgument("draw_gmm_dataset: no models");
    if (count_per_class < 1) throw InvalidArgument("draw_gmm_dataset: count_per_class must be >= 1");
    const Index n = models.front().ambient_dim();
    Matrix x(n, count_per_class * static_cast<Index>(models.size()));
    std::vector<std::size_t> labels;
    labels.reserve(x.cols());
    std::mt19937_64 rng(mix_seed(seed));
    Index col = 0;
    for (std::size_t k = 0; k < models.size(); ++k) {
        for (Index j = 0; j < count_per_class; ++j) {
            sample_one(models[k], rng, x.col(col++));
            labels.push_back(k);
        }
    }
    return LabeledDataset(std::move(x), std::move(labels));
}

GeneratedGmm gen_gmm_classes(std::size_t num_classes, Index n, Index d, double sigma2, Index count_per_class,
                             std::uint64_t seed) {
    if (num_classes < 1) throw InvalidArgument("gen_gmm_classes: need at least one class");
    if (d < 1 || d > n) throw InvalidArgument("gen_gmm_classes: need 1 <= d <= n");
    std::mt19937_64 rng(mix_seed(seed));
    std::vector<GaussianClassModel> models;
    models.reserve(num_classes);
    for (std::size_t k = 0; k < num_classes; ++k) {
        models.push_back(GaussianClassModel::isotropic(random_subspace(n, d, rng), sigma2));
    }
    LabeledDataset ds = draw_gmm_dataset(models, count_per_class, mix_seed(seed + 1));
    return {std::move(models), std::move(ds)};
}

LabeledDataset draw_uniform_subspace_dataset(const std::vector<Subspace>& bases, double sigma,
                                             Index count_per_class, std::uint64_t seed) {
    if (bases.empty()) throw InvalidArgument("draw_uniform_subspace_dataset: no bases");
    if (count_per_class < 1) throw InvalidArgument("draw_uniform_subspace_dataset: count_per_class must be >= 1");
    if (!(sigma >= 0.0)) throw InvalidArgument("draw_uniform_subspace_dataset: sigma must be >= 0");
    const Index n = bases.front().ambient_dim();
    Matrix x(n, count_per_class * static_cast<Index>(bases.size()));
    std::vector<std::size_t> labels;
    labels.reserve(x.cols());
    std::mt19937_64 rng(mix_seed(seed));
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    Vector alpha;
    Vector noise(n);
    Index col = 0;
    for (std::size_t k = 0; k < bases.size(); ++k) {
        alpha.resize(bases[k].rank());
        for (Index j = 0; j < count_per_class; ++j) {
            for (Index i = 0; i < alpha.size(); ++i) alpha(i) = coef(rng);
            fill_standard_normal(rng, noise);
            x.col(col++) = bases[k].basis() * alpha + sigma * noise;
            labels.push_back(k);
        }
    }
    return LabeledDataset(std::move(x), std::move(labels));
}

GeneratedSubspaceData gen_uniform_subspace_data(std::size_t num_classes, Index n, Index d, double sigma,
                                                std::uint64_t seed, Index count_per_class) {
    if (num_classes < 1) throw InvalidArgument("gen_uniform_subspace_data: need at least one class");
    std::mt19937_64 rng(mix_seed(seed));
    std::vector<Subspace> bases;
    bases.reserve(num_classes);
    for (std::size_t k = 0; k < num_classes; ++k) bases.push_back(random_subspace(n, d, rng));
    LabeledDataset ds = draw_uniform_subspace_dataset(bases, sigma, count_per_class, mix_seed(seed + 1));
    return {std::move(bases), std::move(ds)};
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

LabeledDataset read_dataset_csv(std::istream& in) {
    std::vector<std::size_t> labels;
    std::vector<double> values;
    Index width = -1;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            fields.push_back(trim(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() < 2) throw ParseError("expected a label and at least one feature", line_no);

        long long label = 0;
        const auto lf = fields[0];
        const auto [lp, lec] = std::from_chars(lf.data(), lf.data() + lf.size(), label);
        if (lec != std::errc{} || lp != lf.data() + lf.size()) {
            throw ParseError("label '" + std::string(lf) + "' is not an integer", line_no);
        }
        if (label < 1) throw ParseError("label must be >= 1, got " + std::to_string(label), line_no);

        const Index row_width = static_cast<Index>(fields.size()) - 1;
        if (width < 0) {
            width = row_width;
        } else if (row_width != width) {
            throw ParseError("expected " + std::to_string(width) + " features, found " + std::to_string(row_width),
                             line_no);
        }
        for (std::size_t f = 1; f < fields.size(); ++f) {
            double v = 0.0;
            const auto tok = fields[f];
            const auto [vp, vec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (vec != std::errc{} || vp != tok.data() + tok.size() || !std::isfinite(v)) {
                throw ParseError("field " + std::to_string(f + 1) + " ('" + std::string(tok) +
                                     "') is not a finite decimal",
                                 line_no);
            }
            values.push_back(v);
        }
        labels.push_back(static_cast<std::size_t>(label - 1));
    }
    if (labels.empty()) throw ParseError("dataset is empty", 0);

    Matrix samples(width, static_cast<Index>(labels.size()));
    for (Index j = 0; j < samples.cols(); ++j)
        for (Index i = 0; i < width; ++i) samples(i, j) = values[static_cast<std::size_t>(j * width + i)];
    try {
        return LabeledDataset(std::move(samples), std::move(labels));
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), 0);
    }
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_dataset: cannot open " + path.string());
    return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const LabeledDataset& ds) {
    char buf[32];
    for (Index j = 0; j < ds.size(); ++j) {
        out << (ds.labels()[j] + 1);
        for (Index i = 0; i < ds.dim(); ++i) {
            const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), ds.samples()(i, j));
            (void)ec;
            out << ',' << std::string_view(buf, p - buf);
        }
        out << '\n';
    }
}

void save_dataset(const std::filesystem::path& path, const LabeledDataset& ds) {
    std::ofstream out(path);
    if (!out) throw Error("save_dataset: cannot open " + path.string());
    write_dataset_csv(out, ds);
    if (!out) throw Error("save_dataset: write failed for " + path.string());
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds, double train_fraction,
                                                std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw InvalidArgument("split: train_fraction must lie in (0, 1)");
    }
    std::mt19937_64 rng(mix_seed(seed));
    std::vector<Index> train_idx;
    std::vector<Index> test_idx;
    for (std::size_t k = 0; k < ds.num_classes(); ++k) {
        std::vector<Index> members;
        for (Index i = 0; i < ds.size(); ++i)
            if (ds.labels()[i] == k) members.push_back(i);
        const Index nk = static_cast<Index>(members.size());
        if (nk < 2) {
            throw InvalidArgument("split: class " + std::to_string(k + 1) +
                                  " has fewer than two samples and cannot appear on both sides");
        }
        std::shuffle(members.begin(), members.end(), rng);
        Index n_train = static_cast<Index>(std::llround(train_fraction * static_cast<double>(nk)));
        n_train = std::clamp<Index>(n_train, 1, nk - 1);
        std::sort(members.begin(), members.begin() + n_train);
        std::sort(members.begin() + n_train, members.end());
        train_idx.insert(train_idx.end(), members.begin(), members.begin() + n_train);
        test_idx.insert(test_idx.end(), members.begin() + n_train, members.end());
    }
    auto take = [&ds](std::vector<Index> idx) {
        std::sort(idx.begin(), idx.end());
        Matrix x(ds.dim(), static_cast<Index>(idx.size()));
        std::vector<std::size_t> labels(idx.size());
        for (std::size_t j = 0; j < idx.size(); ++j) {
            x.col(static_cast<Index>(j)) = ds.samples().col(idx[j]);
            labels[j] = ds.labels()[idx[j]];
        }
        return LabeledDataset(std::move(x), std::move(labels));
    };
    return {take(std::move(train_idx)), take(std::move(test_idx))};
}

}  // namespace pangle
