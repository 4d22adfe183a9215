#include "pangle/random.hpp"

namespace pangle {

std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(mix_seed(seed ^ index));
}

void fill_standard_normal(std::mt19937_64& rng, Eigen::Ref<Vector> out) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index i = 0; i < out.size(); ++i) out(i) = normal(rng);
}

Matrix standard_normal_matrix(std::mt19937_64& rng, Index rows, Index cols) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    // column-major fill, fixed order
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
    return m;
}

}  // namespace pangle
