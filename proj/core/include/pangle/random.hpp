#pragma once

#include <cstdint>
#include <random>

#include "pangle/linalg.hpp"

namespace pangle {

/// splitmix64 finalizer; used to decorrelate derived stream seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

/// Engine for Monte Carlo trial `index` under base seed `seed`.
/// The stream depends only on seed ^ index, so trial outcomes do not depend
/// on the order in which trials are executed.
std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t index);

/// Fill with i.i.d. standard normal draws.
void fill_standard_normal(std::mt19937_64& rng, Eigen::Ref<Vector> out);
Matrix standard_normal_matrix(std::mt19937_64& rng, Index rows, Index cols);

}  // namespace pangle
