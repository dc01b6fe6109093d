#pragma once

#include <cstddef>
#include <random>
#include <vector>

namespace abcfs {

/// The single generator type used everywhere a seed is accepted.
using Rng = std::mt19937_64;

/// k distinct elements of `pool`, uniformly chosen (partial Fisher-Yates).
std::vector<std::size_t> sample_without_replacement(std::vector<std::size_t> pool, std::size_t k, Rng& rng);

}  // namespace abcfs
