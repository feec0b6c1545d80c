#pragma once

// Deterministic random streams. Every trial owns an mt19937_64 seeded from
// mix(base_seed, cell, trial); sub-streams are split off with further mixing.

#include <cstdint>
#include <random>

#include "snl/common.hpp"

namespace snl {

/// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Order-sensitive combination of a seed with one or two counters.
std::uint64_t mix(std::uint64_t seed, std::uint64_t a);
std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

using Rng = std::mt19937_64;

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng);

/// (J G)(J G)^T with G an n x r standard Gaussian matrix, r uniform in {1..n-1}.
Matrix random_centered_psd(Index n, Rng& rng);
/// Same with a fixed rank r.
Matrix random_centered_psd(Index n, Index r, Rng& rng);

/// J (G + G^T) J / 2, a generic element of Cent(n).
Matrix random_centered_symmetric(Index n, Rng& rng);

}  // namespace snl
