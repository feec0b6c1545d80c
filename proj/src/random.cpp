#include "snl/random.hpp"

#include "snl/edm.hpp"

namespace snl {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t a) { return splitmix64(splitmix64(seed) ^ a); }

std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b) { return mix(mix(seed, a), b); }

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  // Row-major fill so the stream order does not depend on Eigen's storage.
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = normal(rng);
    }
  }
  return m;
}

Matrix random_centered_psd(Index n, Rng& rng) {
  if (n < 2) {
    return Matrix::Zero(n, n);
  }
  std::uniform_int_distribution<Index> rank(1, n - 1);
  return random_centered_psd(n, rank(rng), rng);
}

Matrix random_centered_psd(Index n, Index r, Rng& rng) {
  const Matrix g = kernel::center_columns(gaussian_matrix(n, r, rng));  // J G
  return g * g.transpose();
}

Matrix random_centered_symmetric(Index n, Rng& rng) {
  const Matrix g = gaussian_matrix(n, n, rng);
  const Matrix s = 0.5 * (g + g.transpose());
  const Matrix j = centering_matrix(n);
  return j * s * j;
}

}  // namespace snl
