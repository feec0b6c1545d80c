#pragma once

#include <functional>
#include <random>

#include "snl/common.hpp"

namespace snl::test {

inline Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = nd(rng);
    }
  }
  return m;
}

inline Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

inline Matrix jmat(Index n) {
  return Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
}

inline Matrix random_centered(Index n, std::uint64_t seed) {
  const Matrix j = jmat(n);
  return j * sym(gaussian(n, n, seed)) * j;
}

// Squared-distance matrix by explicit double loop.
inline Matrix sq_dist(const Matrix& z) {
  Matrix d(z.rows(), z.rows());
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index j = 0; j < z.rows(); ++j) {
      double s = 0.0;
      for (Index c = 0; c < z.cols(); ++c) {
        const double t = z(i, c) - z(j, c);
        s += t * t;
      }
      d(i, j) = s;
    }
  }
  return d;
}

// Central difference of a scalar function along direction v.
inline double directional_fd(const std::function<double(const Matrix&)>& f, const Matrix& x, const Matrix& v,
                             double h) {
  return (f(x + h * v) - f(x - h * v)) / (2.0 * h);
}

inline Matrix gradient_fd(const std::function<Matrix(const Matrix&)>& g, const Matrix& x, const Matrix& v,
                          double h) {
  return (g(x + h * v) - g(x - h * v)) / (2.0 * h);
}

// Orthonormal basis of Cent(n) built by Gram-Schmidt on the J (E_ij + E_ji) J,
// independent of the library's own basis construction.
inline std::vector<Matrix> gram_schmidt_cent_basis(Index n) {
  std::vector<Matrix> basis;
  const Matrix j = jmat(n);
  for (Index a = 0; a < n; ++a) {
    for (Index b = a; b < n; ++b) {
      Matrix e = Matrix::Zero(n, n);
      e(a, b) += 1.0;
      e(b, a) += 1.0;
      Matrix v = j * e * j;
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : basis) {
          v -= frobenius_inner(q, v) * q;
        }
      }
      if (v.norm() > 1e-8) {
        basis.push_back(v / v.norm());
      }
    }
  }
  return basis;
}

inline Matrix matrix_in_basis(const std::vector<Matrix>& basis, const std::function<Matrix(const Matrix&)>& op) {
  const Index d = static_cast<Index>(basis.size());
  Matrix m(d, d);
  for (Index c = 0; c < d; ++c) {
    const Matrix image = op(basis[static_cast<std::size_t>(c)]);
    for (Index r = 0; r < d; ++r) {
      m(r, c) = frobenius_inner(basis[static_cast<std::size_t>(r)], image);
    }
  }
  return m;
}

}  // namespace snl::test
