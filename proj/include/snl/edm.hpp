#pragma once

// Linear-operator calculus of the EDM map on n x n symmetric matrices.
//
//   delta(X)_ij        = (X_ii + X_jj - 2 X_ij) / 2
//   delta_adjoint(D)   = diag(D 1) - D
//   delta_star_delta   = I + psi         on centered matrices
//   its inverse        = I - gamma,      gamma(X) = J Diag(X) J
//
// The typed wrappers validate their invariants on construction; the
// functions in namespace kernel operate on raw matrices and are what the
// objective and solver use in their inner loops.

#include "snl/common.hpp"
#include "snl/configuration.hpp"

namespace snl {

/// Relative tolerance (times ||X||_F) for the symmetric, centered and hollow checks.
inline constexpr double kStructureTolerance = 1e-12;

class SymMatrix {
 public:
  /// Throws InvalidInput if `m` is not square or not symmetric within tolerance.
  /// The stored value is the exact symmetric part (m + m^T) / 2.
  explicit SymMatrix(const Matrix& m);

  Index n() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

 private:
  struct Trusted {};
  SymMatrix(Trusted, Matrix m) : m_(std::move(m)) {}
  Matrix m_;

  friend class CenteredSymmetric;
  friend class HollowSymmetric;
};

/// Symmetric matrix with X 1 = 0 (the set Cent(n)).
class CenteredSymmetric {
 public:
  explicit CenteredSymmetric(const Matrix& m);
  explicit CenteredSymmetric(SymMatrix base);
  /// Wraps a matrix known to be centered by construction; skips validation.
  static CenteredSymmetric assume_centered(Matrix m);

  Index n() const { return base_.n(); }
  const SymMatrix& base() const { return base_; }
  const Matrix& matrix() const { return base_.matrix(); }

 private:
  explicit CenteredSymmetric(SymMatrix base, bool validate);
  SymMatrix base_;
};

/// Symmetric matrix with zero diagonal (the set Hol(n)).
class HollowSymmetric {
 public:
  /// Throws InvalidInput on a diagonal entry above tolerance; the stored
  /// diagonal is exactly zero.
  explicit HollowSymmetric(const Matrix& m);
  explicit HollowSymmetric(SymMatrix base);
  static HollowSymmetric assume_hollow(Matrix m);

  Index n() const { return base_.n(); }
  const SymMatrix& base() const { return base_; }
  const Matrix& matrix() const { return base_.matrix(); }

 private:
  explicit HollowSymmetric(SymMatrix base, bool validate);
  SymMatrix base_;
};

Matrix centering_matrix(Index n);

/// delta on all of Sym(n). Its kernel is {1 v^T + v 1^T}.
HollowSymmetric delta(const SymMatrix& x);
/// delta restricted to Cent(n), where it is invertible.
HollowSymmetric delta(const CenteredSymmetric& x);

CenteredSymmetric delta_adjoint(const HollowSymmetric& d);

CenteredSymmetric delta_star_delta(const CenteredSymmetric& x);
CenteredSymmetric delta_star_delta_inv(const CenteredSymmetric& x);
CenteredSymmetric gamma(const CenteredSymmetric& x);
CenteredSymmetric psi(const CenteredSymmetric& x);

/// Orthogonal projection J X J onto Cent(n).
CenteredSymmetric project_centered(const SymMatrix& x);

/// Explicit inverse of delta : Cent(n) -> Hol(n).
CenteredSymmetric delta_inverse(const HollowSymmetric& d);
/// Explicit inverse of delta_adjoint : Hol(n) -> Cent(n), namely -X + Diag(X).
HollowSymmetric delta_adjoint_inverse(const CenteredSymmetric& x);

/// Subtracts the column means; pairwise distances are unchanged.
Configuration center(const Configuration& z);

/// Z Z^T.
SymMatrix gram(const Configuration& z);

namespace kernel {

Matrix delta(const Matrix& x);
Matrix delta_adjoint(const Matrix& d);
/// J Diag(X) J without forming J.
Matrix centered_diagonal(const Matrix& x);
Matrix delta_star_delta_centered(const Matrix& x);
Matrix center_columns(const Matrix& z);

}  // namespace kernel

}  // namespace snl
