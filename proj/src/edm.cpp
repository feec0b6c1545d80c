#include "snl/edm.hpp"

#include <cmath>

namespace snl {

namespace {

double structure_slack(const Matrix& m) { return kStructureTolerance * m.norm(); }

}  // namespace

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw InvalidInput("symmetric matrix must be square");
  }
  if (m.rows() < 1) {
    throw InvalidInput("symmetric matrix must have n >= 1");
  }
  if (!m.allFinite()) {
    throw InvalidInput("symmetric matrix has non-finite entries");
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > structure_slack(m)) {
    throw InvalidInput("matrix is not symmetric");
  }
  m_ = 0.5 * (m + m.transpose());
}

CenteredSymmetric::CenteredSymmetric(const Matrix& m) : CenteredSymmetric(SymMatrix(m), true) {}

CenteredSymmetric::CenteredSymmetric(SymMatrix base) : CenteredSymmetric(std::move(base), true) {}

CenteredSymmetric::CenteredSymmetric(SymMatrix base, bool validate) : base_(std::move(base)) {
  if (validate) {
    const Matrix& m = base_.matrix();
    if (m.rowwise().sum().cwiseAbs().maxCoeff() > structure_slack(m)) {
      throw InvalidInput("matrix is not centered (X 1 != 0)");
    }
  }
}

CenteredSymmetric CenteredSymmetric::assume_centered(Matrix m) {
  return CenteredSymmetric(SymMatrix(SymMatrix::Trusted{}, std::move(m)), false);
}

HollowSymmetric::HollowSymmetric(const Matrix& m) : HollowSymmetric(SymMatrix(m), true) {}

HollowSymmetric::HollowSymmetric(SymMatrix base) : HollowSymmetric(std::move(base), true) {}

HollowSymmetric::HollowSymmetric(SymMatrix base, bool validate) : base_(std::move(base)) {
  if (validate && base_.m_.diagonal().cwiseAbs().maxCoeff() > structure_slack(base_.m_)) {
    throw InvalidInput("matrix is not hollow (nonzero diagonal)");
  }
  base_.m_.diagonal().setZero();
}

HollowSymmetric HollowSymmetric::assume_hollow(Matrix m) {
  return HollowSymmetric(SymMatrix(SymMatrix::Trusted{}, std::move(m)), false);
}

Matrix centering_matrix(Index n) {
  return Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
}

namespace kernel {

Matrix delta(const Matrix& x) {
  const Index n = x.rows();
  const Vector d = x.diagonal();
  Matrix out(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      out(i, j) = 0.5 * (d(i) + d(j)) - x(i, j);
    }
    out(j, j) = 0.0;
  }
  return out;
}

Matrix delta_adjoint(const Matrix& d) {
  Matrix out = -d;
  out.diagonal() += d.rowwise().sum();
  return out;
}

Matrix centered_diagonal(const Matrix& x) {
  // J D J = D - (d 1^T + 1 d^T) / n + (sum d / n^2) 1 1^T
  const Index n = x.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  const Vector d = x.diagonal();
  const double mean = d.sum() * inv_n;
  Matrix out(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      out(i, j) = mean * inv_n - (d(i) + d(j)) * inv_n;
    }
    out(j, j) += d(j);
  }
  return out;
}

Matrix delta_star_delta_centered(const Matrix& x) {
  const Index n = x.rows();
  const double half_n = 0.5 * static_cast<double>(n);
  return x + half_n * centered_diagonal(x) + (0.5 * x.trace()) * centering_matrix(n);
}

Matrix center_columns(const Matrix& z) {
  return z.rowwise() - z.colwise().mean();
}

}  // namespace kernel

HollowSymmetric delta(const SymMatrix& x) { return HollowSymmetric::assume_hollow(kernel::delta(x.matrix())); }

HollowSymmetric delta(const CenteredSymmetric& x) { return delta(x.base()); }

CenteredSymmetric delta_adjoint(const HollowSymmetric& d) {
  return CenteredSymmetric::assume_centered(kernel::delta_adjoint(d.matrix()));
}

CenteredSymmetric delta_star_delta(const CenteredSymmetric& x) {
  return CenteredSymmetric::assume_centered(kernel::delta_star_delta_centered(x.matrix()));
}

CenteredSymmetric delta_star_delta_inv(const CenteredSymmetric& x) {
  return CenteredSymmetric::assume_centered(x.matrix() - kernel::centered_diagonal(x.matrix()));
}

CenteredSymmetric gamma(const CenteredSymmetric& x) {
  return CenteredSymmetric::assume_centered(kernel::centered_diagonal(x.matrix()));
}

CenteredSymmetric psi(const CenteredSymmetric& x) {
  const Index n = x.n();
  const Matrix& m = x.matrix();
  return CenteredSymmetric::assume_centered(0.5 * static_cast<double>(n) * kernel::centered_diagonal(m) +
                                            (0.5 * m.trace()) * centering_matrix(n));
}

CenteredSymmetric project_centered(const SymMatrix& x) {
  const Matrix j = centering_matrix(x.n());
  return CenteredSymmetric::assume_centered(j * x.matrix() * j);
}

CenteredSymmetric delta_inverse(const HollowSymmetric& d) {
  const Index n = d.n();
  const double inv_n = 1.0 / static_cast<double>(n);
  const Matrix& h = d.matrix();
  const Vector row = h.rowwise().sum();  // H 1
  const double total = row.sum();          // 1^T H 1
  Matrix out = -h;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      out(i, j) += (row(i) + row(j)) * inv_n - total * inv_n * inv_n;
    }
  }
  return CenteredSymmetric::assume_centered(std::move(out));
}

HollowSymmetric delta_adjoint_inverse(const CenteredSymmetric& x) {
  Matrix out = -x.matrix();
  out.diagonal().setZero();
  return HollowSymmetric::assume_hollow(std::move(out));
}

Configuration center(const Configuration& z) { return Configuration(kernel::center_columns(z.points())); }

SymMatrix gram(const Configuration& z) { return SymMatrix(z.points() * z.points().transpose()); }

}  // namespace snl
