#include "snl/objective.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

#include "snl/edm.hpp"

namespace snl {

MeasurementGraph::MeasurementGraph(Index n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n < 1) {
    throw InvalidInput("measurement graph needs n >= 1");
  }
  std::set<std::pair<Index, Index>> seen;
  for (auto& e : edges_) {
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) {
      throw InvalidInput("edge endpoint out of range");
    }
    if (e.i == e.j) {
      throw InvalidInput("measurement graph cannot contain self-loops");
    }
    if (!std::isfinite(e.target)) {
      throw InvalidInput("edge target must be finite");
    }
    if (e.i > e.j) {
      std::swap(e.i, e.j);
    }
    if (!seen.emplace(e.i, e.j).second) {
      throw InvalidInput("duplicate edge in measurement graph");
    }
  }
}

MeasurementGraph MeasurementGraph::complete(const Configuration& y) {
  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = 0; i < y.n(); ++i) {
    for (Index j = i + 1; j < y.n(); ++j) {
      pairs.emplace_back(i, j);
    }
  }
  return from_pairs(pairs, y);
}

MeasurementGraph MeasurementGraph::from_pairs(const std::vector<std::pair<Index, Index>>& pairs,
                                              const Configuration& y) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    if (i < 0 || j < 0 || i >= y.n() || j >= y.n()) {
      throw InvalidInput("edge endpoint out of range");
    }
    edges.push_back({i, j, (y.points().row(i) - y.points().row(j)).squaredNorm()});
  }
  return MeasurementGraph(y.n(), std::move(edges));
}

bool MeasurementGraph::is_complete() const {
  return static_cast<Index>(edges_.size()) == n_ * (n_ - 1) / 2;
}

double cost_scale(const Configuration& y) {
  const double f2 = y.points().squaredNorm();
  return 1.0 + f2 * f2;
}

namespace {

// C M for C = (delta* o delta)(A), A = Zc Zc^T - Yc Yc^T, using the closed
// form A + (n/2) J Diag(A) J + tr(A)/2 J valid on centered matrices.
struct CompletePoint {
  Matrix zc;
  const Matrix* yc = nullptr;
  Vector diag_a;
  double trace_a = 0.0;

  CompletePoint(const Matrix& z, const Matrix& y_centered)
      : zc(kernel::center_columns(z)), yc(&y_centered) {
    diag_a = zc.rowwise().squaredNorm() - yc->rowwise().squaredNorm();
    trace_a = diag_a.sum();
  }

  Matrix apply_c(const Matrix& m) const {
    const Matrix mc = kernel::center_columns(m);
    const double half_n = 0.5 * static_cast<double>(zc.rows());
    Matrix out = zc * (zc.transpose() * mc) - (*yc) * (yc->transpose() * mc);
    out += half_n * kernel::center_columns(diag_a.asDiagonal() * mc);
    out += (0.5 * trace_a) * mc;
    return out;
  }

  // (delta* o delta)(Zc Wc^T + Wc Zc^T) Zc
  Matrix apply_b_to_z(const Matrix& wc) const {
    const double half_n = 0.5 * static_cast<double>(zc.rows());
    const Vector diag_b = 2.0 * (zc.array() * wc.array()).rowwise().sum().matrix();
    Matrix out = zc * (wc.transpose() * zc) + wc * (zc.transpose() * zc);
    out += half_n * kernel::center_columns(diag_b.asDiagonal() * zc);
    out += (0.5 * diag_b.sum()) * zc;
    return out;
  }

  Matrix gradient() const { return 4.0 * apply_c(zc); }

  Matrix hess_vec(const Matrix& zdot) const {
    const Matrix wc = kernel::center_columns(zdot);
    return 4.0 * (apply_b_to_z(wc) + apply_c(wc));
  }
};

// Per-edge evaluation on the transposed k x n layout so that each point is a
// contiguous column. u_e = z_i - z_j is cached for the Hessian.
struct MaskedPoint {
  const std::vector<Edge>* edges = nullptr;
  Index n = 0;
  Index k = 0;
  Matrix diffs;  // k x |E|
  Vector residual;

  MaskedPoint(const Matrix& z, const std::vector<Edge>& ee) : edges(&ee), n(z.rows()), k(z.cols()) {
    const Matrix zt = z.transpose();
    const Index m = static_cast<Index>(ee.size());
    diffs.resize(k, m);
    residual.resize(m);
    for (Index e = 0; e < m; ++e) {
      const auto& ed = ee[static_cast<std::size_t>(e)];
      diffs.col(e) = zt.col(ed.i) - zt.col(ed.j);
      residual(e) = diffs.col(e).squaredNorm() - ed.target;
    }
  }

  Matrix gradient() const {
    Matrix gt = Matrix::Zero(k, n);
    for (Index e = 0; e < residual.size(); ++e) {
      const auto& ed = (*edges)[static_cast<std::size_t>(e)];
      const double w = 2.0 * residual(e);
      gt.col(ed.i) += w * diffs.col(e);
      gt.col(ed.j) -= w * diffs.col(e);
    }
    return gt.transpose();
  }

  Matrix hess_vec(const Matrix& zdot) const {
    const Matrix dt = zdot.transpose();
    Matrix ht = Matrix::Zero(k, n);
    for (Index e = 0; e < residual.size(); ++e) {
      const auto& ed = (*edges)[static_cast<std::size_t>(e)];
      const auto u = diffs.col(e);
      const auto du = dt.col(ed.i) - dt.col(ed.j);
      const double a = 4.0 * u.dot(du);
      const double b = 2.0 * residual(e);
      for (Index c = 0; c < k; ++c) {
        const double t = a * u(c) + b * (dt(c, ed.i) - dt(c, ed.j));
        ht(c, ed.i) += t;
        ht(c, ed.j) -= t;
      }
    }
    return ht.transpose();
  }
};

}  // namespace

Objective Objective::complete(Configuration ground_truth) {
  Objective obj;
  obj.kind_ = Kind::complete;
  obj.n_ = ground_truth.n();
  obj.scale_ = cost_scale(ground_truth);
  obj.y_centered_ = kernel::center_columns(ground_truth.points());
  const Matrix& y = ground_truth.points();
  obj.target_sq_dist_.resize(obj.n_, obj.n_);
  for (Index j = 0; j < obj.n_; ++j) {
    for (Index i = 0; i < obj.n_; ++i) {
      obj.target_sq_dist_(i, j) = (y.row(i) - y.row(j)).squaredNorm();
    }
  }
  obj.ground_truth_ = std::move(ground_truth);
  return obj;
}

Objective Objective::masked(MeasurementGraph graph, std::optional<double> scale) {
  Objective obj;
  obj.kind_ = Kind::masked;
  obj.n_ = graph.n();
  if (scale) {
    if (!(*scale > 0.0) || !std::isfinite(*scale)) {
      throw InvalidInput("objective scale must be positive");
    }
    obj.scale_ = *scale;
  } else {
    double total = 0.0;
    for (const auto& e : graph.edges()) {
      total += std::abs(e.target);
    }
    const double per_point = total / static_cast<double>(graph.n());
    obj.scale_ = 1.0 + per_point * per_point;
  }
  obj.graph_ = std::move(graph);
  return obj;
}

const Configuration& Objective::ground_truth() const {
  if (kind_ != Kind::complete) {
    throw InvalidInput("masked objective has no ground-truth configuration");
  }
  return ground_truth_;
}

const MeasurementGraph& Objective::graph() const {
  if (kind_ != Kind::masked) {
    throw InvalidInput("complete objective has no explicit measurement graph");
  }
  return graph_;
}

void Objective::check_shape(const Matrix& z) const {
  if (z.rows() != n_ || z.cols() < 1) {
    throw InvalidInput("configuration has " + std::to_string(z.rows()) + " points, objective expects " +
                       std::to_string(n_));
  }
}

double Objective::cost(const Matrix& z) const {
  check_shape(z);
  if (kind_ == Kind::complete) {
    const Matrix zc = kernel::center_columns(z);
    const Matrix g = zc * zc.transpose();
    const Vector sq = g.diagonal();
    double total = 0.0;
    for (Index j = 0; j < n_; ++j) {
      for (Index i = j + 1; i < n_; ++i) {
        const double r = sq(i) + sq(j) - 2.0 * g(i, j) - target_sq_dist_(i, j);
        total += r * r;
      }
    }
    return 0.5 * total;
  }
  const MaskedPoint p(z, graph_.edges());
  return 0.5 * p.residual.squaredNorm();
}

double Objective::cost_decrease(const Matrix& z, const Matrix& step) const {
  check_shape(z);
  if (step.rows() != z.rows() || step.cols() != z.cols()) {
    throw InvalidInput("step shape differs from the configuration");
  }
  const Matrix zt = z.transpose();
  const Matrix st = step.transpose();
  // With r the residual and delta its change, the decrease is -sum delta (2 r + delta) / 2.
  auto term = [&](Index i, Index j, double target) {
    const auto dz = zt.col(i) - zt.col(j);
    const auto ds = st.col(i) - st.col(j);
    const double r = dz.squaredNorm() - target;
    const double delta = 2.0 * dz.dot(ds) + ds.squaredNorm();
    return delta * (2.0 * r + delta);
  };
  double total = 0.0;
  if (kind_ == Kind::complete) {
    for (Index j = 0; j < n_; ++j) {
      for (Index i = j + 1; i < n_; ++i) {
        total += term(i, j, target_sq_dist_(i, j));
      }
    }
  } else {
    for (const auto& e : graph_.edges()) {
      total += term(e.i, e.j, e.target);
    }
  }
  return -0.5 * total;
}

Matrix Objective::gradient(const Matrix& z) const {
  check_shape(z);
  if (kind_ == Kind::complete) {
    return CompletePoint(z, y_centered_).gradient();
  }
  return MaskedPoint(z, graph_.edges()).gradient();
}

Matrix Objective::hess_vec(const Matrix& z, const Matrix& zdot) const {
  check_shape(z);
  if (zdot.rows() != z.rows() || zdot.cols() != z.cols()) {
    throw InvalidInput("hess_vec direction shape differs from the configuration");
  }
  return hessian_at(z)(zdot);
}

HessianOperator Objective::hessian_at(const Matrix& z) const {
  check_shape(z);
  const Index rows = z.rows();
  const Index cols = z.cols();
  auto guard = [rows, cols](const Matrix& zdot) {
    if (zdot.rows() != rows || zdot.cols() != cols) {
      throw InvalidInput("hess_vec direction shape differs from the configuration");
    }
  };
  if (kind_ == Kind::complete) {
    auto point = std::make_shared<CompletePoint>(z, y_centered_);
    return [point, guard](const Matrix& zdot) {
      guard(zdot);
      return point->hess_vec(zdot);
    };
  }
  auto point = std::make_shared<MaskedPoint>(z, graph_.edges());
  return [point, guard](const Matrix& zdot) {
    guard(zdot);
    return point->hess_vec(zdot);
  };
}

Matrix Objective::certificate(const Matrix& z) const {
  check_shape(z);
  if (kind_ != Kind::complete) {
    throw InvalidInput("certificate matrix is defined for the complete objective");
  }
  const Matrix zc = kernel::center_columns(z);
  const Matrix a = zc * zc.transpose() - y_centered_ * y_centered_.transpose();
  return kernel::delta_star_delta_centered(a);
}

double cost_masked(const Configuration& z, const MeasurementGraph& g) {
  if (z.n() != g.n()) {
    throw InvalidInput("cost_masked: configuration and graph sizes differ");
  }
  return Objective::masked(g, 1.0).cost(z.points());
}

double cost_complete(const Configuration& z, const Configuration& y) {
  if (z.n() != y.n()) {
    throw InvalidInput("cost_complete: configuration sizes differ");
  }
  return Objective::complete(y).cost(z.points());
}

Matrix gradient(const Configuration& z, const Objective& instance) { return instance.gradient(z.points()); }

Matrix hess_vec(const Configuration& z, const Matrix& zdot, const Objective& instance) {
  return instance.hess_vec(z.points(), zdot);
}

SymmetryBasis symmetry_basis(const Configuration& z) {
  const Index n = z.n();
  const Index k = z.k();
  SymmetryBasis out;
  out.expected_dim = k * (k + 1) / 2;

  std::vector<Matrix> generators;
  for (Index a = 0; a < k; ++a) {
    Matrix t = Matrix::Zero(n, k);
    t.col(a).setOnes();
    generators.push_back(std::move(t));
  }
  for (Index a = 0; a < k; ++a) {
    for (Index b = a + 1; b < k; ++b) {
      Matrix r = Matrix::Zero(n, k);  // Z (e_a e_b^T - e_b e_a^T)
      r.col(b) = z.points().col(a);
      r.col(a) = -z.points().col(b);
      generators.push_back(std::move(r));
    }
  }

  const double floor = 1e-12 * (1.0 + z.points().norm());
  for (auto& g : generators) {
    const double original = g.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& e : out.elements) {
        g -= frobenius_inner(e, g) * e;
      }
    }
    const double remaining = g.norm();
    if (remaining <= 1e-9 * original || remaining <= floor) {
      continue;
    }
    out.elements.push_back(g / remaining);
  }
  out.rank_deficient = static_cast<Index>(out.elements.size()) < out.expected_dim;
  return out;
}

}  // namespace snl
