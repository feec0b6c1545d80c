#pragma once

// The SNL cost in two forms.
//
//   complete:  g(Z) = || delta(Z Z^T - Y Y^T) ||_F^2
//   masked:    g(Z) = 1/2 sum_{ {i,j} in E } (||z_i - z_j||^2 - d_ij^2)^2
//
// On the complete graph with targets taken from Y the two agree exactly: the
// Frobenius sum visits every unordered pair twice with entries halved, so the
// factor 1/4 * 2 = 1/2 matches the masked weight.
//
// Derivatives are the exact derivatives of these costs. The complete form
// evaluates them through the delta_star_delta formula,
//     grad g(Z) = 4 C Z,  C = (delta* o delta)(Z Z^T - Y Y^T),
// i.e. four times the textbook expression, which drops the constant; the
// masked form uses the per-edge chain rule.

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "snl/common.hpp"
#include "snl/configuration.hpp"

namespace snl {

struct Edge {
  Index i = 0;
  Index j = 0;
  double target = 0.0;  // squared distance; any real after noise corruption
};

class MeasurementGraph {
 public:
  MeasurementGraph() = default;
  /// Throws InvalidInput on self-loops, out-of-range vertices or duplicate edges.
  MeasurementGraph(Index n, std::vector<Edge> edges);

  /// All pairs i < j with targets ||y_i - y_j||^2.
  static MeasurementGraph complete(const Configuration& y);
  static MeasurementGraph from_pairs(const std::vector<std::pair<Index, Index>>& pairs, const Configuration& y);

  Index n() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t num_edges() const { return edges_.size(); }
  bool is_complete() const;

 private:
  Index n_ = 0;
  std::vector<Edge> edges_;
};

/// Tolerance scale 1 + ||Y||_F^4 ; the objective is degree four in the data.
double cost_scale(const Configuration& y);

using HessianOperator = std::function<Matrix(const Matrix&)>;

class Objective {
 public:
  enum class Kind { complete, masked };

  static Objective complete(Configuration ground_truth);
  /// `scale` defaults to 1 + (sum of |targets| / n)^2, the complete-graph
  /// value of 1 + ||J Y||_F^4 when the targets are exact.
  static Objective masked(MeasurementGraph graph, std::optional<double> scale = std::nullopt);

  Kind kind() const { return kind_; }
  Index n() const { return n_; }
  double scale() const { return scale_; }
  /// Ground truth of a complete objective; throws InvalidInput for masked ones.
  const Configuration& ground_truth() const;
  const MeasurementGraph& graph() const;

  double cost(const Matrix& z) const;
  Matrix gradient(const Matrix& z) const;
  Matrix hess_vec(const Matrix& z, const Matrix& zdot) const;
  /// cost(z) - cost(z + step), from the per-pair changes of squared distance
  /// so that tiny decreases are not lost to cancellation.
  double cost_decrease(const Matrix& z, const Matrix& step) const;
  /// Hessian at a fixed point, with per-point work done once. The returned
  /// operator refers to this objective and must not outlive it.
  HessianOperator hessian_at(const Matrix& z) const;

  /// For the complete form: C = (delta* o delta)(Z Z^T - Y Y^T).
  Matrix certificate(const Matrix& z) const;

 private:
  Objective() = default;
  void check_shape(const Matrix& z) const;

  Kind kind_ = Kind::complete;
  Index n_ = 0;
  double scale_ = 1.0;
  Configuration ground_truth_;
  Matrix y_centered_;
  Matrix target_sq_dist_;  // complete form: ||y_i - y_j||^2
  MeasurementGraph graph_;
};

double cost_masked(const Configuration& z, const MeasurementGraph& g);
double cost_complete(const Configuration& z, const Configuration& y);
Matrix gradient(const Configuration& z, const Objective& instance);
Matrix hess_vec(const Configuration& z, const Matrix& zdot, const Objective& instance);

struct SymmetryBasis {
  std::vector<Matrix> elements;  // orthonormal in the Frobenius inner product
  Index expected_dim = 0;        // k (k + 1) / 2
  bool rank_deficient = false;   // true when fewer than expected_dim survive
};

/// Orthonormal basis of span{1 v^T} + span{Z Omega : Omega skew}.
SymmetryBasis symmetry_basis(const Configuration& z);

}  // namespace snl
