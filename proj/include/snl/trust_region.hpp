#pragma once

// Trust-region minimization with a Steihaug-Toint truncated CG inner solver.
// Everything is driven by cost / gradient / Hessian-operator callbacks on
// n x k matrices with the Frobenius inner product.

#include <functional>
#include <string>

#include "snl/common.hpp"
#include "snl/configuration.hpp"
#include "snl/objective.hpp"

namespace snl {

struct SolverOptions {
  double grad_tol = 1e-12;  // relative to the problem scale
  int max_iters = 10000;
  double initial_radius = 1.0;
  double max_radius = 1e6;
  double acceptance_threshold = 0.1;  // rho' in (0, 1/4]
  int tcg_max_inner = 1000;
  double tcg_kappa = 0.1;
  double tcg_theta = 1.0;
  int max_consecutive_rejections = 50;
  double time_limit_seconds = 0.0;  // <= 0: unlimited

  /// Throws InvalidInput on inconsistent settings.
  void validate() const;
};

enum class SolveStatus { converged, max_iters, stalled };

std::string to_string(SolveStatus s);

struct SolveResult {
  Matrix z_final;
  double final_cost = 0.0;
  double final_grad_norm = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::max_iters;
  long hess_vec_count = 0;
  bool time_limit_hit = false;
};

struct Problem {
  std::function<double(const Matrix&)> cost;
  std::function<Matrix(const Matrix&)> gradient;
  std::function<HessianOperator(const Matrix&)> hessian_at;
  /// Optional: cost(z) - cost(z + step) evaluated without cancellation. When
  /// present it decides acceptance, so steps whose decrease is below the
  /// round-off of cost() are still judged correctly.
  std::function<double(const Matrix&, const Matrix&)> decrease;
  double scale = 1.0;
};

Problem make_problem(const Objective& objective);

/// Deterministic given (z0, problem, opts). The accepted cost sequence is
/// non-increasing. Throws NumericalFailure when a cost or gradient is not finite.
SolveResult minimize(const Matrix& z0, const Problem& problem, const SolverOptions& opts = {});
SolveResult minimize(const Configuration& z0, const Objective& objective, const SolverOptions& opts = {});

}  // namespace snl
