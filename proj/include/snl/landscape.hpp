#pragma once

// Spurious configurations built by reflecting one point across a hyperplane,
// the named presets, Hessian-based criticality certification, and rigid
// alignment against a ground truth.

#include <string>
#include <vector>

#include "snl/common.hpp"
#include "snl/configuration.hpp"
#include "snl/objective.hpp"

namespace snl {

enum class ConditionResult { strict, non_strict, fails };

std::string to_string(ConditionResult c);

struct ReflectionConstruction {
  Matrix hyperplane_points;  // (n-2) x dg, all in the hyperplane L
  Vector apex;               // z*_{n-1}, off L
  Vector reflected;          // z*_n, the mirror image of the apex across L
  Configuration y;           // ground truth: hyperplane points, apex, reflected
  Configuration z;           // same, with the last row replaced by the apex

  // sum_i (z_i* - apex)(z_i* - apex)^T compared against alpha I,
  // alpha = ||apex - reflected||^2.
  Matrix condition_matrix;
  double alpha = 0.0;
  double condition_margin = 0.0;  // lambda_min(condition_matrix) - alpha
  ConditionResult condition = ConditionResult::fails;
};

/// Throws InvalidInput when the points do not lie in a common hyperplane, do
/// not determine it uniquely, or the apex is within 1e-9 of it.
ReflectionConstruction build_reflection_example(const Matrix& hyperplane_points, const Vector& apex);

/// Evaluates the hyperplane condition for an already assembled (y, z) pair
/// whose last two rows follow the reflection layout.
void evaluate_condition(ReflectionConstruction& rc);

enum class Verdict { not_1_critical, not_2_critical, non_strict_2_critical, strict_2_critical };

std::string to_string(Verdict v);

struct Preset {
  std::string name;
  ReflectionConstruction construction;
  Verdict claimed;  // what the construction is asserted to be
};

/// Names: "planar7", "simplex<dg>" or "simplex(dg)" with dg >= 4,
/// "mixed7-<dg>" or "mixed7(dg)" with dg in {3, 4}.
Preset preset(const std::string& name);
Preset planar7();
Preset simplex(Index dg);
Preset mixed7(Index dg);
std::vector<std::string> preset_names();

struct CertifyOptions {
  double grad_tol = 1e-9;     // times the objective scale
  double kernel_tol = 1e-8;   // times max |eigenvalue|
  double strict_tol = 1e-8;   // times max |eigenvalue|
  Index max_dimension = 4000;
};

struct CriticalityReport {
  double grad_norm = 0.0;
  double scale = 1.0;
  Vector hessian_spectrum;  // ascending; empty when not 1-critical
  Index symmetry_kernel_dim = 0;  // k (k + 1) / 2
  Index symmetry_basis_dim = 0;   // what symmetry_basis actually produced
  Index observed_kernel_dim = 0;
  double min_eig_on_complement = 0.0;
  double kernel_threshold = 0.0;
  Verdict verdict = Verdict::not_1_critical;
};

/// Dense certification; throws UnsupportedSize when n k > max_dimension.
CriticalityReport certify(const Configuration& z, const Objective& instance, const CertifyOptions& opts = {});

/// Full nk x nk Hessian in column-major vec(Z) coordinates.
Matrix assemble_hessian(const Matrix& z, const Objective& instance);

std::string format_report(const CriticalityReport& r);

struct Alignment {
  double distance = 0.0;
  Configuration aligned;  // in Y's coordinates, including Y's centroid
};

/// Centered Z expressed in its top-d principal directions (zero columns
/// appended when the rank is below d).
Matrix principal_projection(const Matrix& z, Index d);

/// Rigid alignment after projection to dimension Y.k(); throws InvalidInput when Z.k() < Y.k().
Alignment align(const Configuration& z, const Configuration& y);

/// R = Y^T Z (Z^T Z)^{-1}; throws InvalidInput when Z is column-rank deficient.
Matrix best_linear_map(const Configuration& z, const Configuration& y);

}  // namespace snl
