#pragma once

// Numerical validators for the operator properties and landscape results:
// the contraction properties of Gamma, the second-order inequality at
// critical points, the RIP witnesses, the certificate matrices C, S, P, and
// the two sufficient conditions on the relaxation rank k.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "snl/common.hpp"
#include "snl/configuration.hpp"
#include "snl/landscape.hpp"
#include "snl/objective.hpp"

namespace snl {

struct PropertyReport {
  std::string id;
  int trials = 0;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  // Smallest observed slack of a strict inequality (P2, lemma3.2), or the
  // estimated constant for Q4. NaN when not applicable.
  double margin = 0.0;
  std::string note;
};

std::string format_report(const PropertyReport& r);

/// Orthonormal basis of Cent(n) in the Frobenius inner product, n (n - 1) / 2 elements.
std::vector<Matrix> cent_basis(Index n);

/// Matrix of a linear map Cent(n) -> Cent(n) in the basis cent_basis(n).
Matrix operator_matrix(Index n, const std::function<Matrix(const Matrix&)>& op);

struct ContractionSample {
  double p1 = 0.0;  // lambda_min(Gamma(X))
  double p2 = 0.0;  // lambda_max(X) - lambda_max(Gamma(X))
  double p3 = 0.0;  // tr X - tr Gamma(X)
  double p4 = 0.0;  // lambda_min((n/2) Gamma(X) + tr(X)/2 J - Psi(X))
};

/// Slacks of P1..P4 at one centered matrix; all are >= 0 when the property holds.
ContractionSample contraction_slacks(const Matrix& x);

/// |lhs - rhs| / max(|lhs|, |rhs|) for ||Delta(u w^T + w u^T)||^2 = 4 <Delta(u u^T), Delta(w w^T)>.
double p5_relative_gap(const Vector& u, const Vector& w);

/// Reports P1..P5, lemma3.2 and strong-convexity. Sample t uses the stream mix(seed, t).
std::vector<PropertyReport> check_P1_to_P5(Index n, int trials, std::uint64_t seed);

/// Requires a 2-critical verdict from certify (PreconditionError otherwise)
/// and a complete objective.
PropertyReport check_lemma_cute(const Configuration& z, const Objective& instance, int trials, std::uint64_t seed);

/// Value of tr(T) <S, C> + 2 <Delta(Z T Z^T), Delta(S)> for given S, T.
double cute_value(const Matrix& z, const Matrix& c, const Matrix& s, const Matrix& t);

struct RipBound {
  double bound = 0.0;
  double quotient_scaled = 0.0;  // witness J (e1 e1^T - e2 e2^T) J, expected n / 2
  double quotient_hollow = 0.0;  // hollow centered witness, expected 1
};

RipBound rip_lower_bound(Index n);

struct CertificateMatrices {
  Matrix c;
  Matrix s;
  Matrix p;
  Vector c_spectrum;  // ascending
  Vector s_spectrum;
  Vector p_spectrum;
  Index ell = 0;  // min(dg, n - k)
  double c_max_eig = 0.0;
  double cz_norm = 0.0;
  double c1_norm = 0.0;
  Index c_rank = 0;
  double trace_p = 0.0;
  double trace_s = 0.0;
  double cost = 0.0;
  double cost_from_c = 0.0;  // -<Y Y^T, C>
};

/// Throws PreconditionError when Z (centered) is column-rank deficient or
/// ||grad|| > 1e-9 scale.
CertificateMatrices certificate_matrices(const Configuration& z, const Configuration& y);

/// Smallest integer k with k > dg + n / (-1/2 + sqrt(1/4 + n / dg)).
Index sqrtn_threshold(Index dg, Index n);

struct GaussianCondition {
  double lhs = 0.0;  // (k + 2) sigma_min^2(J Y)
  double rhs = 0.0;  // 4 n max_i ||y_i - mu||^2
  bool holds = false;
};

GaussianCondition gaussian_condition(const Configuration& y, Index k);
/// Smallest k >= 1 satisfying the condition; empty when sigma_min(J Y) = 0.
std::optional<Index> smallest_gaussian_k(const Configuration& y);

struct AltSensingMap {
  Index n = 0;
  Matrix a;  // n x m, columns a_i (centered)
  double fourth_moment = 0.0;  // sum ||a_i||^4
  Index span_rank = 0;
  Matrix gamma_matrix;  // representation on cent_basis(n)

  Matrix gamma(const Matrix& x) const;
  Matrix psi(const Matrix& x) const;
};

/// Draws m random centered directions normalized so sum ||a_i||^4 = 0.99,
/// retrying up to 8 times until {a_i a_i^T} spans Cent(n); RetryExhausted otherwise.
AltSensingMap make_alt_map(Index n, Index m, std::uint64_t seed);

/// P1, P2, P3 on random centered PSD inputs, Q5 span check, and the empirical
/// Q4 constant (a lower estimate, reported in `margin`).
std::vector<PropertyReport> check_Q4_Q5(const AltSensingMap& map, int trials, std::uint64_t seed = 0);

}  // namespace snl
