#include "snl/theory.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "snl/edm.hpp"
#include "snl/random.hpp"

namespace snl {

namespace {

double lambda_min(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

double lambda_max(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(m.rows() - 1);
}

Matrix psi_raw(const Matrix& x) {
  const Index n = x.rows();
  return 0.5 * static_cast<double>(n) * kernel::centered_diagonal(x) + (0.5 * x.trace()) * centering_matrix(n);
}

// Running max/min accumulator for one report.
struct Tally {
  PropertyReport rep;
  Tally(std::string id, double tol) {
    rep.id = std::move(id);
    rep.tolerance = tol;
    rep.margin = std::numeric_limits<double>::quiet_NaN();
  }
  void violation(double v) {
    ++rep.trials;
    rep.max_violation = std::max(rep.max_violation, v);
  }
  void margin(double m) { rep.margin = std::isnan(rep.margin) ? m : std::min(rep.margin, m); }
  PropertyReport done() {
    rep.pass = rep.max_violation <= rep.tolerance;
    return rep;
  }
};

Matrix random_psd(Index n, Rng& rng) {
  std::uniform_int_distribution<Index> rank(1, n);
  const Matrix g = gaussian_matrix(n, rank(rng), rng);
  const Matrix s = g * g.transpose();
  return s / s.norm();
}

}  // namespace

std::string format_report(const PropertyReport& r) {
  std::ostringstream os;
  os << std::left << std::setw(20) << r.id << " " << (r.pass ? "pass" : "FAIL") << "  trials=" << r.trials
     << std::scientific << std::setprecision(3) << "  max_violation=" << r.max_violation
     << "  tolerance=" << r.tolerance;
  if (!std::isnan(r.margin)) {
    os << "  margin=" << r.margin;
  }
  if (!r.note.empty()) {
    os << "  (" << r.note << ")";
  }
  return os.str();
}

std::vector<Matrix> cent_basis(Index n) {
  if (n < 2) {
    return {};
  }
  const Matrix full_q = Eigen::HouseholderQR<Matrix>(Vector::Ones(n)).householderQ() * Matrix::Identity(n, n);
  const Matrix q = full_q.rightCols(n - 1);  // orthonormal basis of 1-perp
  std::vector<Matrix> basis;
  basis.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Index a = 0; a < n - 1; ++a) {
    basis.push_back(q.col(a) * q.col(a).transpose());
    for (Index b = a + 1; b < n - 1; ++b) {
      basis.push_back(inv_sqrt2 * (q.col(a) * q.col(b).transpose() + q.col(b) * q.col(a).transpose()));
    }
  }
  return basis;
}

Matrix operator_matrix(Index n, const std::function<Matrix(const Matrix&)>& op) {
  const std::vector<Matrix> basis = cent_basis(n);
  const Index d = static_cast<Index>(basis.size());
  Matrix m(d, d);
  for (Index b = 0; b < d; ++b) {
    const Matrix image = op(basis[static_cast<std::size_t>(b)]);
    for (Index a = 0; a < d; ++a) {
      m(a, b) = frobenius_inner(basis[static_cast<std::size_t>(a)], image);
    }
  }
  return m;
}

ContractionSample contraction_slacks(const Matrix& x) {
  const Index n = x.rows();
  const Matrix g = kernel::centered_diagonal(x);
  const Matrix p4 = 0.5 * static_cast<double>(n) * g + (0.5 * x.trace()) * centering_matrix(n) - psi_raw(x);
  ContractionSample s;
  s.p1 = lambda_min(g);
  s.p2 = lambda_max(x) - lambda_max(g);
  s.p3 = x.trace() - g.trace();
  s.p4 = lambda_min(p4);
  return s;
}

double p5_relative_gap(const Vector& u, const Vector& w) {
  const Matrix uw = u * w.transpose();
  const double lhs = kernel::delta(uw + uw.transpose()).squaredNorm();
  const double rhs = 4.0 * frobenius_inner(kernel::delta(u * u.transpose()), kernel::delta(w * w.transpose()));
  const double denom = std::max({std::abs(lhs), std::abs(rhs), std::numeric_limits<double>::min()});
  return std::abs(lhs - rhs) / denom;
}

std::vector<PropertyReport> check_P1_to_P5(Index n, int trials, std::uint64_t seed) {
  if (n < 3) {
    throw InvalidInput("check_P1_to_P5 needs n >= 3");
  }
  if (trials < 1) {
    throw InvalidInput("trials must be positive");
  }
  const double tol = 1e-10;
  Tally p1("P1", tol), p2("P2", tol), p3("P3", tol), p4("P4", tol), p5("P5", 1e-11);
  Tally l32("lemma3.2", 1e-12), sc("strong-convexity", tol);

  for (int t = 0; t < trials; ++t) {
    Rng rng(mix(seed, static_cast<std::uint64_t>(t)));
    const Matrix x = random_centered_psd(n, rng);
    const double scale = 1.0 + x.norm();
    const ContractionSample s = contraction_slacks(x);
    p1.violation(std::max(0.0, -s.p1) / scale);
    p2.violation(std::max(0.0, -s.p2) / scale);
    p2.margin(s.p2 / scale);
    p3.violation(std::max(0.0, -s.p3) / scale);
    p4.violation(std::max(0.0, -s.p4) / scale);

    const Matrix uw = gaussian_matrix(n, 2, rng);
    p5.violation(p5_relative_gap(uw.col(0), uw.col(1)));

    // The lemma needs lambda_max(X) > 0; redraw the rare negative semidefinite samples.
    Matrix xs = random_centered_symmetric(n, rng);
    while (lambda_max(xs) <= 0.0) {
      xs = random_centered_symmetric(n, rng);
    }
    const double xs_scale = 1.0 + xs.norm();
    const double gap = lambda_max(xs) - lambda_max(kernel::centered_diagonal(xs));
    l32.violation(std::max(0.0, -gap) / xs_scale);
    l32.margin(gap / xs_scale);
    const double slack = kernel::delta(xs).squaredNorm() - xs.squaredNorm();
    sc.violation(std::max(0.0, -slack) / (1.0 + xs.squaredNorm()));
  }

  std::vector<PropertyReport> out{p1.done(), p2.done(), p3.done(), p4.done(), p5.done(), l32.done(), sc.done()};
  for (auto& r : out) {
    if (r.id == "P5") {
      r.note = "relative equality gap";
    } else if (r.id == "strong-convexity") {
      r.note = "relative to 1 + ||X||_F^2";
    } else {
      r.note = "relative to 1 + ||X||_F";
    }
  }
  return out;
}

double cute_value(const Matrix& z, const Matrix& c, const Matrix& s, const Matrix& t) {
  const Matrix ztz = z * t * z.transpose();
  return t.trace() * frobenius_inner(s, c) + 2.0 * frobenius_inner(kernel::delta(ztz), kernel::delta(s));
}

PropertyReport check_lemma_cute(const Configuration& z, const Objective& instance, int trials, std::uint64_t seed) {
  if (trials < 1) {
    throw InvalidInput("trials must be positive");
  }
  const CriticalityReport cert = certify(z, instance);
  if (cert.verdict != Verdict::strict_2_critical && cert.verdict != Verdict::non_strict_2_critical) {
    throw PreconditionError("check_lemma_cute requires a 2-critical configuration, got " + to_string(cert.verdict));
  }
  const Matrix c = instance.certificate(z.points());
  const double tol = 1e-10 * instance.scale();
  Tally tally("cute", tol);
  for (int t = 0; t < trials; ++t) {
    Rng rng(mix(seed, static_cast<std::uint64_t>(t)));
    const Matrix s = random_psd(z.n(), rng);
    const Matrix tt = random_psd(z.k(), rng);
    const double v = cute_value(z.points(), c, s, tt);
    tally.violation(std::max(0.0, -v));
    tally.margin(v);
  }
  PropertyReport r = tally.done();
  r.note = "S, T unit Frobenius norm";
  return r;
}

RipBound rip_lower_bound(Index n) {
  if (n < 4) {
    throw InvalidInput("rip_lower_bound needs n >= 4");
  }
  auto quotient = [](const Matrix& w) {
    return frobenius_inner(w, kernel::delta_star_delta_centered(w)) / w.squaredNorm();
  };
  Matrix e = Matrix::Zero(n, n);
  e(0, 0) = 1.0;
  e(1, 1) = -1.0;
  const Matrix j = centering_matrix(n);
  const Matrix w1 = j * e * j;

  Vector a = Vector::Zero(n), b = Vector::Zero(n);
  a.head(4) << 1, 1, -1, -1;
  b.head(4) << 1, -1, -1, 1;
  const Matrix w2 = a * a.transpose() - b * b.transpose();

  RipBound r;
  r.quotient_scaled = quotient(w1);
  r.quotient_hollow = quotient(w2);
  r.bound = (r.quotient_scaled - r.quotient_hollow) / (r.quotient_scaled + r.quotient_hollow);
  return r;
}

CertificateMatrices certificate_matrices(const Configuration& z, const Configuration& y) {
  if (z.n() != y.n()) {
    throw InvalidInput("certificate_matrices: configurations have different numbers of points");
  }
  const Index n = z.n();
  const Index k = z.k();
  const Index dg = y.k();
  const Objective obj = Objective::complete(y);
  const double gn = obj.gradient(z.points()).norm();
  if (gn > 1e-9 * obj.scale()) {
    throw PreconditionError("certificate_matrices: Z is not 1-critical (gradient norm " + std::to_string(gn) + ")");
  }
  const Matrix zc = kernel::center_columns(z.points());
  Eigen::JacobiSVD<Matrix> svd(zc);
  const Vector sv = svd.singularValues();
  if (sv.size() < k || sv(k - 1) <= 1e-10 * std::max(1.0, sv(0))) {
    throw PreconditionError("certificate_matrices: centered Z is rank deficient");
  }

  CertificateMatrices out;
  out.c = obj.certificate(z.points());
  Eigen::SelfAdjointEigenSolver<Matrix> ceig(out.c);
  out.c_spectrum = ceig.eigenvalues();
  out.c_max_eig = out.c_spectrum(n - 1);
  out.cz_norm = (out.c * z.points()).norm();
  out.c1_norm = (out.c * Vector::Ones(n)).norm();
  const double rank_tol = 1e-9 * std::max(1.0, out.c_spectrum.cwiseAbs().maxCoeff());
  out.c_rank = (out.c_spectrum.array().abs() > rank_tol).count();

  out.ell = std::max<Index>(0, std::min(dg, n - k));
  out.s = Matrix::Zero(n, n);
  for (Index i = 0; i < out.ell; ++i) {
    const double gamma_i = std::min(0.0, out.c_spectrum(i));
    const Vector xi = ceig.eigenvectors().col(i);
    out.s -= gamma_i * (xi * xi.transpose());
  }

  Eigen::SelfAdjointEigenSolver<Matrix> geig(zc.transpose() * zc);
  const Matrix inv_sqrt = geig.eigenvectors() * geig.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                          geig.eigenvectors().transpose();
  const Matrix v = zc * inv_sqrt;
  out.p = v.transpose() * kernel::centered_diagonal(-out.c) * v;

  out.s_spectrum = Eigen::SelfAdjointEigenSolver<Matrix>(out.s, Eigen::EigenvaluesOnly).eigenvalues();
  out.p_spectrum = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (out.p + out.p.transpose()), Eigen::EigenvaluesOnly)
                       .eigenvalues();
  out.trace_p = out.p.trace();
  out.trace_s = out.s.trace();
  out.cost = obj.cost(z.points());
  const Matrix yc = kernel::center_columns(y.points());
  out.cost_from_c = -frobenius_inner(yc * yc.transpose(), out.c);
  return out;
}

Index sqrtn_threshold(Index dg, Index n) {
  if (dg < 1 || n < dg + 2) {
    throw InvalidInput("sqrtn_threshold needs dg >= 1 and n >= dg + 2");
  }
  const double nd = static_cast<double>(n);
  const double bound = static_cast<double>(dg) + nd / (-0.5 + std::sqrt(0.25 + nd / static_cast<double>(dg)));
  return static_cast<Index>(std::floor(bound)) + 1;
}

GaussianCondition gaussian_condition(const Configuration& y, Index k) {
  const Index n = y.n();
  const Matrix yc = kernel::center_columns(y.points());
  double sigma_min = 0.0;
  if (n >= y.k()) {
    Eigen::JacobiSVD<Matrix> svd(yc);
    sigma_min = svd.singularValues()(y.k() - 1);
  }
  GaussianCondition gc;
  gc.lhs = static_cast<double>(k + 2) * sigma_min * sigma_min;
  gc.rhs = 4.0 * static_cast<double>(n) * yc.rowwise().squaredNorm().maxCoeff();
  gc.holds = gc.lhs > gc.rhs;
  return gc;
}

std::optional<Index> smallest_gaussian_k(const Configuration& y) {
  const GaussianCondition base = gaussian_condition(y, 0);
  const double sigma2 = base.lhs / 2.0;
  if (!(sigma2 > 0.0)) {
    return std::nullopt;
  }
  Index k = std::max<Index>(1, static_cast<Index>(std::floor(base.rhs / sigma2 - 2.0)) + 1);
  while (k > 1 && gaussian_condition(y, k - 1).holds) {
    --k;
  }
  while (!gaussian_condition(y, k).holds) {
    ++k;
  }
  return k;
}

Matrix AltSensingMap::gamma(const Matrix& x) const {
  const Vector w = (a.transpose() * x * a).diagonal();
  return a * w.asDiagonal() * a.transpose();
}

Matrix AltSensingMap::psi(const Matrix& x) const {
  const std::vector<Matrix> basis = cent_basis(n);
  const Index d = static_cast<Index>(basis.size());
  Vector coords(d);
  for (Index b = 0; b < d; ++b) {
    coords(b) = frobenius_inner(basis[static_cast<std::size_t>(b)], x);
  }
  // Psi = (I - Gamma)^{-1} - I = (I - Gamma)^{-1} Gamma
  const Matrix i_minus_g = Matrix::Identity(d, d) - gamma_matrix;
  const Vector out_coords = i_minus_g.partialPivLu().solve(gamma_matrix * coords);
  Matrix out = Matrix::Zero(n, n);
  for (Index b = 0; b < d; ++b) {
    out += out_coords(b) * basis[static_cast<std::size_t>(b)];
  }
  return out;
}

AltSensingMap make_alt_map(Index n, Index m, std::uint64_t seed) {
  if (n < 2 || m < 1) {
    throw InvalidInput("make_alt_map needs n >= 2 and m >= 1");
  }
  const std::vector<Matrix> basis = cent_basis(n);
  const Index d = static_cast<Index>(basis.size());
  constexpr int kAttempts = 8;
  Index best_rank = 0;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Rng rng(mix(seed, static_cast<std::uint64_t>(attempt)));
    Matrix a = kernel::center_columns(gaussian_matrix(n, m, rng));
    const double fourth = a.colwise().squaredNorm().array().square().sum();
    a *= std::pow(0.99 / fourth, 0.25);

    Matrix coords(d, m);  // column i: a_i a_i^T in the basis
    for (Index i = 0; i < m; ++i) {
      for (Index b = 0; b < d; ++b) {
        coords(b, i) = a.col(i).dot(basis[static_cast<std::size_t>(b)] * a.col(i));
      }
    }
    Eigen::JacobiSVD<Matrix> svd(coords);
    const Vector sv = svd.singularValues();
    const double cut = 1e-10 * std::max(1e-300, sv(0));
    const Index rank = (sv.array() > cut).count();
    best_rank = std::max(best_rank, rank);
    if (rank == d) {
      AltSensingMap map;
      map.n = n;
      map.a = std::move(a);
      map.fourth_moment = map.a.colwise().squaredNorm().array().square().sum();
      map.span_rank = rank;
      map.gamma_matrix = coords * coords.transpose();
      return map;
    }
  }
  throw RetryExhausted("make_alt_map: {a_i a_i^T} spanned only " + std::to_string(best_rank) + " of " +
                       std::to_string(d) + " dimensions after " + std::to_string(kAttempts) + " attempts");
}

std::vector<PropertyReport> check_Q4_Q5(const AltSensingMap& map, int trials, std::uint64_t seed) {
  if (trials < 1) {
    throw InvalidInput("trials must be positive");
  }
  const Index n = map.n;
  const double tol = 1e-10;
  Tally p1("P1(alt)", tol), p2("P2(alt)", tol), p3("P3(alt)", tol), q4("Q4", 0.0), q5("Q5", 0.0);

  const Index d = n * (n - 1) / 2;
  q5.violation(static_cast<double>(d - map.span_rank));
  q5.rep.trials = 1;

  // Psi on the basis, computed once for the Q4 estimate.
  const Matrix i_minus_g = Matrix::Identity(d, d) - map.gamma_matrix;
  const Matrix psi_matrix = i_minus_g.partialPivLu().solve(map.gamma_matrix);
  const std::vector<Matrix> basis = cent_basis(n);
  double c_est = 0.0;

  for (int t = 0; t < trials; ++t) {
    Rng rng(mix(seed, static_cast<std::uint64_t>(t)));
    const Matrix x = random_centered_psd(n, rng);
    const double scale = 1.0 + x.norm();
    const Matrix g = map.gamma(x);
    p1.violation(std::max(0.0, -lambda_min(g)) / scale);
    const double gap = lambda_max(x) - lambda_max(g);
    p2.violation(std::max(0.0, -gap) / scale);
    p2.margin(gap / scale);
    p3.violation(std::max(0.0, g.trace() - x.trace()) / scale);

    Matrix xs = random_centered_symmetric(n, rng);
    xs -= (xs.trace() / static_cast<double>(n - 1)) * centering_matrix(n);
    Vector coords(d);
    for (Index b = 0; b < d; ++b) {
      coords(b) = frobenius_inner(basis[static_cast<std::size_t>(b)], xs);
    }
    const double num = coords.dot(psi_matrix * coords);
    const double den = coords.dot(map.gamma_matrix * coords);
    q4.violation(den > 0.0 ? 0.0 : 1.0);
    if (den > 0.0) {
      c_est = std::max(c_est, 2.0 * num / den);
    }
  }
  PropertyReport r4 = q4.done();
  r4.margin = c_est;
  r4.note = "margin is an empirical lower estimate of c";
  PropertyReport r5 = q5.done();
  r5.note = "span rank " + std::to_string(map.span_rank) + " of " + std::to_string(d);
  return {p1.done(), p2.done(), p3.done(), r4, r5};
}

}  // namespace snl
