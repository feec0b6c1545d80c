#include "snl/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <regex>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "snl/edm.hpp"

namespace snl {

std::string to_string(ConditionResult c) {
  switch (c) {
    case ConditionResult::strict:
      return "strict";
    case ConditionResult::non_strict:
      return "non-strict";
    case ConditionResult::fails:
      return "fails-condition";
  }
  return "unknown";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::not_1_critical:
      return "not-1-critical";
    case Verdict::not_2_critical:
      return "not-2-critical";
    case Verdict::non_strict_2_critical:
      return "non-strict-2-critical";
    case Verdict::strict_2_critical:
      return "strict-2-critical";
  }
  return "unknown";
}

void evaluate_condition(ReflectionConstruction& rc) {
  const Matrix& y = rc.y.points();
  const Index n = y.rows();
  const Index dg = y.cols();
  if (n < dg + 2) {
    throw InvalidInput("reflection layout needs n >= dg + 2");
  }
  const Eigen::RowVectorXd apex = y.row(n - 2);
  Matrix m = Matrix::Zero(dg, dg);
  for (Index i = 0; i < n - 2; ++i) {
    const Vector w = (y.row(i) - apex).transpose();
    m += w * w.transpose();
  }
  rc.condition_matrix = m;
  rc.alpha = (apex - y.row(n - 1)).squaredNorm();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  rc.condition_margin = eig.eigenvalues()(0) - rc.alpha;
  const double tol = 1e-12 * std::max({1.0, rc.alpha, m.norm()});
  if (rc.condition_margin > tol) {
    rc.condition = ConditionResult::strict;
  } else if (rc.condition_margin >= -tol) {
    rc.condition = ConditionResult::non_strict;
  } else {
    rc.condition = ConditionResult::fails;
  }
}

namespace {

ReflectionConstruction assemble(const Matrix& points, const Vector& apex, const Vector& reflected) {
  const Index m = points.rows();
  const Index dg = points.cols();
  ReflectionConstruction rc;
  rc.hyperplane_points = points;
  rc.apex = apex;
  rc.reflected = reflected;
  Matrix y(m + 2, dg);
  y.topRows(m) = points;
  y.row(m) = apex.transpose();
  y.row(m + 1) = reflected.transpose();
  Matrix z = y;
  z.row(m + 1) = apex.transpose();
  rc.y = Configuration(std::move(y));
  rc.z = Configuration(std::move(z));
  evaluate_condition(rc);
  return rc;
}

}  // namespace

ReflectionConstruction build_reflection_example(const Matrix& hyperplane_points, const Vector& apex) {
  const Index m = hyperplane_points.rows();
  const Index dg = hyperplane_points.cols();
  if (dg < 1 || apex.size() != dg) {
    throw InvalidInput("apex dimension must match the hyperplane points");
  }
  if (m < dg) {
    throw InvalidInput("need at least dg points in the hyperplane (n >= dg + 2)");
  }
  if (!hyperplane_points.allFinite() || !apex.allFinite()) {
    throw InvalidInput("construction inputs must be finite");
  }

  const Eigen::RowVectorXd centroid = hyperplane_points.colwise().mean();
  const Matrix pc = hyperplane_points.rowwise() - centroid;
  const double tol = 1e-10 * (1.0 + pc.norm());
  Vector normal(dg);
  if (dg == 1) {
    if (pc.norm() > tol) {
      throw InvalidInput("in dimension 1 the hyperplane points must coincide");
    }
    normal(0) = 1.0;
  } else {
    Eigen::JacobiSVD<Matrix> svd(pc, Eigen::ComputeFullV);
    const Vector s = svd.singularValues();
    if (s(dg - 1) > tol) {
      throw InvalidInput("hyperplane points do not lie in a common hyperplane");
    }
    if (s(dg - 2) <= tol) {
      throw InvalidInput("hyperplane points do not determine a unique hyperplane");
    }
    normal = svd.matrixV().col(dg - 1);
  }

  const double offset = (apex - centroid.transpose()).dot(normal);
  if (std::abs(offset) <= 1e-9) {
    throw InvalidInput("apex lies in the hyperplane");
  }
  const Vector reflected = apex - 2.0 * offset * normal;
  return assemble(hyperplane_points, apex, reflected);
}

Preset planar7() {
  Matrix pts(5, 2);
  pts << -2, 0, -1, 0, 0, 0, 1, 0, 2, 0;
  Vector apex(2), refl(2);
  apex << 0, 1;
  refl << 0, -1;
  return {"planar7", assemble(pts, apex, refl), Verdict::strict_2_critical};
}

Preset simplex(Index dg) {
  if (dg < 4) {
    throw InvalidInput("simplex preset requires dg >= 4");
  }
  Matrix pts = Matrix::Identity(dg, dg);
  Vector apex = Vector::Zero(dg);
  Vector refl = Vector::Constant(dg, 2.0 / static_cast<double>(dg));
  const Verdict claim = dg >= 5 ? Verdict::strict_2_critical : Verdict::non_strict_2_critical;
  return {"simplex" + std::to_string(dg), assemble(pts, apex, refl), claim};
}

Preset mixed7(Index dg) {
  if (dg != 3 && dg != 4) {
    throw InvalidInput("mixed7 preset requires dg in {3, 4}");
  }
  const double d = static_cast<double>(dg);
  Matrix pts(5, dg);
  pts.topRows(dg) = Matrix::Identity(dg, dg);
  for (Index r = dg; r < 5; ++r) {
    pts.row(r).setConstant(1.0 / d);
  }
  Vector apex = Vector::Constant(dg, 1.0 / (2.0 * d));
  Vector refl = Vector::Constant(dg, 3.0 / (2.0 * d));
  return {"mixed7-" + std::to_string(dg), assemble(pts, apex, refl), Verdict::strict_2_critical};
}

Preset preset(const std::string& name) {
  if (name == "planar7") {
    return planar7();
  }
  static const std::regex simplex_re(R"(simplex(?:(\d+)|\((\d+)\)))");
  static const std::regex mixed_re(R"(mixed7(?:-(\d+)|\((\d+)\)))");
  std::smatch m;
  auto number = [&m]() {
    const std::string s = m[1].matched ? m[1].str() : m[2].str();
    if (s.size() > 6) {
      throw InvalidInput("preset dimension out of range");
    }
    return static_cast<Index>(std::stol(s));
  };
  if (std::regex_match(name, m, simplex_re)) {
    return simplex(number());
  }
  if (std::regex_match(name, m, mixed_re)) {
    return mixed7(number());
  }
  throw InvalidInput("unknown preset '" + name + "' (expected planar7, simplex<dg>, mixed7-<dg>)");
}

std::vector<std::string> preset_names() {
  return {"planar7", "simplex4", "simplex5", "mixed7-3", "mixed7-4"};
}

Matrix assemble_hessian(const Matrix& z, const Objective& instance) {
  const Index n = z.rows();
  const Index k = z.cols();
  const Index dim = n * k;
  const HessianOperator hess = instance.hessian_at(z);
  Matrix h(dim, dim);
  Matrix e = Matrix::Zero(n, k);
  for (Index p = 0; p < dim; ++p) {
    e.data()[p] = 1.0;
    const Matrix col = hess(e);
    h.col(p) = Eigen::Map<const Vector>(col.data(), dim);
    e.data()[p] = 0.0;
  }
  return 0.5 * (h + h.transpose());
}

CriticalityReport certify(const Configuration& z, const Objective& instance, const CertifyOptions& opts) {
  const Index n = z.n();
  const Index k = z.k();
  const Index dim = n * k;
  if (dim > opts.max_dimension) {
    throw UnsupportedSize("certify: n*k = " + std::to_string(dim) + " exceeds the dense limit " +
                          std::to_string(opts.max_dimension) + "; an iterative eigensolver would be needed");
  }

  CriticalityReport rep;
  rep.scale = instance.scale();
  rep.grad_norm = instance.gradient(z.points()).norm();
  rep.symmetry_kernel_dim = k * (k + 1) / 2;
  if (rep.grad_norm > opts.grad_tol * rep.scale) {
    rep.verdict = Verdict::not_1_critical;
    return rep;
  }

  const Matrix h = assemble_hessian(z.points(), instance);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h, Eigen::EigenvaluesOnly);
  rep.hessian_spectrum = eig.eigenvalues();
  const double top = rep.hessian_spectrum.cwiseAbs().maxCoeff();
  const double ref = top > 0.0 ? top : 1.0;
  rep.kernel_threshold = opts.kernel_tol * ref;
  const double strict_threshold = opts.strict_tol * ref;
  rep.observed_kernel_dim = (rep.hessian_spectrum.array().abs() <= rep.kernel_threshold).count();

  const SymmetryBasis sym = symmetry_basis(z);
  const Index s = static_cast<Index>(sym.elements.size());
  rep.symmetry_basis_dim = s;
  if (s < dim) {
    Matrix b(dim, s);
    for (Index c = 0; c < s; ++c) {
      b.col(c) = Eigen::Map<const Vector>(sym.elements[static_cast<std::size_t>(c)].data(), dim);
    }
    Matrix q = Matrix::Identity(dim, dim);
    if (s > 0) {
      q = Eigen::HouseholderQR<Matrix>(b).householderQ() * Matrix::Identity(dim, dim);
    }
    const Matrix qc = q.rightCols(dim - s);
    Eigen::SelfAdjointEigenSolver<Matrix> ceig(qc.transpose() * h * qc, Eigen::EigenvaluesOnly);
    rep.min_eig_on_complement = ceig.eigenvalues()(0);
  }

  if (rep.hessian_spectrum(0) < -strict_threshold) {
    rep.verdict = Verdict::not_2_critical;
  } else if (rep.observed_kernel_dim > s) {
    rep.verdict = Verdict::non_strict_2_critical;
  } else {
    rep.verdict = Verdict::strict_2_critical;
  }
  return rep;
}

std::string format_report(const CriticalityReport& r) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "verdict: " << to_string(r.verdict) << "\n";
  os << "grad_norm: " << r.grad_norm << "\n";
  os << "scale: " << r.scale << "\n";
  os << "symmetry_kernel_dim: " << r.symmetry_kernel_dim << "\n";
  os << "symmetry_basis_dim: " << r.symmetry_basis_dim << "\n";
  if (r.hessian_spectrum.size() > 0) {
    os << "observed_kernel_dim: " << r.observed_kernel_dim << "\n";
    os << "kernel_threshold: " << r.kernel_threshold << "\n";
    os << "min_eig_on_complement: " << r.min_eig_on_complement << "\n";
    os << "hessian_spectrum:";
    for (Index i = 0; i < r.hessian_spectrum.size(); ++i) {
      os << " " << r.hessian_spectrum(i);
    }
    os << "\n";
  }
  return os.str();
}

Matrix principal_projection(const Matrix& z, Index d) {
  const Matrix zc = kernel::center_columns(z);
  Eigen::JacobiSVD<Matrix> svd(zc, Eigen::ComputeThinV);
  const Index r = std::min<Index>(d, svd.matrixV().cols());
  Matrix out = Matrix::Zero(z.rows(), d);
  out.leftCols(r) = zc * svd.matrixV().leftCols(r);
  return out;
}

Alignment align(const Configuration& z, const Configuration& y) {
  if (z.n() != y.n()) {
    throw InvalidInput("align: configurations have different numbers of points");
  }
  if (z.k() < y.k()) {
    throw InvalidInput("align: Z must have at least as many columns as Y");
  }
  const Index dg = y.k();
  const Eigen::RowVectorXd y_mean = y.points().colwise().mean();
  const Matrix yc = y.points().rowwise() - y_mean;
  const Matrix zp = principal_projection(z.points(), dg);

  Eigen::JacobiSVD<Matrix> proc(zp.transpose() * yc, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix q = proc.matrixU() * proc.matrixV().transpose();
  Matrix aligned = zp * q;
  Alignment out;
  out.distance = (aligned - yc).norm();
  aligned.rowwise() += y_mean;
  out.aligned = Configuration(std::move(aligned));
  return out;
}

Matrix best_linear_map(const Configuration& z, const Configuration& y) {
  if (z.n() != y.n()) {
    throw InvalidInput("best_linear_map: configurations have different numbers of points");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(z.points());
  if (qr.rank() < z.k()) {
    throw InvalidInput("best_linear_map: Z is not of full column rank");
  }
  const Matrix rt = qr.solve(y.points());  // k x dg
  return rt.transpose();
}

}  // namespace snl
