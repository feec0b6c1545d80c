#include "snl/trust_region.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace snl {

void SolverOptions::validate() const {
  if (!(grad_tol >= 0.0) || !std::isfinite(grad_tol)) {
    throw InvalidInput("grad_tol must be a finite nonnegative number");
  }
  if (max_iters < 1) {
    throw InvalidInput("max_iters must be positive");
  }
  if (!(initial_radius > 0.0) || !(max_radius > 0.0) || !std::isfinite(max_radius)) {
    throw InvalidInput("trust-region radii must be positive and finite");
  }
  if (initial_radius > max_radius) {
    throw InvalidInput("initial_radius exceeds max_radius");
  }
  if (!(acceptance_threshold > 0.0 && acceptance_threshold <= 0.25)) {
    throw InvalidInput("acceptance_threshold must lie in (0, 1/4]");
  }
  if (tcg_max_inner < 1) {
    throw InvalidInput("tcg_max_inner must be positive");
  }
  if (!(tcg_kappa > 0.0 && tcg_kappa < 1.0) || !(tcg_theta > 0.0)) {
    throw InvalidInput("tcg_kappa must lie in (0, 1) and tcg_theta must be positive");
  }
  if (max_consecutive_rejections < 1) {
    throw InvalidInput("max_consecutive_rejections must be positive");
  }
  if (std::isnan(time_limit_seconds)) {
    throw InvalidInput("time_limit_seconds is NaN");
  }
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::max_iters:
      return "max_iters";
    case SolveStatus::stalled:
      return "stalled";
  }
  return "unknown";
}

Problem make_problem(const Objective& objective) {
  Problem p;
  p.cost = [&objective](const Matrix& z) { return objective.cost(z); };
  p.gradient = [&objective](const Matrix& z) { return objective.gradient(z); };
  p.hessian_at = [&objective](const Matrix& z) { return objective.hessian_at(z); };
  p.decrease = [&objective](const Matrix& z, const Matrix& s) { return objective.cost_decrease(z, s); };
  p.scale = objective.scale();
  return p;
}

namespace {

struct InnerResult {
  Matrix step;
  Matrix h_step;  // H * step, for the model decrease
  bool hit_boundary = false;
  long products = 0;
};

// Largest tau >= 0 with ||s + tau d|| = radius.
double to_boundary(const Matrix& s, const Matrix& d, double radius) {
  const double a = d.squaredNorm();
  const double b = 2.0 * frobenius_inner(s, d);
  const double c = s.squaredNorm() - radius * radius;
  const double disc = std::max(0.0, b * b - 4.0 * a * c);
  return (-b + std::sqrt(disc)) / (2.0 * a);
}

InnerResult truncated_cg(const Matrix& g, const HessianOperator& hess, double radius, const SolverOptions& opts) {
  InnerResult out;
  out.step = Matrix::Zero(g.rows(), g.cols());
  out.h_step = Matrix::Zero(g.rows(), g.cols());

  Matrix r = g;
  Matrix d = -r;
  double rr = r.squaredNorm();
  const double r0 = std::sqrt(rr);
  const double target = r0 * std::min(opts.tcg_kappa, std::pow(r0, opts.tcg_theta));

  for (int j = 0; j < opts.tcg_max_inner; ++j) {
    const Matrix hd = hess(d);
    ++out.products;
    const double dhd = frobenius_inner(d, hd);
    if (dhd <= 0.0) {
      const double tau = to_boundary(out.step, d, radius);
      out.step += tau * d;
      out.h_step += tau * hd;
      out.hit_boundary = true;
      break;
    }
    const double alpha = rr / dhd;
    const Matrix candidate = out.step + alpha * d;
    if (candidate.norm() >= radius) {
      const double tau = to_boundary(out.step, d, radius);
      out.step += tau * d;
      out.h_step += tau * hd;
      out.hit_boundary = true;
      break;
    }
    out.step = candidate;
    out.h_step += alpha * hd;
    r += alpha * hd;
    const double rr_next = r.squaredNorm();
    if (std::sqrt(rr_next) <= target) {
      break;
    }
    d = -r + (rr_next / rr) * d;
    rr = rr_next;
  }
  return out;
}

}  // namespace

SolveResult minimize(const Matrix& z0, const Problem& problem, const SolverOptions& opts) {
  opts.validate();
  if (!problem.cost || !problem.gradient || !problem.hessian_at) {
    throw InvalidInput("problem is missing a callback");
  }
  if (z0.size() == 0 || !z0.allFinite()) {
    throw InvalidInput("initial iterate must be non-empty and finite");
  }

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const double tol = opts.grad_tol * problem.scale;

  SolveResult res;
  Matrix z = z0;
  double f = problem.cost(z);
  Matrix g = problem.gradient(z);
  if (!std::isfinite(f) || !g.allFinite()) {
    throw NumericalFailure("cost or gradient is not finite at the initial iterate", z);
  }
  double gn = g.norm();
  double radius = opts.initial_radius;
  int rejections = 0;
  res.status = SolveStatus::max_iters;

  int iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    if (gn <= tol) {
      res.status = SolveStatus::converged;
      break;
    }
    if (opts.time_limit_seconds > 0.0 &&
        std::chrono::duration<double>(clock::now() - start).count() > opts.time_limit_seconds) {
      res.time_limit_hit = true;
      res.status = SolveStatus::stalled;
      break;
    }

    const HessianOperator hess = problem.hessian_at(z);
    InnerResult inner = truncated_cg(g, hess, radius, opts);
    res.hess_vec_count += inner.products;

    const double pred = -(frobenius_inner(g, inner.step) + 0.5 * frobenius_inner(inner.step, inner.h_step));
    const Matrix z_trial = z + inner.step;
    const double f_trial = problem.cost(z_trial);
    if (!std::isfinite(f_trial)) {
      throw NumericalFailure("cost is not finite at a trial point", z);
    }
    const double actual = problem.decrease ? problem.decrease(z, inner.step) : f - f_trial;
    if (!std::isfinite(actual)) {
      throw NumericalFailure("cost decrease is not finite at a trial point", z);
    }

    // Both reductions lose relative accuracy once f is near round-off; the
    // shared offset keeps rho meaningful there.
    const double reg = 1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f));
    const double rho = pred > 0.0 ? (actual + reg) / (pred + reg) : -std::numeric_limits<double>::infinity();

    const bool accept = pred > 0.0 && actual >= 0.0 && rho > opts.acceptance_threshold;
    // A rejected step always shrinks the region, otherwise a regularized rho
    // near 1 could retry the same step forever.
    if (rho < 0.25 || !accept) {
      radius *= 0.25;
    } else if (rho > 0.75 && inner.hit_boundary) {
      radius = std::min(2.0 * radius, opts.max_radius);
    }

    if (accept) {
      Matrix g_trial = problem.gradient(z_trial);
      if (!g_trial.allFinite()) {
        throw NumericalFailure("gradient is not finite at an accepted point", z);
      }
      z = z_trial;
      f = f_trial;
      g = std::move(g_trial);
      gn = g.norm();
      rejections = 0;
    } else if (++rejections >= opts.max_consecutive_rejections) {
      ++iter;
      res.status = SolveStatus::stalled;
      break;
    }
  }
  if (iter == opts.max_iters && gn <= tol) {
    res.status = SolveStatus::converged;
  }

  res.iterations = iter;
  res.z_final = std::move(z);
  res.final_cost = f;
  res.final_grad_norm = gn;
  return res;
}

SolveResult minimize(const Configuration& z0, const Objective& objective, const SolverOptions& opts) {
  return minimize(z0.points(), make_problem(objective), opts);
}

}  // namespace snl
