#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "snl/edm.hpp"
#include "snl/landscape.hpp"
#include "snl/objective.hpp"
#include "test_util.hpp"

using namespace snl;
using snl::test::gaussian;

namespace {

// Direct sum over the edge list.
double masked_oracle(const Matrix& z, const std::vector<Edge>& edges) {
  double total = 0.0;
  for (const auto& e : edges) {
    double d = 0.0;
    for (Index c = 0; c < z.cols(); ++c) {
      d += (z(e.i, c) - z(e.j, c)) * (z(e.i, c) - z(e.j, c));
    }
    total += (d - e.target) * (d - e.target);
  }
  return 0.5 * total;
}

std::vector<std::pair<Index, Index>> some_pairs(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.6);
  std::vector<std::pair<Index, Index>> out;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (coin(rng)) {
        out.emplace_back(i, j);
      }
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("objective") {

TEST_CASE("complete and masked forms agree on the complete graph") {
  for (Index k : {2, 3, 5}) {
    const Configuration y(gaussian(8, 2, 1));
    const Matrix z = gaussian(8, k, 2 + static_cast<std::uint64_t>(k));
    const Objective full = Objective::complete(y);
    const Objective masked = Objective::masked(MeasurementGraph::complete(y));
    CHECK(full.cost(z) == doctest::Approx(masked.cost(z)).epsilon(1e-12));
    CHECK((full.gradient(z) - masked.gradient(z)).norm() < 1e-10 * (1.0 + full.gradient(z).norm()));
    const Matrix v = gaussian(8, k, 9);
    CHECK((full.hess_vec(z, v) - masked.hess_vec(z, v)).norm() < 1e-10 * (1.0 + full.hess_vec(z, v).norm()));
  }
}

TEST_CASE("complete cost equals the squared Frobenius norm of delta of the Gram difference") {
  const Configuration y(gaussian(6, 2, 3));
  const Matrix z = gaussian(6, 3, 4);
  const Matrix d = kernel::delta(z * z.transpose() - y.points() * y.points().transpose());
  CHECK(Objective::complete(y).cost(z) == doctest::Approx(d.squaredNorm()).epsilon(1e-12));
  CHECK(cost_complete(Configuration(z), y) == doctest::Approx(d.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("masked cost matches a direct sum, including arbitrary targets") {
  const Configuration y(gaussian(9, 2, 5));
  MeasurementGraph g = MeasurementGraph::from_pairs(some_pairs(9, 6), y);
  std::vector<Edge> edges = g.edges();
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (auto& e : edges) {
    e.target += nd(rng);  // some become negative
  }
  const MeasurementGraph noisy(9, edges);
  const Matrix z = gaussian(9, 3, 8);
  CHECK(Objective::masked(noisy).cost(z) == doctest::Approx(masked_oracle(z, edges)).epsilon(1e-13));
  CHECK(cost_masked(Configuration(z), noisy) == doctest::Approx(masked_oracle(z, edges)).epsilon(1e-13));
}

TEST_CASE("gradients match central differences") {
  const Configuration y(gaussian(7, 2, 10));
  const MeasurementGraph g = MeasurementGraph::from_pairs(some_pairs(7, 11), y);
  for (const Objective& obj : {Objective::complete(y), Objective::masked(g)}) {
    for (Index k : {2, 4}) {
      const Matrix z = gaussian(7, k, 12 + static_cast<std::uint64_t>(k));
      const Matrix grad = obj.gradient(z);
      for (std::uint64_t s = 0; s < 5; ++s) {
        const Matrix v = gaussian(7, k, 100 + s);
        const double fd = snl::test::directional_fd([&](const Matrix& x) { return obj.cost(x); }, z, v, 1e-5);
        CHECK(frobenius_inner(grad, v) == doctest::Approx(fd).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("Hessian-vector products match differences of gradients") {
  const Configuration y(gaussian(7, 2, 20));
  const MeasurementGraph g = MeasurementGraph::from_pairs(some_pairs(7, 21), y);
  for (const Objective& obj : {Objective::complete(y), Objective::masked(g)}) {
    const Matrix z = gaussian(7, 3, 22);
    const HessianOperator h = obj.hessian_at(z);
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Matrix v = gaussian(7, 3, 200 + s);
      const Matrix fd = snl::test::gradient_fd([&](const Matrix& x) { return obj.gradient(x); }, z, v, 1e-5);
      const Matrix hv = obj.hess_vec(z, v);
      CHECK((hv - fd).norm() < 1e-6 * (1.0 + hv.norm()));
      CHECK((h(v) - hv).norm() < 1e-12 * (1.0 + hv.norm()));
      // Symmetry of the Hessian.
      const Matrix w = gaussian(7, 3, 300 + s);
      CHECK(frobenius_inner(w, h(v)) == doctest::Approx(frobenius_inner(v, h(w))).epsilon(1e-10));
    }
  }
}

TEST_CASE("cost decrease matches cost differences and the local model") {
  const Configuration y(gaussian(8, 2, 70));
  const MeasurementGraph g = MeasurementGraph::from_pairs(some_pairs(8, 71), y);
  for (const Objective& obj : {Objective::complete(y), Objective::masked(g)}) {
    const Matrix z = gaussian(8, 3, 72);
    const Matrix s = 0.3 * gaussian(8, 3, 73);
    CHECK(obj.cost_decrease(z, s) == doctest::Approx(obj.cost(z) - obj.cost(z + s)).epsilon(1e-12));
    CHECK(obj.cost_decrease(z, Matrix::Zero(8, 3)) == 0.0);
    // For a tiny step the quartic's third and fourth order terms are negligible,
    // while the direct difference of costs has lost all precision.
    const Matrix tiny = 1e-9 * gaussian(8, 3, 74);
    const double model = -(frobenius_inner(obj.gradient(z), tiny) + 0.5 * frobenius_inner(tiny, obj.hess_vec(z, tiny)));
    CHECK(obj.cost_decrease(z, tiny) == doctest::Approx(model).epsilon(1e-7));
  }
  CHECK_THROWS_AS(Objective::complete(y).cost_decrease(gaussian(8, 2, 1), gaussian(8, 3, 1)), InvalidInput);
}

TEST_CASE("gradient of the complete form is 4 C Z") {
  const Configuration y(gaussian(6, 2, 30));
  const Objective obj = Objective::complete(y);
  const Matrix z = kernel::center_columns(gaussian(6, 3, 31));
  const Matrix c = kernel::delta_adjoint(
      kernel::delta(z * z.transpose() - kernel::center_columns(y.points()) *
                                            kernel::center_columns(y.points()).transpose()));
  CHECK((obj.gradient(z) - 4.0 * c * z).norm() < 1e-11 * (1.0 + obj.gradient(z).norm()));
  CHECK((obj.certificate(z) - c).norm() < 1e-11 * (1.0 + c.norm()));
}

TEST_CASE("ground truth is a zero of cost and gradient") {
  const Configuration y(gaussian(8, 3, 40));
  const Objective obj = Objective::complete(y);
  CHECK(obj.cost(y.points()) < 1e-24);
  CHECK(obj.gradient(y.points()).norm() < 1e-12);
  const Objective masked = Objective::masked(MeasurementGraph::from_pairs(some_pairs(8, 41), y));
  CHECK(masked.cost(y.points()) < 1e-24);
  // Padded configurations are equally optimal, rigid motions too.
  CHECK(obj.cost(y.padded(5).points()) < 1e-24);
  const Matrix shifted = y.points().rowwise() + Eigen::RowVector3d(1.0, -2.0, 0.5);
  CHECK(obj.cost(shifted) < 1e-22);
}

TEST_CASE("the objective accepts any optimization dimension") {
  const Configuration y(gaussian(6, 2, 50));
  const Objective obj = Objective::complete(y);
  for (Index k = 1; k <= 6; ++k) {
    CHECK(std::isfinite(obj.cost(gaussian(6, k, 51))));
  }
  CHECK_THROWS_AS(obj.cost(gaussian(5, 2, 52)), InvalidInput);
  CHECK_THROWS_AS(obj.hess_vec(gaussian(6, 2, 52), gaussian(6, 3, 53)), InvalidInput);
}

TEST_CASE("symmetry directions lie in the Hessian kernel at the ground truth") {
  const Configuration y(gaussian(7, 3, 60));
  const Objective obj = Objective::complete(y);
  const SymmetryBasis basis = symmetry_basis(y);
  CHECK(basis.expected_dim == 6);
  CHECK(static_cast<Index>(basis.elements.size()) == 6);
  CHECK_FALSE(basis.rank_deficient);
  for (std::size_t a = 0; a < basis.elements.size(); ++a) {
    CHECK(obj.hess_vec(y.points(), basis.elements[a]).norm() < 1e-10);
    for (std::size_t b = 0; b < basis.elements.size(); ++b) {
      CHECK(frobenius_inner(basis.elements[a], basis.elements[b]) ==
            doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("symmetry basis reports rank deficiency of collinear configurations") {
  // In R^3 the rotation about the line of the points acts trivially.
  Matrix z = Matrix::Zero(5, 3);
  z.col(0) << 0, 1, 2, 3, 4;
  const SymmetryBasis basis = symmetry_basis(Configuration(z));
  CHECK(basis.rank_deficient);
  CHECK(static_cast<Index>(basis.elements.size()) < basis.expected_dim);
}

TEST_CASE("measurement graph validation") {
  CHECK_THROWS_AS(MeasurementGraph(3, {{0, 0, 1.0}}), InvalidInput);
  CHECK_THROWS_AS(MeasurementGraph(3, {{0, 3, 1.0}}), InvalidInput);
  CHECK_THROWS_AS(MeasurementGraph(3, {{0, 1, 1.0}, {1, 0, 2.0}}), InvalidInput);
  CHECK_THROWS_AS(MeasurementGraph(3, {{0, 1, std::nan("")}}), InvalidInput);
  const MeasurementGraph g(3, {{2, 0, 1.0}});
  CHECK(g.edges()[0].i == 0);
  CHECK(g.edges()[0].j == 2);
  CHECK_FALSE(g.is_complete());
  CHECK(MeasurementGraph::complete(Configuration(gaussian(5, 2, 1))).num_edges() == 10);
}

TEST_CASE("tolerance scale") {
  const Configuration y(Matrix::Constant(2, 2, 1.0));
  CHECK(cost_scale(y) == doctest::Approx(17.0));
  const Objective obj = Objective::masked(MeasurementGraph::complete(y), 5.0);
  CHECK(obj.scale() == 5.0);
  CHECK_THROWS_AS(Objective::masked(MeasurementGraph::complete(y), -1.0), InvalidInput);
  CHECK_THROWS_AS(Objective::masked(MeasurementGraph::complete(y)).ground_truth(), InvalidInput);
  CHECK_THROWS_AS(Objective::complete(y).graph(), InvalidInput);
  CHECK_THROWS_AS(Objective::masked(MeasurementGraph::complete(y)).certificate(y.points()), InvalidInput);
}

}  // TEST_SUITE
