#include <doctest.h>

#include <cmath>

#include "specproj/linalg.hpp"
#include "specproj/rng.hpp"

using namespace specproj;

namespace {

Eigen::MatrixXd random_symmetric(int p, std::uint64_t seed, double scale = 1.0) {
  CounterRng rng(CounterRng::mix(seed));
  Eigen::MatrixXd g(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) g(i, j) = scale * rng.normal();
  }
  return 0.5 * (g + g.transpose());
}

// Independent largest-|eigenvalue| estimate: power iteration on A^2.
double power_iteration_abs_max(const Eigen::MatrixXd& a, std::uint64_t seed) {
  CounterRng rng(CounterRng::mix(seed));
  Eigen::VectorXd v(a.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  v.normalize();
  const Eigen::MatrixXd a2 = a * a;
  double lambda = 0.0;
  for (int it = 0; it < 20000; ++it) {
    Eigen::VectorXd w = a2 * v;
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    w /= next;
    if (std::abs(next - lambda) <= 1e-13 * std::max(1.0, next)) {
      lambda = next;
      break;
    }
    lambda = next;
    v = w;
  }
  return std::sqrt(lambda);
}

}  // namespace

TEST_CASE("operator norm on fixed operators") {
  VectorH d(3);
  d << 3.0, 1.0, 2.0;
  CHECK(operator_norm(SymmetricOperator::from_diagonal(d)) == doctest::Approx(3.0));
  CHECK(operator_norm(SymmetricOperator::zero(4)) == doctest::Approx(0.0));
}

TEST_CASE("operator norm matches a power-iteration oracle on random operators") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SymmetricOperator a{random_symmetric(5, seed)};
    const double oracle = power_iteration_abs_max(a.matrix(), seed + 1000);
    CHECK(operator_norm(a) == doctest::Approx(oracle).epsilon(1e-8));
  }
}

TEST_CASE("trace and Hilbert-Schmidt norm") {
  VectorH d(3);
  d << 1.0, 2.0, 3.0;
  const SymmetricOperator a = SymmetricOperator::from_diagonal(d);
  CHECK(trace(a) == doctest::Approx(6.0));
  CHECK(hs_norm(a) == doctest::Approx(std::sqrt(14.0)));

  VectorH u(4);
  u << 0.5, -1.5, 2.0, 0.25;
  const SymmetricOperator uu{tensor_product(u, u)};
  CHECK(trace(uu) == doctest::Approx(u.squaredNorm()));

  // Squared HS norm equals the eigenvalue sum of squares.
  const SymmetricOperator r{random_symmetric(7, 3)};
  const SymEigen eig = sym_eigendecomposition(r);
  CHECK(hs_norm(r) * hs_norm(r) ==
        doctest::Approx(eig.values.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("effective rank") {
  CHECK(effective_rank(SymmetricOperator::identity(7)) == doctest::Approx(7.0));
  VectorH d(3);
  d << 2.0, 1.0, 1.0;
  CHECK(effective_rank(SymmetricOperator::from_diagonal(d)) == doctest::Approx(2.0));
  // One unit spike over a unit noise floor in dimension 10.
  VectorH s(10);
  s.setOnes();
  s[0] = 2.0;
  CHECK(effective_rank(SymmetricOperator::from_diagonal(s)) == doctest::Approx(5.5));
  CHECK_THROWS_AS(effective_rank(SymmetricOperator::zero(3)), std::invalid_argument);
}

TEST_CASE("effective rank is scale invariant and within [1, rank]") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Eigen::MatrixXd g = random_symmetric(6, seed);
    SymmetricOperator psd{Eigen::MatrixXd(g * g.transpose())};
    const double r = effective_rank(psd);
    CHECK(r >= 1.0);
    CHECK(r <= 6.0 + 1e-12);
    CHECK(effective_rank(psd.scaled(3.7)) == doctest::Approx(r).epsilon(1e-12));
  }
}

TEST_CASE("tensor product acts as (u (x) v) x = <v, x> u") {
  const VectorH e1 = VectorH::Unit(3, 0);
  const VectorH e2 = VectorH::Unit(3, 1);
  const Eigen::MatrixXd t = tensor_product(e1, e2);
  CHECK((t * e2 - e1).norm() == doctest::Approx(0.0));
  CHECK((t * e1).norm() == doctest::Approx(0.0));

  CounterRng rng(5);
  VectorH u(4), v(4);
  for (int i = 0; i < 4; ++i) {
    u[i] = rng.normal();
    v[i] = rng.normal();
  }
  CHECK(tensor_product(u, v).trace() == doctest::Approx(u.dot(v)));
  CHECK_THROWS_AS(tensor_product(u, e1), std::invalid_argument);
}

TEST_CASE("sup coordinate norm") {
  VectorH v(3);
  v << 0.3, -0.7, 0.1;
  CHECK(sup_coordinate_norm(v) == doctest::Approx(0.7));
  CHECK(sup_coordinate_norm(VectorH::Zero(5)) == doctest::Approx(0.0));
  CounterRng rng(9);
  VectorH u(20);
  for (int i = 0; i < 20; ++i) u[i] = rng.normal();
  double scan = 0.0;
  for (int i = 0; i < 20; ++i) scan = std::max(scan, std::abs(u[i]));
  CHECK(sup_coordinate_norm(u) == doctest::Approx(scan));
}

TEST_CASE("eigendecomposition orders, reconstructs and stays orthonormal") {
  VectorH d(3);
  d << 1.0, 5.0, 3.0;
  const SymEigen fixed = sym_eigendecomposition(SymmetricOperator::from_diagonal(d));
  CHECK(fixed.values[0] == doctest::Approx(5.0));
  CHECK(fixed.values[1] == doctest::Approx(3.0));
  CHECK(fixed.values[2] == doctest::Approx(1.0));

  const SymEigen id = sym_eigendecomposition(SymmetricOperator::identity(4));
  CHECK((id.values.array() - 1.0).abs().maxCoeff() == doctest::Approx(0.0));

  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    SymmetricOperator a{random_symmetric(20, seed)};
    const SymEigen eig = sym_eigendecomposition(a);
    const Eigen::MatrixXd recon =
        eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
    const double norm = operator_norm(a);
    CHECK((recon - a.matrix()).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, norm));
    const Eigen::MatrixXd gram = eig.vectors.transpose() * eig.vectors;
    CHECK((gram - Eigen::MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("norm comparisons hold on random operators") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int p = 2 + static_cast<int>(seed % 7);
    SymmetricOperator a{random_symmetric(p, seed)};
    const double op = operator_norm(a);
    const double hs = hs_norm(a);
    CHECK(op <= hs + 1e-12);
    CHECK(hs <= std::sqrt(static_cast<double>(p)) * op + 1e-12);
  }
}

TEST_CASE("construction symmetrizes small asymmetry and rejects bad input") {
  Eigen::MatrixXd near(2, 2);
  near << 1.0, 0.5 + 1e-14, 0.5, 2.0;
  const SymmetricOperator a{near};
  CHECK(a(0, 1) == doctest::Approx(a(1, 0)));

  Eigen::MatrixXd skew(2, 2);
  skew << 1.0, 0.5, -0.5, 2.0;
  CHECK_THROWS_AS(SymmetricOperator{skew}, std::invalid_argument);

  Eigen::MatrixXd inf(2, 2);
  inf << 1.0, 0.0, 0.0, std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(SymmetricOperator{inf}, std::invalid_argument);

  Eigen::MatrixXd rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(SymmetricOperator{rect}, std::invalid_argument);
}
