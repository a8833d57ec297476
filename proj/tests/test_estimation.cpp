#include <doctest.h>

#include <cmath>

#include "specproj/estimation.hpp"
#include "specproj/rng.hpp"
#include "specproj/verify.hpp"

using namespace specproj;

namespace {

SymmetricOperator diag(std::initializer_list<double> values) {
  VectorH d(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) d[i++] = v;
  return SymmetricOperator::from_diagonal(d);
}

}  // namespace

TEST_CASE("sign alignment") {
  VectorH v(3);
  v << 0.1, -0.9, 0.3;
  VectorH ref(3);
  ref << 0.0, 1.0, 0.0;  // <v, ref> = -0.9 < 0
  const VectorH flipped = align_sign(v, ref);
  CHECK(flipped.dot(ref) > 0.0);

  // Orthogonal reference falls back to the largest-coordinate rule.
  VectorH orth(3);
  orth << 1.0, 0.0, 0.0;
  VectorH w(3);
  w << 0.0, -0.8, 0.6;
  const VectorH tied = align_sign(w, orth);
  CHECK(tied[1] > 0.0);

  // Idempotent.
  const VectorH once = align_sign(v);
  CHECK((align_sign(once) - once).norm() == 0.0);
  CHECK_THROWS_AS(align_sign(VectorH::Zero(3)), std::invalid_argument);
}

TEST_CASE("eigenvector extraction from a matched projector") {
  const SpectralDecomposition truth = decompose(diag({3.0, 1.0}));
  auto matched = match_clusters(truth, diag({3.0, 1.0}));
  const EigenvectorEstimate est = extract_eigenvector(truth, 1, matched[0].projector);
  CHECK(est.vector[0] == doctest::Approx(1.0));
  CHECK(std::abs(est.vector[1]) <= 1e-12);

  const SpectralDecomposition multi = decompose(diag({2.0, 2.0, 1.0}));
  auto m2 = match_clusters(multi, diag({2.0, 2.0, 1.0}));
  CHECK_THROWS_AS(extract_eigenvector(multi, 1, m2[0].projector), std::domain_error);
}

TEST_CASE("extraction recovers the range of a random rank-one projector") {
  CounterRng rng(17);
  VectorH u(6);
  for (int i = 0; i < 6; ++i) u[i] = rng.normal();
  u.normalize();
  const SymmetricOperator proj{Eigen::MatrixXd(u * u.transpose())};
  // Reference decomposition with a simple top cluster.
  const SpectralDecomposition truth = decompose(diag({3.0, 1.0, 1.0, 1.0, 1.0, 1.0}));
  const EigenvectorEstimate est = extract_eigenvector(truth, 1, proj);
  CHECK(std::abs(std::abs(est.vector.dot(u)) - 1.0) <= 1e-10);
}

TEST_CASE("linear form representation equals the direct eigenvector difference") {
  const CovarianceModel model = spiked_model({2.0}, 1.0, 12);
  const VectorH theta = model.eigenvector(1);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const SampleSet s = sample_gaussian(model, 80, CounterRng::derive_stream(5, seed));
    const SymmetricOperator cov = sample_covariance(s);
    auto matched = match_clusters(model.ground_truth, cov);
    if (!matched[0].separated) continue;
    const EigenvectorEstimate est =
        extract_eigenvector(model.ground_truth, 1, matched[0].projector);

    CounterRng rng(CounterRng::mix(seed + 999));
    VectorH u(12);
    for (int i = 0; i < 12; ++i) u[i] = rng.normal();

    const double via_forms = linear_form_representation(
        matched[0].projector, model.ground_truth.cluster(1).projector, theta, u);
    const double direct = (est.vector - theta).dot(u);
    CHECK(via_forms == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("linear form representation edge cases") {
  const SpectralDecomposition truth = decompose(diag({3.0, 1.0}));
  const SymmetricOperator p = truth.cluster(1).projector;
  VectorH theta(2);
  theta << 1.0, 0.0;
  VectorH u(2);
  u << 0.4, -0.3;
  CHECK(linear_form_representation(p, p, theta, u) == doctest::Approx(0.0));

  // u = theta gives sqrt(1 + <(P_hat - P) theta, theta>) - 1.
  Eigen::MatrixXd tilted(2, 2);
  const double c = std::cos(0.3), s = std::sin(0.3);
  tilted << c * c, c * s, c * s, s * s;
  const double dtt = tilted(0, 0) - 1.0;
  CHECK(linear_form_representation(SymmetricOperator{tilted}, p, theta, theta) ==
        doctest::Approx(std::sqrt(1.0 + dtt) - 1.0).epsilon(1e-12));

  // Orthogonal empirical eigenvector: <P_hat theta, theta> = 0 is degenerate.
  Eigen::MatrixXd flipped(2, 2);
  flipped << 0.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(linear_form_representation(SymmetricOperator{flipped}, p, theta, theta),
                  std::domain_error);
}

TEST_CASE("split-sample bias estimate arithmetic") {
  // Identical halves: the two eigenvectors coincide, b_hat = 0.
  const SpectralDecomposition ref = decompose(diag({3.0, 1.0, 1.0}));
  Eigen::MatrixXd rows(4, 3);
  rows << 2.0, 0.1, 0.0, 0.3, 1.0, 0.2, 2.0, 0.1, 0.0, 0.3, 1.0, 0.2;
  const BiasEstimate same = estimate_bias_split(rows, 1, ref);
  CHECK(same.b_hat == doctest::Approx(0.0).epsilon(1e-12));

  // Engineered halves with <theta, theta'> = 0.95.
  const double inner = 0.95;
  VectorH x(3), y(3);
  x << 1.0, 0.0, 0.0;
  y << inner, std::sqrt(1.0 - inner * inner), 0.0;
  Eigen::MatrixXd two(2, 3);
  two.row(0) = 3.0 * x;
  two.row(1) = 3.0 * y;
  const BiasEstimate est = estimate_bias_split(two, 1, ref);
  CHECK(est.b_hat == doctest::Approx(inner - 1.0).epsilon(1e-12));

  Eigen::MatrixXd odd(3, 3);
  odd.setZero();
  CHECK_THROWS_AS(estimate_bias_split(odd, 1, ref), std::invalid_argument);
}

TEST_CASE("b_hat lands in [-1, 0] after alignment") {
  const CovarianceModel model = spiked_model({2.0}, 1.0, 10);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SampleSet s = sample_gaussian(model, 60, CounterRng::derive_stream(21, seed));
    const BiasEstimate est = estimate_bias_split(s.data, 1, model.ground_truth);
    CHECK(est.b_hat <= 1e-12);
    CHECK(est.b_hat >= -1.0 - 1e-12);
  }
}

TEST_CASE("split-sample estimate tracks the Monte Carlo bias oracle") {
  const CovarianceModel model = spiked_model({2.0}, 1.0, 50);
  const int n = 500;
  const BiasReport oracle = mc_expected_projector(model, 1, n, 2000, 901);
  std::vector<double> errs;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const SampleSet s =
        sample_gaussian(model, 2 * n, CounterRng::derive_stream(902, seed));
    const BiasEstimate est = estimate_bias_split(s.data, 1, model.ground_truth);
    errs.push_back(std::abs(est.b_hat - oracle.b_r));
  }
  std::sort(errs.begin(), errs.end());
  const double median = errs[errs.size() / 2];
  CHECK(oracle.b_r < 0.0);
  CHECK(median <= 0.5 * std::abs(oracle.b_r));
}

TEST_CASE("debiasing rescales and fails loudly below the floor") {
  VectorH theta(3);
  theta << 1.0, 0.0, 0.0;
  CHECK((debiased_eigenvector(theta, 0.0) - theta).norm() == 0.0);
  const VectorH stretched = debiased_eigenvector(theta, -0.19);
  CHECK(stretched.norm() == doctest::Approx(1.0 / 0.9));
  CHECK_THROWS_AS(debiased_eigenvector(theta, -1.0), std::domain_error);
}

TEST_CASE("threshold level formula") {
  const double t = std::log(100.0);
  CHECK(threshold_level(2.0, 1.0, t, std::exp(1.0), 100.0, 1.0) ==
        doctest::Approx(2.0 * std::sqrt((t + 1.0) / 100.0)));
  const double base = threshold_level(1.0, 1.0, 3.0, 50.0, 1000.0, 1.0);
  CHECK(threshold_level(1.0, 1.0, 3.0, 50.0, 2000.0, 1.0) ==
        doctest::Approx(base / std::sqrt(2.0)));
  CHECK(threshold_level(1.0, 1.0, 3.0, 50.0, 1000.0, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("support recovery by strict thresholding") {
  VectorH v(4);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0, 0.0;
  CHECK(recover_support(v, 0.1) == std::vector<int>{0, 1});
  CHECK(recover_support(v, 2.0).empty());
  CHECK_THROWS_AS(recover_support(v, -0.1), std::invalid_argument);

  // Zero threshold keeps exactly the nonzero coordinates.
  VectorH w(5);
  w << 0.0, -0.2, 0.0, 1e-300, 0.7;
  CHECK(recover_support(w, 0.0) == std::vector<int>{1, 3, 4});
}

TEST_CASE("sparse masking") {
  VectorH v(3);
  v << 0.7, 0.7, 0.01;
  const VectorH all = sparse_pca_estimate(v, {0, 1, 2});
  CHECK((all - v).norm() == 0.0);
  CHECK(sparse_pca_estimate(v, {}).norm() == 0.0);
  const VectorH masked = sparse_pca_estimate(v, {0, 1});
  CHECK(masked[2] == 0.0);
  CHECK(masked[0] == doctest::Approx(0.7));
  CHECK_THROWS_AS(sparse_pca_estimate(v, {5}), std::out_of_range);
}
