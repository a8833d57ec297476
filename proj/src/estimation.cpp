#include "specproj/estimation.hpp"

#include <cmath>
#include <stdexcept>

namespace specproj {

namespace {

VectorH flip_largest_coordinate_positive(const VectorH& v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (std::abs(v[j]) > best_abs) {
      best_abs = std::abs(v[j]);
      best = j;
    }
  }
  return v[best] < 0.0 ? VectorH(-v) : v;
}

}  // namespace

VectorH align_sign(const VectorH& v) {
  if (v.norm() == 0.0) throw std::invalid_argument("align_sign: zero vector");
  return flip_largest_coordinate_positive(v);
}

VectorH align_sign(const VectorH& v, const VectorH& reference) {
  if (v.norm() == 0.0) throw std::invalid_argument("align_sign: zero vector");
  const double inner = v.dot(reference);
  if (inner > 0.0) return v;
  if (inner < 0.0) return -v;
  return flip_largest_coordinate_positive(v);
}

EigenvectorEstimate extract_eigenvector(const SpectralDecomposition& dec_true, int r,
                                        const SymmetricOperator& p_hat) {
  const EigenCluster& cluster = dec_true.cluster(r);
  if (cluster.multiplicity != 1) {
    throw std::domain_error("extract_eigenvector: cluster has multiplicity > 1");
  }
  // Rank-one projector: the unit range vector is any nonzero column,
  // normalized. Take the dominant eigenvector for numerical robustness.
  SymEigen eig = sym_eigendecomposition(p_hat);
  VectorH theta = eig.vectors.col(0);
  const VectorH reference = dec_true.eigenvectors().col(cluster.members.front());
  EigenvectorEstimate out;
  out.vector = align_sign(theta, reference);
  out.r = r;
  return out;
}

double linear_form_representation(const SymmetricOperator& p_hat,
                                  const SymmetricOperator& p,
                                  const VectorH& theta, const VectorH& u) {
  const VectorH diff_theta = p_hat.apply(theta) - p.apply(theta);
  const double dtt = diff_theta.dot(theta);
  if (1.0 + dtt <= 0.0) {
    throw std::domain_error(
        "linear_form_representation: empirical eigenvector orthogonal to the truth");
  }
  const double root = std::sqrt(1.0 + dtt);
  return (diff_theta.dot(u) - (root - 1.0) * theta.dot(u)) / root;
}

BiasEstimate estimate_bias_split(const Eigen::MatrixXd& samples, int r,
                                 const SpectralDecomposition& reference) {
  const Eigen::Index total = samples.rows();
  if (total < 2 || total % 2 != 0) {
    throw std::invalid_argument("estimate_bias_split: need an even number of samples");
  }
  const Eigen::Index half = total / 2;
  SymmetricOperator cov_first = sample_covariance(Eigen::MatrixXd(samples.topRows(half)));
  SymmetricOperator cov_second = sample_covariance(Eigen::MatrixXd(samples.bottomRows(half)));

  std::vector<MatchedProjector> first = match_clusters(reference, cov_first);
  std::vector<MatchedProjector> second = match_clusters(reference, cov_second);
  const std::size_t idx = static_cast<std::size_t>(r - 1);

  EigenvectorEstimate a = extract_eigenvector(reference, r, first[idx].projector);
  EigenvectorEstimate b = extract_eigenvector(reference, r, second[idx].projector);

  BiasEstimate out;
  out.theta_first = a.vector;
  out.theta_second = align_sign(b.vector, a.vector);  // force <theta, theta'> >= 0
  out.b_hat = out.theta_first.dot(out.theta_second) - 1.0;
  out.first_separated = first[idx].separated;
  out.second_separated = second[idx].separated;
  return out;
}

VectorH debiased_eigenvector(const VectorH& theta_hat, double b_hat) {
  const double denom = 1.0 + b_hat;
  if (denom <= kDebiasFloor) {
    throw std::domain_error("debiased_eigenvector: 1 + b_hat below usable floor");
  }
  return theta_hat / std::sqrt(denom);
}

double threshold_level(double sigma_norm, double gap, double t, double p, double n,
                       double c_gamma) {
  return c_gamma * (sigma_norm / gap) * std::sqrt((t + std::log(p)) / n);
}

std::vector<int> recover_support(const VectorH& v, double beta) {
  if (beta < 0.0) throw std::invalid_argument("recover_support: negative threshold");
  std::vector<int> out;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (std::abs(v[j]) > beta) out.push_back(static_cast<int>(j));
  }
  return out;
}

VectorH sparse_pca_estimate(const VectorH& v, const std::vector<int>& support) {
  VectorH out = VectorH::Zero(v.size());
  for (int j : support) {
    if (j < 0 || j >= v.size()) throw std::out_of_range("sparse_pca_estimate: bad index");
    out[j] = v[j];
  }
  return out;
}

}  // namespace specproj
