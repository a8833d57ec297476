#pragma once

#include <vector>

#include "specproj/sampling.hpp"

namespace specproj {

inline constexpr double kDebiasFloor = 1e-3;  // smallest usable 1 + b_hat

// Resolves the inherent sign ambiguity of an eigenvector: flips v so that
// <v, reference> >= 0. With no reference (or an exactly orthogonal one) the
// coordinate of largest magnitude is made positive, first index winning ties.
VectorH align_sign(const VectorH& v);
VectorH align_sign(const VectorH& v, const VectorH& reference);

struct EigenvectorEstimate {
  VectorH vector;  // unit norm, sign-aligned
  int r = 0;
};

// Unit vector spanning a rank-one matched projector.
EigenvectorEstimate extract_eigenvector(const SpectralDecomposition& dec_true, int r,
                                        const SymmetricOperator& p_hat);

// <theta_hat - theta, u> computed purely from bilinear forms of
// P_hat - P, without ever forming theta_hat:
//   <theta_hat, theta> = sqrt(1 + <(P_hat - P) theta, theta>),
// valid under the sign convention <theta_hat, theta> >= 0.
double linear_form_representation(const SymmetricOperator& p_hat,
                                  const SymmetricOperator& p,
                                  const VectorH& theta, const VectorH& u);

struct BiasEstimate {
  double b_hat = 0.0;       // <theta, theta'> - 1
  VectorH theta_first;      // half-sample eigenvectors, aligned to each other
  VectorH theta_second;
  bool first_separated = false;
  bool second_separated = false;
};

// Split-sample bias estimator: the sample is halved, each half yields an
// empirical eigenvector for cluster r (which must be simple), signs are
// chosen so the two agree, and b_hat = <theta, theta'> - 1. Separation flags
// of both halves are reported, not silently swallowed.
BiasEstimate estimate_bias_split(const Eigen::MatrixXd& samples, int r,
                                 const SpectralDecomposition& reference);

// theta / sqrt(1 + b_hat). Fails loudly once 1 + b_hat drops below the floor:
// past that point the estimate carries no signal.
VectorH debiased_eigenvector(const VectorH& theta_hat, double b_hat);

// Threshold C * (|S|_inf / gap) * sqrt((t + log p) / n). Only log p enters,
// so p is accepted as any positive real.
double threshold_level(double sigma_norm, double gap, double t, double p, double n,
                       double c_gamma);

// { j : |v_j| > beta }, strict inequality. 0-based indices, ascending.
std::vector<int> recover_support(const VectorH& v, double beta);

// Keep the coordinates in `support`, zero the rest.
VectorH sparse_pca_estimate(const VectorH& v, const std::vector<int>& support);

}  // namespace specproj
