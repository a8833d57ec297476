#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "specproj/spectral.hpp"

namespace specproj {

// A covariance operator together with its exactly known spectral structure,
// so experiments can compare empirical quantities against ground truth
// without eigensolver noise on the truth side.
struct CovarianceModel {
  enum class Kind { spiked, explicit_spectrum, truncated };

  Kind kind = Kind::explicit_spectrum;
  SymmetricOperator sigma;
  SpectralDecomposition ground_truth;
  bool identity_basis = true;

  // spiked parameters (empty / zero otherwise)
  std::vector<double> spikes;
  double noise_sigma = 0.0;

  Eigen::Index dim() const { return sigma.dim(); }
  // Eigenvector for 1-based cluster r; requires multiplicity 1.
  VectorH eigenvector(int r) const;
};

// Signal strengths s_1 > ... > s_m > 0 on top of an isotropic noise floor:
// eigenvalues s_j^2 + sigma^2 (simple) and sigma^2 with multiplicity p - m.
// With basis_seed set, all eigenvectors are rotated by a seeded random
// orthogonal frame; otherwise they are the standard basis.
CovarianceModel spiked_model(const std::vector<double>& spikes, double sigma, int p,
                             std::optional<std::uint64_t> basis_seed = std::nullopt);

// Same, with an explicit orthonormal frame as eigenbasis (column j carries
// the j-th eigenvalue).
CovarianceModel spiked_model(const std::vector<double>& spikes, double sigma, int p,
                             const Eigen::MatrixXd& basis);

// Arbitrary descending eigenvalues with multiplicities.
CovarianceModel explicit_spectrum_model(const std::vector<double>& values,
                                        const std::vector<int>& multiplicities,
                                        std::optional<std::uint64_t> basis_seed = std::nullopt);

// Compression onto the first q coordinates. All clusters above the bottom one
// must live inside that subspace, and the operator must not couple the kept
// and discarded blocks.
CovarianceModel truncated_model(const CovarianceModel& base, int q);

struct SampleSet {
  Eigen::MatrixXd data;  // one sample per row
  std::uint64_t seed = 0;

  Eigen::Index count() const { return data.rows(); }
  Eigen::Index dim() const { return data.cols(); }
};

// n i.i.d. centered Gaussian vectors with the model covariance, built as
// Q diag(sqrt eigenvalues) z from the ground-truth eigendecomposition.
// Deterministic in (model, n, seed); normals are filled sample-major.
SampleSet sample_gaussian(const CovarianceModel& model, int n, std::uint64_t seed);

// Uncentered second-moment operator n^{-1} sum X_i (x) X_i. The models are
// centered, so no mean is subtracted.
SymmetricOperator sample_covariance(const SampleSet& samples);
SymmetricOperator sample_covariance(const Eigen::MatrixXd& rows);

// Haar-distributed orthogonal matrix, deterministic in the seed.
Eigen::MatrixXd random_orthogonal(int p, std::uint64_t seed);

}  // namespace specproj
