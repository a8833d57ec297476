#pragma once

#include <complex>
#include <vector>

#include "specproj/linalg.hpp"

namespace specproj {

inline constexpr double kDefaultClusterTol = 1e-8;   // relative to max(1, |S|_inf)
inline constexpr double kProjTol = 1e-9;
inline constexpr double kReconTol = 1e-9;
inline constexpr double kResolventTol = 1e-9;        // relative distance to spectrum

// One distinct eigenvalue: its value, multiplicity, the (consecutive,
// 0-based) positions it occupies in the sorted with-multiplicity list, and
// the orthogonal projector onto its eigenspace.
struct EigenCluster {
  int index = 0;  // 1-based rank, descending by value
  double value = 0.0;
  int multiplicity = 0;
  std::vector<int> members;
  SymmetricOperator projector;
};

// Eigenvalue clustering of a symmetric operator: distinct eigenvalues in
// strictly decreasing order, each with projector and spectral gap. The gap of
// cluster r is min(g_{r-1}, g_r) with g_r the distance to the next distinct
// eigenvalue below; for the smallest cluster the "next" eigenvalue is taken
// to be 0 when its value is positive (the natural finite-dimensional stand-in
// for a spectrum accumulating at zero), otherwise the upper gap is used.
class SpectralDecomposition {
 public:
  SpectralDecomposition() = default;

  const SymmetricOperator& source() const { return source_; }
  Eigen::Index dim() const { return eigenvalues_.size(); }
  const VectorH& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }
  const std::vector<EigenCluster>& clusters() const { return clusters_; }
  int cluster_count() const { return static_cast<int>(clusters_.size()); }

  const EigenCluster& cluster(int r) const;  // r is 1-based
  double gap(int r) const;                   // \bar g_r, 1-based

  // C_r = sum_{s != r} (mu_r - mu_s)^{-1} P_s.
  SymmetricOperator reduced_resolvent(int r) const;

  friend SpectralDecomposition decompose(const SymmetricOperator&, double);
  friend SpectralDecomposition decompose_from_eigenpairs(const SymmetricOperator&,
                                                         const VectorH&,
                                                         const Eigen::MatrixXd&, double);

 private:
  SymmetricOperator source_;
  VectorH eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  std::vector<EigenCluster> clusters_;
  std::vector<double> gaps_;
};

SpectralDecomposition decompose(const SymmetricOperator& sigma,
                                double cluster_tol = kDefaultClusterTol);

// Clustering of eigenpairs known exactly by construction (model builders use
// this so ground truth carries no eigensolver noise). `values` must be
// descending; columns of `vectors` are the matching orthonormal eigenvectors.
SpectralDecomposition decompose_from_eigenpairs(const SymmetricOperator& source,
                                                const VectorH& values,
                                                const Eigen::MatrixXd& vectors,
                                                double cluster_tol = kDefaultClusterTol);

double spectral_gap(const SpectralDecomposition& dec, int r);

// (S - eta I)^{-1} for complex eta off the spectrum.
Eigen::MatrixXcd resolvent(const SymmetricOperator& sigma, std::complex<double> eta);

// Empirical counterpart of a true cluster: the projector built from the
// empirical eigenvectors occupying the same sorted positions. `separated`
// records whether |E|_inf < gap_r / 2, the regime in which this positional
// matching provably tracks the true eigenspace.
struct MatchedProjector {
  SymmetricOperator projector;
  bool separated = false;
};

std::vector<MatchedProjector> match_clusters(const SpectralDecomposition& dec_true,
                                             const SymmetricOperator& sigma_hat);

}  // namespace specproj
