#include "specproj/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace specproj {

const EigenCluster& SpectralDecomposition::cluster(int r) const {
  if (r < 1 || r > cluster_count()) {
    throw std::out_of_range("SpectralDecomposition: cluster index out of range");
  }
  return clusters_[static_cast<std::size_t>(r - 1)];
}

double SpectralDecomposition::gap(int r) const {
  if (r < 1 || r > cluster_count()) {
    throw std::out_of_range("SpectralDecomposition: cluster index out of range");
  }
  return gaps_[static_cast<std::size_t>(r - 1)];
}

SymmetricOperator SpectralDecomposition::reduced_resolvent(int r) const {
  const EigenCluster& target = cluster(r);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(dim(), dim());
  for (const EigenCluster& c : clusters_) {
    if (c.index == target.index) continue;
    acc += c.projector.matrix() / (target.value - c.value);
  }
  return SymmetricOperator(acc);
}

SpectralDecomposition decompose_from_eigenpairs(const SymmetricOperator& source,
                                                const VectorH& values,
                                                const Eigen::MatrixXd& vectors,
                                                double cluster_tol) {
  const Eigen::Index p = source.dim();
  if (values.size() != p || vectors.rows() != p || vectors.cols() != p) {
    throw std::invalid_argument("decompose_from_eigenpairs: shape mismatch");
  }
  for (Eigen::Index j = 0; j + 1 < p; ++j) {
    if (values[j] < values[j + 1]) {
      throw std::invalid_argument("decompose_from_eigenpairs: values must be descending");
    }
  }
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  const double merge = cluster_tol * scale;

  SpectralDecomposition dec;
  dec.source_ = source;
  dec.eigenvalues_ = values;
  dec.eigenvectors_ = vectors;

  Eigen::Index start = 0;
  while (start < p) {
    Eigen::Index stop = start + 1;
    while (stop < p && values[stop - 1] - values[stop] <= merge) ++stop;

    EigenCluster c;
    c.index = static_cast<int>(dec.clusters_.size()) + 1;
    c.multiplicity = static_cast<int>(stop - start);
    c.value = values.segment(start, stop - start).mean();
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = start; j < stop; ++j) {
      c.members.push_back(static_cast<int>(j));
      proj.noalias() += vectors.col(j) * vectors.col(j).transpose();
    }
    c.projector = SymmetricOperator(proj);
    dec.clusters_.push_back(std::move(c));
    start = stop;
  }

  // Spectral gaps; the phantom eigenvalue below the smallest positive cluster
  // is 0.
  const int R = dec.cluster_count();
  std::vector<double> down(static_cast<std::size_t>(R), 0.0);
  for (int r = 0; r + 1 < R; ++r) {
    down[r] = dec.clusters_[r].value - dec.clusters_[r + 1].value;
  }
  const double mu_last = dec.clusters_[static_cast<std::size_t>(R - 1)].value;
  bool last_has_down = mu_last > 0.0;
  if (last_has_down) down[static_cast<std::size_t>(R - 1)] = mu_last;

  dec.gaps_.resize(static_cast<std::size_t>(R));
  for (int r = 0; r < R; ++r) {
    const bool has_up = r > 0;
    const bool has_down = (r + 1 < R) || last_has_down;
    if (!has_up && !has_down) {
      dec.gaps_[r] = std::numeric_limits<double>::quiet_NaN();  // reported lazily by gap()
    } else if (!has_up) {
      dec.gaps_[r] = down[r];
    } else if (!has_down) {
      dec.gaps_[r] = down[r - 1];
    } else {
      dec.gaps_[r] = std::min(down[r - 1], down[r]);
    }
  }
  if (R == 1 && !last_has_down) {
    dec.gaps_[0] = std::numeric_limits<double>::quiet_NaN();
  }
  return dec;
}

SpectralDecomposition decompose(const SymmetricOperator& sigma, double cluster_tol) {
  SymEigen eig = sym_eigendecomposition(sigma);
  return decompose_from_eigenpairs(sigma, eig.values, eig.vectors, cluster_tol);
}

double spectral_gap(const SpectralDecomposition& dec, int r) {
  const double g = dec.gap(r);
  if (std::isnan(g)) {
    throw std::domain_error("spectral_gap: single non-positive cluster has no gap");
  }
  return g;
}

Eigen::MatrixXcd resolvent(const SymmetricOperator& sigma, std::complex<double> eta) {
  SymEigen eig = sym_eigendecomposition(sigma);
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  double dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < eig.values.size(); ++j) {
    dist = std::min(dist, std::abs(eta - std::complex<double>(eig.values[j], 0.0)));
  }
  if (dist <= kResolventTol * scale) {
    throw std::domain_error("resolvent: eta too close to the spectrum");
  }
  const Eigen::Index p = sigma.dim();
  Eigen::MatrixXcd shifted = sigma.matrix().cast<std::complex<double>>();
  shifted -= eta * Eigen::MatrixXcd::Identity(p, p);
  return shifted.partialPivLu().solve(Eigen::MatrixXcd::Identity(p, p));
}

std::vector<MatchedProjector> match_clusters(const SpectralDecomposition& dec_true,
                                             const SymmetricOperator& sigma_hat) {
  if (dec_true.dim() != sigma_hat.dim()) {
    throw std::invalid_argument("match_clusters: dimension mismatch");
  }
  SymEigen emp = sym_eigendecomposition(sigma_hat);
  const double norm_e =
      operator_norm(sigma_hat - dec_true.source());
  const Eigen::Index p = sigma_hat.dim();

  std::vector<MatchedProjector> out;
  out.reserve(static_cast<std::size_t>(dec_true.cluster_count()));
  for (const EigenCluster& c : dec_true.clusters()) {
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(p, p);
    for (int j : c.members) {
      proj.noalias() += emp.vectors.col(j) * emp.vectors.col(j).transpose();
    }
    MatchedProjector m;
    m.projector = SymmetricOperator(proj);
    m.separated = norm_e < 0.5 * dec_true.gap(c.index);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace specproj
