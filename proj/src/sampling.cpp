#include "specproj/sampling.hpp"

#include <cmath>
#include <stdexcept>

#include "specproj/rng.hpp"

namespace specproj {

namespace {

CovarianceModel build_from_basis(CovarianceModel::Kind kind, const VectorH& values,
                                 const Eigen::MatrixXd& basis, bool identity_basis) {
  CovarianceModel model;
  model.kind = kind;
  model.identity_basis = identity_basis;
  Eigen::MatrixXd sigma = basis * values.asDiagonal() * basis.transpose();
  model.sigma = SymmetricOperator(0.5 * (sigma + sigma.transpose()));
  model.ground_truth = decompose_from_eigenpairs(model.sigma, values, basis);
  return model;
}

CovarianceModel build_from_spectrum(CovarianceModel::Kind kind, const VectorH& values,
                                    std::optional<std::uint64_t> basis_seed, int p) {
  const bool identity = !basis_seed.has_value();
  Eigen::MatrixXd basis = identity ? Eigen::MatrixXd::Identity(p, p)
                                   : random_orthogonal(p, *basis_seed);
  return build_from_basis(kind, values, basis, identity);
}

VectorH spiked_values(const std::vector<double>& spikes, double sigma, int p) {
  const int m = static_cast<int>(spikes.size());
  if (m < 1 || m >= p) {
    throw std::invalid_argument("spiked_model: need 1 <= m < p spikes");
  }
  if (sigma <= 0.0) {
    throw std::invalid_argument("spiked_model: noise level must be positive");
  }
  for (int j = 0; j < m; ++j) {
    if (spikes[j] <= 0.0) throw std::invalid_argument("spiked_model: spikes must be positive");
    if (j > 0 && spikes[j] >= spikes[j - 1]) {
      throw std::invalid_argument("spiked_model: spikes must be strictly decreasing");
    }
  }
  VectorH values(p);
  for (int j = 0; j < m; ++j) values[j] = spikes[j] * spikes[j] + sigma * sigma;
  for (int j = m; j < p; ++j) values[j] = sigma * sigma;
  return values;
}

}  // namespace

VectorH CovarianceModel::eigenvector(int r) const {
  const EigenCluster& c = ground_truth.cluster(r);
  if (c.multiplicity != 1) {
    throw std::domain_error("CovarianceModel::eigenvector: cluster has multiplicity > 1");
  }
  return ground_truth.eigenvectors().col(c.members.front());
}

Eigen::MatrixXd random_orthogonal(int p, std::uint64_t seed) {
  CounterRng rng(CounterRng::mix(seed ^ 0xa0761d6478bd642fULL));
  Eigen::MatrixXd g(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix signs so the factorization (and hence the law) is unique.
  for (int j = 0; j < p; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

CovarianceModel spiked_model(const std::vector<double>& spikes, double sigma, int p,
                             std::optional<std::uint64_t> basis_seed) {
  CovarianceModel model = build_from_spectrum(CovarianceModel::Kind::spiked,
                                              spiked_values(spikes, sigma, p),
                                              basis_seed, p);
  model.spikes = spikes;
  model.noise_sigma = sigma;
  return model;
}

CovarianceModel spiked_model(const std::vector<double>& spikes, double sigma, int p,
                             const Eigen::MatrixXd& basis) {
  if (basis.rows() != p || basis.cols() != p) {
    throw std::invalid_argument("spiked_model: basis must be p x p");
  }
  const double ortho =
      (basis.transpose() * basis - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff();
  if (ortho > 1e-10) {
    throw std::invalid_argument("spiked_model: basis is not orthonormal");
  }
  CovarianceModel model = build_from_basis(CovarianceModel::Kind::spiked,
                                           spiked_values(spikes, sigma, p), basis, false);
  model.spikes = spikes;
  model.noise_sigma = sigma;
  return model;
}

CovarianceModel explicit_spectrum_model(const std::vector<double>& values,
                                        const std::vector<int>& multiplicities,
                                        std::optional<std::uint64_t> basis_seed) {
  if (values.empty() || values.size() != multiplicities.size()) {
    throw std::invalid_argument("explicit_spectrum_model: values/multiplicities mismatch");
  }
  int p = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0.0) {
      throw std::invalid_argument("explicit_spectrum_model: eigenvalues must be nonnegative");
    }
    if (i > 0 && values[i] >= values[i - 1]) {
      throw std::invalid_argument("explicit_spectrum_model: values must be strictly decreasing");
    }
    if (multiplicities[i] < 1) {
      throw std::invalid_argument("explicit_spectrum_model: multiplicities must be positive");
    }
    p += multiplicities[i];
  }
  VectorH expanded(p);
  int pos = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (int k = 0; k < multiplicities[i]; ++k) expanded[pos++] = values[i];
  }
  return build_from_spectrum(CovarianceModel::Kind::explicit_spectrum, expanded,
                             basis_seed, p);
}

CovarianceModel truncated_model(const CovarianceModel& base, int q) {
  const Eigen::Index p = base.dim();
  if (q < 1 || q > p) {
    throw std::invalid_argument("truncated_model: subspace dimension out of range");
  }
  if (q == p) return base;

  const double scale = std::max(1.0, base.sigma.matrix().cwiseAbs().maxCoeff());
  // The kept and dropped blocks must not couple, otherwise compression would
  // distort the spectrum.
  const double coupling = base.sigma.matrix().block(q, 0, p - q, q).cwiseAbs().maxCoeff();
  if (coupling > 1e-12 * scale) {
    throw std::invalid_argument("truncated_model: operator couples the kept and dropped blocks");
  }
  // Every cluster above the noise floor must live inside the kept subspace.
  const auto& clusters = base.ground_truth.clusters();
  for (std::size_t r = 0; r + 1 < clusters.size(); ++r) {
    const Eigen::MatrixXd& proj = clusters[r].projector.matrix();
    if (proj.block(q, q, p - q, p - q).cwiseAbs().maxCoeff() > 1e-12) {
      throw std::invalid_argument("truncated_model: a spike eigenspace leaves the kept subspace");
    }
  }

  CovarianceModel model;
  model.kind = CovarianceModel::Kind::truncated;
  model.identity_basis = base.identity_basis;
  model.spikes = base.spikes;
  model.noise_sigma = base.noise_sigma;
  Eigen::MatrixXd block = base.sigma.matrix().topLeftCorner(q, q);
  model.sigma = SymmetricOperator(0.5 * (block + block.transpose()));
  model.ground_truth = decompose(model.sigma);
  return model;
}

SampleSet sample_gaussian(const CovarianceModel& model, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_gaussian: need n >= 1");
  const Eigen::Index p = model.dim();
  CounterRng rng(CounterRng::mix(seed));

  Eigen::MatrixXd z(n, p);
  for (int i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(i, j) = rng.normal();
  }
  const VectorH sqrt_values = model.ground_truth.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  SampleSet out;
  out.seed = seed;
  if (model.identity_basis) {
    out.data = z * sqrt_values.asDiagonal();
  } else {
    out.data = z * sqrt_values.asDiagonal() * model.ground_truth.eigenvectors().transpose();
  }
  return out;
}

SymmetricOperator sample_covariance(const Eigen::MatrixXd& rows) {
  const Eigen::Index n = rows.rows();
  if (n < 1) throw std::invalid_argument("sample_covariance: need at least one sample");
  const Eigen::Index p = rows.cols();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
  acc.selfadjointView<Eigen::Lower>().rankUpdate(rows.transpose(), 1.0 / static_cast<double>(n));
  acc.triangularView<Eigen::StrictlyUpper>() =
      acc.triangularView<Eigen::StrictlyLower>().transpose();
  return SymmetricOperator(acc);
}

SymmetricOperator sample_covariance(const SampleSet& samples) {
  return sample_covariance(samples.data);
}

}  // namespace specproj
