#include "specproj/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace specproj {

SymmetricOperator::SymmetricOperator(Eigen::MatrixXd entries) {
  if (entries.rows() != entries.cols() || entries.rows() < 1) {
    throw std::invalid_argument("SymmetricOperator: entries must be square and nonempty");
  }
  if (!entries.allFinite()) {
    throw std::invalid_argument("SymmetricOperator: entries must be finite");
  }
  const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymTol * scale) {
    throw std::invalid_argument("SymmetricOperator: input is not symmetric within tolerance");
  }
  mat_ = 0.5 * (entries + entries.transpose());
}

SymmetricOperator SymmetricOperator::zero(Eigen::Index p) {
  return SymmetricOperator(Eigen::MatrixXd::Zero(p, p));
}

SymmetricOperator SymmetricOperator::identity(Eigen::Index p) {
  return SymmetricOperator(Eigen::MatrixXd::Identity(p, p));
}

SymmetricOperator SymmetricOperator::from_diagonal(const VectorH& d) {
  return SymmetricOperator(Eigen::MatrixXd(d.asDiagonal()));
}

SymmetricOperator SymmetricOperator::operator+(const SymmetricOperator& o) const {
  return SymmetricOperator(mat_ + o.mat_);
}

SymmetricOperator SymmetricOperator::operator-(const SymmetricOperator& o) const {
  return SymmetricOperator(mat_ - o.mat_);
}

SymmetricOperator SymmetricOperator::scaled(double c) const {
  return SymmetricOperator(c * mat_);
}

double operator_norm(const SymmetricOperator& a) {
  if (a.dim() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("operator_norm: eigensolver failed to converge");
  }
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double trace(const SymmetricOperator& a) { return a.matrix().trace(); }

double hs_norm(const SymmetricOperator& a) { return a.matrix().norm(); }

double effective_rank(const SymmetricOperator& sigma) {
  const double norm = operator_norm(sigma);
  if (norm <= 0.0) {
    throw std::invalid_argument("effective_rank: operator is zero");
  }
  return trace(sigma) / norm;
}

Eigen::MatrixXd tensor_product(const VectorH& u, const VectorH& v) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("tensor_product: dimension mismatch");
  }
  return u * v.transpose();
}

double sup_coordinate_norm(const VectorH& u) {
  return u.size() == 0 ? 0.0 : u.cwiseAbs().maxCoeff();
}

SymEigen sym_eigendecomposition(const SymmetricOperator& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.matrix());
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("sym_eigendecomposition: eigensolver failed to converge");
  }
  // Eigen returns ascending order; flip to descending.
  const Eigen::Index p = a.dim();
  SymEigen out;
  out.values = es.eigenvalues().reverse();
  out.vectors.resize(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    out.vectors.col(j) = es.eigenvectors().col(p - 1 - j);
  }
  return out;
}

}  // namespace specproj
