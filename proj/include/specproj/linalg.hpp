#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace specproj {

using VectorH = Eigen::VectorXd;

inline constexpr double kSymTol = 1e-12;

// Dense real symmetric operator. Construction symmetrizes via (A + A^T)/2 and
// rejects non-finite entries or asymmetry beyond kSymTol relative to the
// largest entry (sample covariances accumulate rounding asymmetry, genuinely
// non-symmetric input is a caller bug). Immutable after construction.
class SymmetricOperator {
 public:
  SymmetricOperator() = default;
  explicit SymmetricOperator(Eigen::MatrixXd entries);

  static SymmetricOperator zero(Eigen::Index p);
  static SymmetricOperator identity(Eigen::Index p);
  static SymmetricOperator from_diagonal(const VectorH& d);

  Eigen::Index dim() const { return mat_.rows(); }
  const Eigen::MatrixXd& matrix() const { return mat_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return mat_(i, j); }

  VectorH apply(const VectorH& x) const { return mat_ * x; }
  double bilinear(const VectorH& u, const VectorH& v) const { return u.dot(mat_ * v); }

  SymmetricOperator operator+(const SymmetricOperator& o) const;
  SymmetricOperator operator-(const SymmetricOperator& o) const;
  SymmetricOperator scaled(double c) const;

 private:
  Eigen::MatrixXd mat_;
};

// Largest absolute eigenvalue, sup_{|u|<=1} |Au|.
double operator_norm(const SymmetricOperator& a);
double trace(const SymmetricOperator& a);
// Frobenius / Hilbert-Schmidt norm.
double hs_norm(const SymmetricOperator& a);

// tr(S) / |S|_inf; requires S PSD and nonzero. Lies in [1, rank(S)].
double effective_rank(const SymmetricOperator& sigma);

// (u (x) v) x = <v, x> u. Not symmetric in general, hence a plain matrix.
Eigen::MatrixXd tensor_product(const VectorH& u, const VectorH& v);

double sup_coordinate_norm(const VectorH& u);

struct SymEigen {
  VectorH values;          // descending, with multiplicity
  Eigen::MatrixXd vectors; // column j is the eigenvector of values[j]
};

// Full dense eigendecomposition; the single source of truth for every norm
// and projector in this library so they stay mutually consistent.
SymEigen sym_eigendecomposition(const SymmetricOperator& a);

}  // namespace specproj
