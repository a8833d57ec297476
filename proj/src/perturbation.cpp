#include "specproj/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace specproj {

namespace {

using Complex = std::complex<double>;

struct QuadNode {
  Complex eta;
  Complex weight;  // includes d eta / d parameter
};

// Gauss-Legendre nodes/weights on [-1,1] via the Golub-Welsch tridiagonal
// eigenproblem.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = es.eigenvalues()[i];
    const double q0 = es.eigenvectors()(0, i);
    w[i] = 2.0 * q0 * q0;
  }
}

void append_segment(std::vector<QuadNode>& nodes, Complex from, Complex to, int n) {
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  const Complex mid = 0.5 * (from + to);
  const Complex half = 0.5 * (to - from);
  for (int i = 0; i < n; ++i) {
    nodes.push_back({mid + half * x[i], half * w[i]});
  }
}

// Arc of |eta - center| = radius from angle phi0 to phi1 (counter-clockwise).
void append_arc(std::vector<QuadNode>& nodes, Complex center, double radius,
                double phi0, double phi1, int n) {
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  const double mid = 0.5 * (phi0 + phi1);
  const double half = 0.5 * (phi1 - phi0);
  for (int i = 0; i < n; ++i) {
    const double phi = mid + half * x[i];
    const Complex e = std::polar(radius, phi);
    nodes.push_back({center + e, Complex(0.0, 1.0) * e * (half * w[i])});
  }
}

std::vector<QuadNode> contour_nodes(const ContourSpec& c) {
  std::vector<QuadNode> nodes;
  if (c.kind == ContourSpec::Kind::circle) {
    // Periodic trapezoid: equispaced angles, equal weights.
    const int n = c.nodes;
    nodes.reserve(n);
    for (int k = 0; k < n; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / n;
      const Complex e = std::polar(c.radius, phi);
      nodes.push_back({c.center + e, Complex(0.0, 1.0) * e * (2.0 * std::numbers::pi / n)});
    }
    return nodes;
  }

  // Nodes are split between the four pieces in proportion to how hard each is
  // to integrate: the reciprocal log of its Bernstein ellipse parameter, i.e.
  // the number of Gauss nodes needed per digit. For the caps the binding pole
  // is the exterior eigenvalue at distance >= 2 * clearance from the cap
  // center (the canonical contour keeps the rest of the spectrum a full gap
  // away); for the straight runs it is the enclosed eigenvalue under either
  // endpoint, at perpendicular distance = clearance.
  const double len_seg = c.interval_hi - c.interval_lo;
  const auto rho_log = [](std::complex<double> z) {
    const std::complex<double> root = std::sqrt(z * z - 1.0);
    return std::log(std::max(std::abs(z + root), std::abs(z - root)));
  };
  const double y_arc = (2.0 / std::numbers::pi) * std::log(2.0);
  const double w_arc = 1.0 / std::log(y_arc + std::sqrt(1.0 + y_arc * y_arc));
  const double w_seg =
      len_seg > 0.0 ? 1.0 / rho_log({1.0, 2.0 * c.clearance / len_seg}) : 0.0;
  const double total = 2.0 * (w_arc + w_seg);
  const auto alloc = [&](double w) {
    return std::max(4, static_cast<int>(std::lround(c.nodes * w / total)));
  };
  const int n_arc = alloc(w_arc);
  const int n_seg = len_seg > 0.0 ? alloc(w_seg) : 0;

  const Complex up(0.0, c.clearance);
  // Right cap, top run, left cap, bottom run.
  append_arc(nodes, Complex(c.interval_hi, 0.0), c.clearance,
             -0.5 * std::numbers::pi, 0.5 * std::numbers::pi, n_arc);
  if (n_seg > 0) {
    append_segment(nodes, Complex(c.interval_hi, 0.0) + up,
                   Complex(c.interval_lo, 0.0) + up, n_seg);
  }
  append_arc(nodes, Complex(c.interval_lo, 0.0), c.clearance,
             0.5 * std::numbers::pi, 1.5 * std::numbers::pi, n_arc);
  if (n_seg > 0) {
    append_segment(nodes, Complex(c.interval_lo, 0.0) - up,
                   Complex(c.interval_hi, 0.0) - up, n_seg);
  }
  return nodes;
}

// Exact distance from eigenvalue lambda (real) to the contour curve.
double distance_to_contour(double lambda, const ContourSpec& c) {
  if (c.kind == ContourSpec::Kind::circle) {
    return std::abs(std::abs(lambda - c.center) - c.radius);
  }
  double d_interval = 0.0;
  if (lambda < c.interval_lo) d_interval = c.interval_lo - lambda;
  if (lambda > c.interval_hi) d_interval = lambda - c.interval_hi;
  return std::abs(d_interval - c.clearance);
}

void check_contour_clear(const VectorH& eigenvalues, const ContourSpec& c) {
  const double scale = std::max(1.0, eigenvalues.cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
    if (distance_to_contour(eigenvalues[j], c) <= kResolventTol * scale) {
      throw std::domain_error("contour passes too close to an eigenvalue");
    }
  }
}

ContourResult finalize(const Eigen::MatrixXcd& acc) {
  Eigen::MatrixXd real = acc.real();
  const double resid = acc.imag().cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, real.cwiseAbs().maxCoeff());
  if (resid > kImagTol * scale) {
    throw std::runtime_error("contour quadrature: imaginary residual exceeds tolerance");
  }
  ContourResult out;
  out.value = SymmetricOperator(0.5 * (real + real.transpose()));
  out.imag_residual = resid;
  return out;
}

}  // namespace

PerturbationBounds perturbation_bounds(double norm_e, double gap) {
  PerturbationBounds b;
  b.projector_bound = 4.0 * norm_e / gap;
  b.remainder_bound = 14.0 * (norm_e / gap) * (norm_e / gap);
  b.separated = norm_e < 0.5 * gap;
  return b;
}

PerturbationBounds perturbation_bounds(const SpectralDecomposition& dec, int r,
                                       const SymmetricOperator& e) {
  return perturbation_bounds(operator_norm(e), spectral_gap(dec, r));
}

SymmetricOperator linear_term(const SpectralDecomposition& dec, int r,
                              const SymmetricOperator& e) {
  if (dec.dim() != e.dim()) {
    throw std::invalid_argument("linear_term: dimension mismatch");
  }
  const Eigen::MatrixXd& p = dec.cluster(r).projector.matrix();
  const Eigen::MatrixXd c = dec.reduced_resolvent(r).matrix();
  Eigen::MatrixXd cep = c * e.matrix() * p;
  return SymmetricOperator(cep + cep.transpose());
}

SymmetricOperator remainder_term(const SpectralDecomposition& dec, int r,
                                 const SymmetricOperator& e,
                                 const SymmetricOperator& p_hat) {
  return p_hat - dec.cluster(r).projector - linear_term(dec, r, e);
}

PerturbationDecomposition decompose_perturbation(const SpectralDecomposition& dec_true,
                                                 int r,
                                                 const SymmetricOperator& sigma_hat) {
  const SymmetricOperator e = sigma_hat - dec_true.source();
  std::vector<MatchedProjector> matched = match_clusters(dec_true, sigma_hat);
  const SymmetricOperator& p_hat = matched[static_cast<std::size_t>(r - 1)].projector;

  PerturbationDecomposition out;
  out.linear = linear_term(dec_true, r, e);
  out.remainder = p_hat - dec_true.cluster(r).projector - out.linear;
  out.norm_e = operator_norm(e);
  out.gap = spectral_gap(dec_true, r);
  out.bounds = perturbation_bounds(out.norm_e, out.gap);
  return out;
}

ContourSpec ContourSpec::circle(double center, double radius, int nodes) {
  if (radius <= 0.0) throw std::invalid_argument("ContourSpec: radius must be positive");
  if (nodes < 8) throw std::invalid_argument("ContourSpec: need at least 8 nodes");
  ContourSpec c;
  c.kind = Kind::circle;
  c.center = center;
  c.radius = radius;
  c.nodes = nodes;
  return c;
}

ContourSpec ContourSpec::stadium(double lo, double hi, double clearance, int nodes) {
  if (clearance <= 0.0) throw std::invalid_argument("ContourSpec: clearance must be positive");
  if (hi < lo) throw std::invalid_argument("ContourSpec: empty interval");
  if (nodes < 8) throw std::invalid_argument("ContourSpec: need at least 8 nodes");
  ContourSpec c;
  c.kind = Kind::stadium;
  c.interval_lo = lo;
  c.interval_hi = hi;
  c.clearance = clearance;
  c.nodes = nodes;
  return c;
}

ContourResult riesz_projector(const SymmetricOperator& sigma, const ContourSpec& contour) {
  check_contour_clear(sym_eigendecomposition(sigma).values, contour);
  const Eigen::Index p = sigma.dim();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(p, p);
  const Eigen::MatrixXcd base = sigma.matrix().cast<Complex>();

  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(p, p);
  for (const QuadNode& node : contour_nodes(contour)) {
    Eigen::MatrixXcd res = (base - node.eta * id).partialPivLu().solve(id);
    acc.noalias() += node.weight * res;
  }
  acc *= Complex(0.0, 1.0) / (2.0 * std::numbers::pi);  // -1/(2 pi i)
  return finalize(acc);
}

ContourResult contour_linear_term(const SymmetricOperator& sigma,
                                  const SymmetricOperator& e,
                                  const ContourSpec& contour) {
  if (sigma.dim() != e.dim()) {
    throw std::invalid_argument("contour_linear_term: dimension mismatch");
  }
  check_contour_clear(sym_eigendecomposition(sigma).values, contour);
  const Eigen::Index p = sigma.dim();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(p, p);
  const Eigen::MatrixXcd base = sigma.matrix().cast<Complex>();
  const Eigen::MatrixXcd ec = e.matrix().cast<Complex>();

  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(p, p);
  for (const QuadNode& node : contour_nodes(contour)) {
    Eigen::MatrixXcd res = (base - node.eta * id).partialPivLu().solve(id);
    acc.noalias() += node.weight * (res * ec * res);
  }
  acc *= Complex(0.0, -1.0) / (2.0 * std::numbers::pi);  // +1/(2 pi i)
  return finalize(acc);
}

}  // namespace specproj
