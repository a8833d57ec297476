#pragma once

#include "specproj/spectral.hpp"

namespace specproj {

inline constexpr double kImagTol = 1e-8;
inline constexpr int kDefaultContourNodes = 64;

// Certified bounds for how far an empirical spectral projector can drift:
// |P_hat - P|_inf <= 4 |E|_inf / gap (valid unconditionally) and
// |S(E)|_inf <= 14 (|E|_inf / gap)^2 for the second-order remainder.
struct PerturbationBounds {
  double projector_bound = 0.0;
  double remainder_bound = 0.0;
  bool separated = false;
};

PerturbationBounds perturbation_bounds(double norm_e, double gap);
PerturbationBounds perturbation_bounds(const SpectralDecomposition& dec, int r,
                                       const SymmetricOperator& e);

// First-order term L_r(E) = C_r E P_r + P_r E C_r.
SymmetricOperator linear_term(const SpectralDecomposition& dec, int r,
                              const SymmetricOperator& e);

// Second-order remainder S_r(E) = (P_hat_r - P_r) - L_r(E), exact by
// construction at finite dimension.
SymmetricOperator remainder_term(const SpectralDecomposition& dec, int r,
                                 const SymmetricOperator& e,
                                 const SymmetricOperator& p_hat);

// Full split of P_hat_r - P_r into linear term, remainder and certificates.
struct PerturbationDecomposition {
  SymmetricOperator linear;
  SymmetricOperator remainder;
  double norm_e = 0.0;
  double gap = 0.0;
  PerturbationBounds bounds;
};

PerturbationDecomposition decompose_perturbation(const SpectralDecomposition& dec_true,
                                                 int r,
                                                 const SymmetricOperator& sigma_hat);

// Closed integration contour in the complex plane. A circle is integrated by
// the periodic trapezoidal rule (spectrally accurate for the analytic
// integrand); a stadium — the locus at fixed clearance from a real interval —
// is split into two semicircular arcs and two straight segments, integrated
// piecewise by Gauss-Legendre with nodes allocated proportionally to arc
// length.
struct ContourSpec {
  enum class Kind { circle, stadium };
  Kind kind = Kind::circle;
  double center = 0.0;     // circle
  double radius = 0.0;     // circle
  double interval_lo = 0.0;  // stadium
  double interval_hi = 0.0;  // stadium
  double clearance = 0.0;    // stadium
  int nodes = kDefaultContourNodes;

  static ContourSpec circle(double center, double radius, int nodes = kDefaultContourNodes);
  static ContourSpec stadium(double lo, double hi, double clearance,
                             int nodes = kDefaultContourNodes);
};

struct ContourResult {
  SymmetricOperator value;
  double imag_residual = 0.0;  // largest leftover imaginary entry, diagnostic
};

// -(2 pi i)^{-1} times the contour integral of the resolvent: the orthogonal
// projector onto the eigenspaces enclosed by the contour.
ContourResult riesz_projector(const SymmetricOperator& sigma, const ContourSpec& contour);

// (2 pi i)^{-1} times the contour integral of R(eta) E R(eta); equals the
// first-order term of the enclosed cluster(s).
ContourResult contour_linear_term(const SymmetricOperator& sigma,
                                  const SymmetricOperator& e,
                                  const ContourSpec& contour);

}  // namespace specproj
