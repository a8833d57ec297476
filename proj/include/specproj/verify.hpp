#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "specproj/perturbation.hpp"
#include "specproj/sampling.hpp"

namespace specproj {

// Exact covariance of the Gaussian field xi(u,v) + xi(v,u), where
// xi(u,v) = <X, P_r v><X, C_r u>. These are the fluctuations of the bilinear
// forms of the first-order perturbation term, so for every finite n
// Var(sqrt(n) <L_r u, v>) equals this value with no asymptotics involved.
double gamma_covariance(const SpectralDecomposition& dec, int r,
                        const VectorH& u, const VectorH& v,
                        const VectorH& u2, const VectorH& v2);

// One-sample Kolmogorov-Smirnov statistic: sup |F_n - F|.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

// Standard normal CDF.
double normal_cdf(double x);

// Monte Carlo estimate of the mean empirical projector and the bias it
// carries. For a simple eigenvalue, mean(P_hat) = (1 + b) P + T with
// b = <(mean(P_hat) - P) theta, theta>; both b and |T|_inf are reported with
// Monte Carlo standard errors.
struct BiasReport {
  int r = 0;
  int replicates = 0;
  int non_separated = 0;
  SymmetricOperator mean_projector;
  SymmetricOperator w_estimate;  // Monte Carlo mean of the remainder S_r(E)
  double b_r = 0.0;
  double b_std_error = 0.0;
  double t_norm = 0.0;
};

// `max_non_separated` is the tolerated fraction of replicates whose
// perturbation exceeds half the spectral gap; beyond it the average is no
// longer trustworthy and the run fails.
BiasReport mc_expected_projector(const CovarianceModel& model, int r, int n, int R,
                                 std::uint64_t seed, double max_non_separated = 0.01);

// Predicted eigenvector risk E 2(1 - |<theta_hat_j, theta_j>|) for a spiked
// model with unit noise:
//   (p - m)(1 + s_j^2) / (n s_j^4)
//     + n^{-1} sum_{k != j} (1 + s_j^2)(1 + s_k^2) / (s_j^2 - s_k^2)^2.
double spiked_risk_prediction(const CovarianceModel& model, int j, int n);

}  // namespace specproj
