#pragma once

#include <string>

#include <json.hpp>

#include "specproj/estimation.hpp"
#include "specproj/verify.hpp"

namespace specproj {

// One checked claim: observed value against an acceptance band.
struct Verdict {
  std::string name;
  double observed = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
  std::string note;
};

Verdict make_verdict(std::string name, double observed, double lo, double hi,
                     std::string note = {});

// Outcome of one seeded experiment: raw per-cell summaries, pass/fail
// verdicts, and enough provenance (seed + config echo) to regenerate every
// number. Everything except the wall clock is a pure function of
// (config, seed); to_json() keeps the wall clock under a separate "meta" key
// so the rest of the document is byte-reproducible.
struct ExperimentReport {
  std::string name;
  std::uint64_t seed = 0;
  nlohmann::json config_echo;
  std::vector<std::string> cell_columns;
  std::vector<std::vector<double>> cell_rows;
  std::vector<Verdict> verdicts;
  nlohmann::json extra;
  double wall_clock_sec = 0.0;

  bool passed() const;
  nlohmann::json to_json() const;
  std::string cells_csv() const;
  std::string human_summary() const;
};

// --- operator norm of the sampling error -----------------------------------
//
// For each (model, n) cell: Monte Carlo E |S_hat - S|_inf, its ratio to the
// rate |S|_inf max(sqrt(r/n), r/n) driven by the effective rank r, the
// log-log slope of the mean against r across cells, and a closed-form 1-d
// chi-square sanity value for any p = 1 cell.
struct NormExperimentCell {
  CovarianceModel model;
  int n = 0;
};

ExperimentReport run_operator_norm_experiment(const std::vector<NormExperimentCell>& grid,
                                              int R, std::uint64_t seed);

// --- concentration of the remainder term ------------------------------------
//
// Samples the bilinear form <R_r u, v> of R_r = P_hat - mean(P_hat) - L_r(E)
// (centered within the run) and reports its quantiles at levels 1 - e^{-t},
// its median against the median of the linear part, and the quantile growth
// between t = 1 and t = 4.
ExperimentReport run_remainder_concentration_experiment(const CovarianceModel& model,
                                                        int r, int n, int R,
                                                        const VectorH& u, const VectorH& v,
                                                        std::uint64_t seed);

// --- normal limits of bilinear / linear forms --------------------------------
enum class CltMode { projector, eigenvector, linear };

struct DirectionPair {
  std::string label;
  VectorH u;
  VectorH v;  // ignored in eigenvector mode
};

// projector:   sqrt(n) <(P_hat - mean P_hat) u, v>    vs  Gamma(u,v;u,v)
// eigenvector: sqrt(n) <theta_hat - sqrt(1+b) theta, u> vs Gamma(theta,u;theta,u)
// linear:      sqrt(n) <L_r(E) u, v>, whose variance equals Gamma at every
//              finite n (no asymptotics), checked to 5%.
ExperimentReport run_clt_experiment(const CovarianceModel& model, int r, int n, int R,
                                    const std::vector<DirectionPair>& directions,
                                    CltMode mode, std::uint64_t seed);

// --- bias of the mean empirical projector ------------------------------------
//
// mean(P_hat) = (1 + b) P + T for a simple eigenvalue: checks |T|_inf against
// 0.3 |b| and that doubling the dimension roughly doubles |b|.
ExperimentReport run_bias_experiment(const CovarianceModel& model,
                                     const CovarianceModel& model_doubled, int r, int n,
                                     int R, std::uint64_t seed);

// --- split-sample bias estimator ----------------------------------------------
//
// For each n: oracle b from an R_oracle-replicate mean-projector run, then R
// split-sample estimates b_hat; reports median |b_hat - b| sqrt(n) (expected
// to fall with n: the estimator converges faster than sqrt(n)) and the
// sup-norm error of the debiased eigenvector scaled by sqrt(n / log p).
ExperimentReport run_bias_estimator_experiment(const CovarianceModel& model, int r,
                                               const std::vector<int>& n_values, int R,
                                               int oracle_R, std::uint64_t seed);

// --- eigenvector risk against the closed-form prediction ----------------------
ExperimentReport run_risk_experiment(const CovarianceModel& model, int j, int n, int R,
                                     std::uint64_t seed);

// --- support recovery by hard thresholding ------------------------------------

// Spiked model whose leading eigenvector is flat on its first k coordinates
// (entries 1/sqrt(k)) and zero elsewhere.
CovarianceModel sparse_spiked_model(double spike, double sigma, int p, int k);

// Split-sample debiased eigenvector for cluster r from a 2n-row sample.
struct DebiasedEstimate {
  VectorH theta_tilde;
  double b_hat = 0.0;
  bool separated = false;
  bool floor_breach = false;
};
DebiasedEstimate debiased_from_split(const Eigen::MatrixXd& samples, int r,
                                     const SpectralDecomposition& reference);

// Calibration constant for the threshold: the empirical 1 - e^{-t} quantile
// of |theta_tilde - theta|_sup on a held-out seed, expressed in units of
// (|S|_inf / gap) sqrt((t + log p) / n). Frozen before any verdict run.
double calibrate_support_threshold(const CovarianceModel& model, int r, double t, int n,
                                   int R, std::uint64_t seed);

struct SupportRecoveryConfig {
  int r = 1;
  double t = 3.0;
  int n = 2000;           // per half-sample
  int R = 400;
  double c_gamma = 1.0;   // frozen calibration constant
  std::vector<int> sweep_n;  // optional extra n cells for the l2 error slope
  int sweep_R = 200;
};

ExperimentReport run_support_recovery_experiment(const CovarianceModel& model,
                                                 const SupportRecoveryConfig& cfg,
                                                 std::uint64_t seed);

}  // namespace specproj
