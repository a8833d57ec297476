#include "specproj/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "specproj/rng.hpp"
#include "parallel.hpp"

namespace specproj {

double gamma_covariance(const SpectralDecomposition& dec, int r,
                        const VectorH& u, const VectorH& v,
                        const VectorH& u2, const VectorH& v2) {
  const Eigen::MatrixXd& sigma = dec.source().matrix();
  const Eigen::MatrixXd& p = dec.cluster(r).projector.matrix();
  const Eigen::MatrixXd c = dec.reduced_resolvent(r).matrix();
  const Eigen::MatrixXd psp = p * sigma * p;
  const Eigen::MatrixXd csc = c * sigma * c;

  const auto bi = [](const Eigen::MatrixXd& m, const VectorH& a, const VectorH& b) {
    return a.dot(m * b);
  };
  return bi(psp, v, v2) * bi(csc, u, u2) + bi(psp, v, u2) * bi(csc, u, v2) +
         bi(psp, u, u2) * bi(csc, v, v2) + bi(psp, u, v2) * bi(csc, v, u2);
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.size() < 2) {
    throw std::invalid_argument("ks_statistic: need at least two samples");
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

BiasReport mc_expected_projector(const CovarianceModel& model, int r, int n, int R,
                                 std::uint64_t seed, double max_non_separated) {
  if (R < 1) throw std::invalid_argument("mc_expected_projector: need R >= 1");
  const double gap = spectral_gap(model.ground_truth, r);
  const double rank = effective_rank(model.sigma);
  const double rate = operator_norm(model.sigma) *
                      std::max(std::sqrt(rank / n), rank / n);
  if (rate >= 0.5 * gap) {
    throw std::invalid_argument(
        "mc_expected_projector: separation implausible at this (model, n)");
  }

  const Eigen::Index p = model.dim();
  const int blocks = (R + detail::kReplicateBlock - 1) / detail::kReplicateBlock;
  std::vector<Eigen::MatrixXd> proj_sum(blocks, Eigen::MatrixXd::Zero(p, p));
  std::vector<Eigen::MatrixXd> e_sum(blocks, Eigen::MatrixXd::Zero(p, p));
  std::vector<int> separated(blocks, 0);
  const EigenCluster& cluster = model.ground_truth.cluster(r);
  const bool simple = cluster.multiplicity == 1;
  VectorH theta = simple ? VectorH(model.eigenvector(r)) : VectorH();
  std::vector<double> ptt(static_cast<std::size_t>(R), 0.0);

  detail::parallel_replicates(R, [&](int k) {
    const int b = k / detail::kReplicateBlock;
    SampleSet s = sample_gaussian(model, n, CounterRng::derive_stream(seed, k));
    SymmetricOperator cov = sample_covariance(s);
    std::vector<MatchedProjector> matched = match_clusters(model.ground_truth, cov);
    const MatchedProjector& m = matched[static_cast<std::size_t>(r - 1)];
    proj_sum[b] += m.projector.matrix();
    e_sum[b] += cov.matrix() - model.sigma.matrix();
    if (m.separated) ++separated[b];
    if (simple) ptt[static_cast<std::size_t>(k)] = theta.dot(m.projector.apply(theta));
  });

  Eigen::MatrixXd mean_p = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd mean_e = Eigen::MatrixXd::Zero(p, p);
  int sep_count = 0;
  for (int b = 0; b < blocks; ++b) {
    mean_p += proj_sum[b];
    mean_e += e_sum[b];
    sep_count += separated[b];
  }
  mean_p /= R;
  mean_e /= R;

  BiasReport report;
  report.r = r;
  report.replicates = R;
  report.non_separated = R - sep_count;
  if (report.non_separated > max_non_separated * R) {
    throw std::runtime_error("mc_expected_projector: " +
                             std::to_string(report.non_separated) + " of " +
                             std::to_string(R) + " replicates were not separated");
  }
  report.mean_projector = SymmetricOperator(0.5 * (mean_p + mean_p.transpose()));
  const SymmetricOperator mean_e_op(0.5 * (mean_e + mean_e.transpose()));
  report.w_estimate = report.mean_projector - cluster.projector -
                      linear_term(model.ground_truth, r, mean_e_op);
  if (simple) {
    double mean = 0.0;
    for (double x : ptt) mean += x;
    mean /= R;
    double var = 0.0;
    for (double x : ptt) var += (x - mean) * (x - mean);
    var /= std::max(1, R - 1);
    report.b_r = mean - 1.0;
    report.b_std_error = std::sqrt(var / R);
    report.t_norm = operator_norm(report.mean_projector - cluster.projector -
                                  cluster.projector.scaled(report.b_r));
  } else {
    report.b_r = std::numeric_limits<double>::quiet_NaN();
    report.b_std_error = std::numeric_limits<double>::quiet_NaN();
    report.t_norm = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

double spiked_risk_prediction(const CovarianceModel& model, int j, int n) {
  if (model.kind != CovarianceModel::Kind::spiked || model.spikes.empty()) {
    throw std::invalid_argument("spiked_risk_prediction: needs a spiked model");
  }
  if (std::abs(model.noise_sigma - 1.0) > 1e-12) {
    throw std::invalid_argument("spiked_risk_prediction: stated for unit noise only");
  }
  const int m = static_cast<int>(model.spikes.size());
  if (j < 1 || j > m) throw std::out_of_range("spiked_risk_prediction: bad spike index");
  const double p = static_cast<double>(model.dim());
  const double sj2 = model.spikes[static_cast<std::size_t>(j - 1)] *
                     model.spikes[static_cast<std::size_t>(j - 1)];
  double value = (p - m) * (1.0 + sj2) / (n * sj2 * sj2);
  for (int k = 1; k <= m; ++k) {
    if (k == j) continue;
    const double sk2 = model.spikes[static_cast<std::size_t>(k - 1)] *
                       model.spikes[static_cast<std::size_t>(k - 1)];
    value += (1.0 + sj2) * (1.0 + sk2) / ((sj2 - sk2) * (sj2 - sk2)) / n;
  }
  return value;
}

}  // namespace specproj
