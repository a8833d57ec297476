#include <doctest.h>

#include <cmath>

#include "specproj/experiments.hpp"

using namespace specproj;

namespace {

nlohmann::json deterministic_part(const ExperimentReport& r) {
  nlohmann::json j = r.to_json();
  j.erase("meta");
  return j;
}

}  // namespace

TEST_CASE("operator norm experiment: chi-square cell and band") {
  std::vector<NormExperimentCell> grid;
  grid.push_back({explicit_spectrum_model({1.0}, {1}), 500});
  const ExperimentReport report = run_operator_norm_experiment(grid, 400, 11);
  REQUIRE(report.verdicts.size() >= 2);
  bool found = false;
  for (const Verdict& v : report.verdicts) {
    if (v.name == "chi_square_cell_ratio") {
      found = true;
      CHECK(v.pass);
    }
  }
  CHECK(found);
}

TEST_CASE("remainder concentration: quantile growth and paired-n shrink") {
  const CovarianceModel model = spiked_model({2.0}, 1.0, 20);
  VectorH u = model.eigenvector(1);
  VectorH v = VectorH::Unit(20, 5);

  const ExperimentReport at500 =
      run_remainder_concentration_experiment(model, 1, 500, 1500, u, v, 3);
  const ExperimentReport at2000 =
      run_remainder_concentration_experiment(model, 1, 2000, 1500, u, v, 4);

  const double ratio500 = at500.extra["median_ratio_R_over_L"].get<double>();
  const double ratio2000 = at2000.extra["median_ratio_R_over_L"].get<double>();
  // The remainder loses ground against the linear term like sqrt(r/n):
  // quadrupling n should halve the ratio, with wide Monte Carlo slack.
  const double shrink = ratio500 / ratio2000;
  CHECK(shrink >= 1.5);
  CHECK(shrink <= 2.8);

  for (const Verdict& vd : at2000.verdicts) CHECK(vd.pass);
}

TEST_CASE("remainder concentration: aligned directions see only the second order") {
  const CovarianceModel model = spiked_model({2.0}, 1.0, 20);
  const VectorH theta = model.eigenvector(1);
  const VectorH noise = VectorH::Unit(20, 7);

  const ExperimentReport aligned =
      run_remainder_concentration_experiment(model, 1, 800, 1200, theta, theta, 9);
  const ExperimentReport mixed =
      run_remainder_concentration_experiment(model, 1, 800, 1200, theta, noise, 9);
  // |<(P_hat - mean) theta, theta>| has no first-order part, so even the raw
  // projector fluctuation is an order smaller than in mixed directions.
  const double q_aligned = aligned.cell_rows[2][2];
  const double q_mixed = mixed.cell_rows[2][2];
  CHECK(q_aligned <= 0.5 * q_mixed);
}

TEST_CASE("clt experiment in linear mode is exact at any n") {
  const CovarianceModel model = spiked_model({2.0}, 1.0, 30);
  std::vector<DirectionPair> dirs;
  dirs.push_back({"theta,e6", model.eigenvector(1), VectorH::Unit(30, 5)});
  for (int n : {1, 7}) {
    const ExperimentReport rep = run_clt_experiment(model, 1, n, 60000, dirs,
                                                    CltMode::linear, 21 + n);
    for (const Verdict& v : rep.verdicts) CHECK(v.pass);
  }
}

TEST_CASE("clt experiment collapses on zero-variance directions") {
  const CovarianceModel model = spiked_model({2.0}, 1.0, 20);
  std::vector<DirectionPair> dirs;
  dirs.push_back({"theta,theta", model.eigenvector(1), model.eigenvector(1)});
  const ExperimentReport rep =
      run_clt_experiment(model, 1, 800, 600, dirs, CltMode::projector, 5);
  REQUIRE(rep.verdicts.size() == 1);
  CHECK(rep.verdicts[0].name == "variance_collapse[theta,theta]");
  CHECK(rep.verdicts[0].pass);
}

TEST_CASE("bias estimator experiment shrinks the scaled error") {
  const CovarianceModel model = spiked_model({2.0}, 1.0, 30);
  const ExperimentReport rep =
      run_bias_estimator_experiment(model, 1, {300, 1200}, 150, 1200, 31);
  bool found = false;
  for (const Verdict& v : rep.verdicts) {
    if (v.name == "median_err_sqrtn_shrinks") {
      found = true;
      CHECK(v.pass);
    }
  }
  CHECK(found);
}

TEST_CASE("sparse spiked model carries a flat sparse eigenvector") {
  const CovarianceModel model = sparse_spiked_model(2.0, 1.0, 40, 5);
  const VectorH theta = model.eigenvector(1);
  for (int i = 0; i < 5; ++i) CHECK(theta[i] == doctest::Approx(1.0 / std::sqrt(5.0)));
  for (int i = 5; i < 40; ++i) CHECK(std::abs(theta[i]) <= 1e-14);
  CHECK(operator_norm(model.sigma) == doctest::Approx(5.0));
  CHECK(spectral_gap(model.ground_truth, 1) == doctest::Approx(4.0));
}

TEST_CASE("support recovery reports the regime check") {
  const CovarianceModel model = sparse_spiked_model(2.0, 1.0, 60, 5);
  SupportRecoveryConfig cfg;
  cfg.n = 40;          // far too small for the calibrated threshold
  cfg.R = 10;
  cfg.c_gamma = 50.0;  // absurd constant forces rho <= 2 beta
  cfg.sweep_n = {};
  const ExperimentReport rep = run_support_recovery_experiment(model, cfg, 77);
  REQUIRE(rep.verdicts.size() == 1);
  CHECK(rep.verdicts[0].name == "regime_met");
  CHECK_FALSE(rep.verdicts[0].pass);
}

TEST_CASE("experiment reports are bit-reproducible for a fixed seed") {
  const CovarianceModel model = spiked_model({2.0}, 1.0, 15);
  std::vector<DirectionPair> dirs;
  dirs.push_back({"theta,e5", model.eigenvector(1), VectorH::Unit(15, 4)});
  const ExperimentReport a =
      run_clt_experiment(model, 1, 150, 400, dirs, CltMode::projector, 99);
  const ExperimentReport b =
      run_clt_experiment(model, 1, 150, 400, dirs, CltMode::projector, 99);
  CHECK(deterministic_part(a).dump() == deterministic_part(b).dump());

  const ExperimentReport c =
      run_clt_experiment(model, 1, 150, 400, dirs, CltMode::projector, 100);
  CHECK(deterministic_part(a).dump() != deterministic_part(c).dump());
}

TEST_CASE("report rendering carries cells and verdicts") {
  ExperimentReport rep;
  rep.name = "demo";
  rep.seed = 5;
  rep.cell_columns = {"a", "b"};
  rep.cell_rows = {{1.0, 2.5}};
  rep.verdicts.push_back(make_verdict("check", 1.0, 0.5, 1.5, "demo"));
  CHECK(rep.passed());
  CHECK(rep.cells_csv() == "a,b\n1,2.5\n");
  CHECK(rep.human_summary().find("[PASS] check") != std::string::npos);
  const nlohmann::json j = rep.to_json();
  CHECK(j["cells"]["columns"].size() == 2);
  CHECK(j.contains("meta"));

  rep.verdicts.push_back(make_verdict("bad", 9.0, 0.0, 1.0));
  CHECK_FALSE(rep.passed());
}
