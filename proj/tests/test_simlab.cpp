#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "hdinfer/mathutil.hpp"
#include "hdinfer/report.hpp"
#include "hdinfer/rng.hpp"
#include "hdinfer/simlab.hpp"
#include "oracles.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using hdinfer::build_design;
using hdinfer::DesignContext;
using hdinfer::DesignModel;
using hdinfer::generate_design;
using hdinfer::GroupHypothesis;
using hdinfer::projection_bias_histogram;
using hdinfer::projection_bias_values;
using hdinfer::ridge_covariance;
using hdinfer::RidgeCovariance;
using hdinfer::run_scenario;
using hdinfer::ScenarioConfig;
using hdinfer::SimulationReport;

namespace {

double two_sample_ks_pvalue(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    const double fa = static_cast<double>(i) / a.size();
    const double fb = static_cast<double>(j) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  return hdinfer::kolmogorov_tail(std::sqrt(na * nb / (na + nb)) * d);
}

}  // namespace

TEST_SUITE("simlab") {

TEST_CASE("equicorrelation zero degenerates to the independent model") {
  ScenarioConfig m1;
  m1.model = DesignModel::kM1;
  m1.n = 25;
  m1.p = 12;
  ScenarioConfig m2 = m1;
  m2.model = DesignModel::kM2;
  m2.rho = 0.0;
  const MatrixXd a = generate_design(m1, 77);
  const MatrixXd b = generate_design(m2, 77);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("equicorrelated columns carry the configured correlation") {
  ScenarioConfig cfg;
  cfg.model = DesignModel::kM2;
  cfg.n = 5000;
  cfg.p = 20;
  const MatrixXd x = generate_design(cfg, 31);
  double sum_corr = 0.0;
  int pairs = 0;
  Eigen::VectorXd centered_norm(cfg.p);
  MatrixXd centered = x;
  for (int j = 0; j < cfg.p; ++j) {
    centered.col(j).array() -= centered.col(j).mean();
    centered_norm(j) = centered.col(j).norm();
  }
  for (int j = 0; j < cfg.p; ++j)
    for (int k = j + 1; k < cfg.p; ++k) {
      sum_corr += centered.col(j).dot(centered.col(k)) / (centered_norm(j) * centered_norm(k));
      ++pairs;
    }
  CHECK(std::abs(sum_corr / pairs - 0.8) <= 0.02);
}

TEST_CASE("shared-factor sampler agrees with a Cholesky sampler in distribution") {
  const int n = 4000, p = 5;
  const double rho = 0.8;
  ScenarioConfig cfg;
  cfg.model = DesignModel::kM2;
  cfg.n = n;
  cfg.p = p;
  const MatrixXd shared_factor = generate_design(cfg, 101);

  MatrixXd sigma = MatrixXd::Constant(p, p, rho);
  sigma.diagonal().setOnes();
  const MatrixXd chol = sigma.llt().matrixL();
  hdinfer::Rng rng = hdinfer::Rng::substream(555, 1);
  MatrixXd cholesky_rows(n, p);
  for (int i = 0; i < n; ++i) {
    VectorXd z(p);
    for (int j = 0; j < p; ++j) z(j) = rng.normal();
    cholesky_rows.row(i) = (chol * z).transpose();
  }

  std::vector<double> marg_a(shared_factor.col(0).data(), shared_factor.col(0).data() + n);
  std::vector<double> marg_b(cholesky_rows.col(0).data(), cholesky_rows.col(0).data() + n);
  CHECK(two_sample_ks_pvalue(marg_a, marg_b) > 0.01);

  auto pair_corr = [&](const MatrixXd& m) {
    const VectorXd u = m.col(1).array() - m.col(1).mean();
    const VectorXd v = m.col(2).array() - m.col(2).mean();
    return u.dot(v) / (u.norm() * v.norm());
  };
  // Fisher z comparison of the (1,2) correlation across samplers.
  const double z1 = std::atanh(pair_corr(shared_factor));
  const double z2 = std::atanh(pair_corr(cholesky_rows));
  CHECK(std::abs(z1 - z2) <= 2.58 * std::sqrt(2.0 / (n - 3)));
}

TEST_CASE("global null scenario keeps error rates near the nominal level") {
  ScenarioConfig cfg;
  cfg.model = DesignModel::kM1;
  cfg.n = 40;
  cfg.p = 60;
  cfg.s0 = 0;
  cfg.b = 1.0;
  cfg.reps = 100;
  cfg.seed = 3;
  cfg.mc_draws = 2000;
  const SimulationReport report = run_scenario(cfg);
  const double margin = 3.0 * std::sqrt(0.05 / cfg.reps);
  CHECK(report.avg_type1 <= 0.05 + margin);
  CHECK(report.fwer <= 0.05 + margin);
  CHECK_FALSE(report.avg_power.has_value());
  CHECK(report.error_count == 0);
}

TEST_CASE("the signal-to-noise ratio uses the sqrt(n)-normalized definition") {
  ScenarioConfig cfg;
  cfg.model = DesignModel::kM1;
  cfg.n = 30;
  cfg.p = 40;
  cfg.s0 = 2;
  cfg.b = 1.5;
  cfg.sigma = 2.0;
  cfg.reps = 1;
  cfg.seed = 8;
  cfg.mc_draws = 1000;
  const SimulationReport report = run_scenario(cfg);
  const MatrixXd x = generate_design(cfg, cfg.seed);
  VectorXd beta = VectorXd::Zero(cfg.p);
  beta.head(cfg.s0).setConstant(cfg.b);
  const double expected = (x * beta).norm() / (std::sqrt(30.0) * cfg.sigma);
  CHECK(report.snr == expected);
  CHECK(report.reps.size() == 1);
}

TEST_CASE("independent design at the reference strength hits the tabulated snr") {
  ScenarioConfig cfg;
  cfg.model = DesignModel::kM1;
  cfg.n = 100;
  cfg.p = 500;
  cfg.s0 = 3;
  cfg.b = 0.5;
  const MatrixXd x = generate_design(cfg, 12);
  VectorXd beta = VectorXd::Zero(cfg.p);
  beta.head(cfg.s0).setConstant(cfg.b);
  const double snr = (x * beta).norm() / std::sqrt(100.0);
  CHECK(std::abs(snr - 0.93) / 0.93 <= 0.15);
}

TEST_CASE("false-positive distribution is a partition of the replicates") {
  ScenarioConfig cfg;
  cfg.model = DesignModel::kM2;
  cfg.n = 30;
  cfg.p = 25;
  cfg.s0 = 2;
  cfg.b = 2.0;
  cfg.reps = 50;
  cfg.seed = 21;
  cfg.mc_draws = 1000;
  const SimulationReport report = run_scenario(cfg);
  std::int64_t total = 0;
  for (const auto count : report.v_distribution) total += count;
  CHECK(total == cfg.reps);
  CHECK(report.fwer ==
        1.0 - static_cast<double>(report.v_distribution[0]) / static_cast<double>(cfg.reps));
  CHECK(report.avg_power.has_value());
}

TEST_CASE("scenario reports are bit-reproducible and thread-count independent") {
  ScenarioConfig cfg;
  cfg.model = DesignModel::kM2;
  cfg.n = 25;
  cfg.p = 30;
  cfg.s0 = 2;
  cfg.b = 1.0;
  cfg.reps = 12;
  cfg.seed = 77;
  cfg.mc_draws = 1500;
  GroupHypothesis group;
  group.indices = {0, 1, 2, 3};
  cfg.group = group;

  cfg.threads = 1;
  const std::string first = hdinfer::simulation_report_to_json(run_scenario(cfg));
  const std::string second = hdinfer::simulation_report_to_json(run_scenario(cfg));
  cfg.threads = 3;
  const std::string threaded = hdinfer::simulation_report_to_json(run_scenario(cfg));
  CHECK(first == second);
  CHECK(first == threaded);
}

TEST_CASE("group metrics split into power and type-I contributions") {
  ScenarioConfig cfg;
  cfg.model = DesignModel::kM1;
  cfg.n = 40;
  cfg.p = 30;
  cfg.s0 = 2;
  cfg.b = 2.5;
  cfg.reps = 20;
  cfg.seed = 99;
  cfg.mc_draws = 1500;
  GroupHypothesis group;
  group.indices = {0, 1, 2, 3, 4};
  cfg.group = group;
  const SimulationReport report = run_scenario(cfg);
  REQUIRE(report.group_power.has_value());
  REQUIRE(report.group_type1.has_value());
  REQUIRE(report.config.null_group.has_value());
  // derived null counterpart: same size, taken from the tail, disjoint
  CHECK(report.config.null_group->indices.size() == group.indices.size());
  for (int idx : report.config.null_group->indices) {
    CHECK(idx >= cfg.s0);
    CHECK(std::find(group.indices.begin(), group.indices.end(), idx) == group.indices.end());
  }
  CHECK(*report.group_power >= 0.0);
  CHECK(*report.group_type1 <= 0.25);
}

TEST_CASE("projection bias vanishes with a perfect initial estimate") {
  const DesignContext ctx = build_design(oracles::random_matrix(10, 20, 41), true);
  const RidgeCovariance cov = ridge_covariance(ctx, 0.1);
  const VectorXd beta = oracles::random_vector(20, 42);
  const VectorXd values = projection_bias_values(ctx, cov, 1.0, beta, beta);
  CHECK(values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("projection bias vanishes on orthogonal designs") {
  const DesignContext ctx = build_design(oracles::orthogonal_design(12, 6, 43), false);
  const RidgeCovariance cov = ridge_covariance(ctx, 0.1);
  const VectorXd init = oracles::random_vector(6, 44);
  const VectorXd truth = oracles::random_vector(6, 45);
  const VectorXd values = projection_bias_values(ctx, cov, 1.0, init, truth);
  CHECK(values.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("projection bias histogram concentrates on an order-one scale") {
  ScenarioConfig cfg;
  cfg.model = DesignModel::kM2;
  cfg.n = 40;
  cfg.p = 80;
  cfg.s0 = 3;
  cfg.b = 1.0;
  cfg.reps = 10;
  cfg.seed = 5;
  cfg.mc_draws = 1000;
  const auto hist = projection_bias_histogram(cfg, 51);
  CHECK(hist.total == static_cast<std::int64_t>(cfg.reps) * cfg.p);
  std::int64_t sum = 0, inside = 0;
  for (std::size_t k = 0; k < hist.counts.size(); ++k) {
    sum += hist.counts[k];
    if (hist.bin_edges[k] >= -10.0 && hist.bin_edges[k + 1] <= 10.0) inside += hist.counts[k];
  }
  CHECK(sum == hist.total);
  CHECK(static_cast<double>(inside) >= 0.9 * static_cast<double>(hist.total));
}

TEST_CASE("a scenario with failing replicates is reported as an error") {
  // near-zero noise drives the scaled lasso into its degenerate-sigma error
  ScenarioConfig cfg;
  cfg.model = DesignModel::kM1;
  cfg.n = 10;
  cfg.p = 8;
  cfg.s0 = 0;
  cfg.sigma = 1e-300;
  cfg.reps = 5;
  cfg.mc_draws = 1000;
  CHECK_THROWS_WITH_AS(run_scenario(cfg),
                       "run_scenario: more than 1% of replicates failed (5 of 5)",
                       std::runtime_error);
}

TEST_CASE("scenario validation rejects malformed configurations") {
  ScenarioConfig cfg;
  cfg.s0 = 1000;
  cfg.p = 10;
  CHECK_THROWS_AS(run_scenario(cfg), std::invalid_argument);
  ScenarioConfig bad_rho;
  bad_rho.rho = 1.0;
  CHECK_THROWS_AS(run_scenario(bad_rho), std::invalid_argument);
  ScenarioConfig bad_reps;
  bad_reps.reps = 0;
  CHECK_THROWS_AS(run_scenario(bad_reps), std::invalid_argument);
}

}  // TEST_SUITE
