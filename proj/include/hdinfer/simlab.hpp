#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hdinfer/inference.hpp"
#include "hdinfer/multiplicity.hpp"

namespace hdinfer {

enum class DesignModel { kM1, kM2 };

struct ScenarioConfig {
  DesignModel model = DesignModel::kM1;
  int n = 100;
  int p = 500;
  int s0 = 3;          // active set is {1..s0} (0 injects the global null)
  double b = 1.0;      // magnitude of the active coefficients
  double rho = -1.0;   // equicorrelation; negative means the model default
  double sigma = 1.0;  // noise standard deviation
  int reps = 1;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::int64_t mc_draws = 10000;
  int threads = 1;
  double ridge_lambda = -1.0;  // negative means 1/n
  double lambda0 = -1.0;       // negative means 2 sqrt(log p / n)
  double xi = 0.05;
  double zeta = 0.0;
  std::optional<GroupHypothesis> group;
  // Null counterpart for the group type-I rate; derived from the tail
  // indices when absent and the configured group covers active variables.
  std::optional<GroupHypothesis> null_group;

  double effective_rho() const;
  double effective_ridge_lambda() const;
  double effective_lambda0() const;
  void validate() const;
};

struct RepRecord {
  int rep = 0;
  std::string error;  // empty when the replicate succeeded
  double sigma_hat = 0.0;
  int scaled_lasso_iterations = 0;
  bool scaled_lasso_converged = false;
  int raw_rejections_active = 0;
  int raw_rejections_null = 0;
  int adjusted_rejections_active = 0;
  int false_positives = 0;  // adjusted rejections outside the active set
  std::optional<double> group_pvalue;
  std::optional<double> null_group_pvalue;
};

struct SimulationReport {
  ScenarioConfig config;
  double snr = 0.0;
  double avg_type1 = 0.0;              // raw p-values over the inactive set
  std::optional<double> avg_power;     // raw p-values over the active set
  std::optional<double> avg_power_adjusted;
  double fwer = 0.0;
  std::vector<std::int64_t> v_distribution;  // counts of false-positive totals
  std::optional<double> group_power;
  std::optional<double> group_type1;
  int error_count = 0;
  std::vector<RepRecord> reps;
};

// Fixed design for a scenario: n i.i.d. rows from N(0, I) or from the
// equicorrelated covariance via the shared-factor decomposition
// x_ij = sqrt(rho) g_i + sqrt(1-rho) h_ij.
Eigen::MatrixXd generate_design(const ScenarioConfig& cfg, std::uint64_t seed);

SimulationReport run_scenario(const ScenarioConfig& cfg);

// a_j(sigma) * sum_{k != j} (P_X)_jk (beta_init_k - beta_true_k), both
// coefficient vectors on the standardized scale.
Eigen::VectorXd projection_bias_values(const DesignContext& ctx, const RidgeCovariance& cov,
                                       double sigma, const Eigen::VectorXd& beta_init,
                                       const Eigen::VectorXd& beta_true);

struct HistogramData {
  std::vector<double> bin_edges;  // bins + 1 entries
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;
};

HistogramData projection_bias_histogram(const ScenarioConfig& cfg, int bins = 101);

}  // namespace hdinfer
