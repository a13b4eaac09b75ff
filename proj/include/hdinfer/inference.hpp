#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hdinfer/design.hpp"
#include "hdinfer/rng.hpp"
#include "hdinfer/scaled_lasso.hpp"

namespace hdinfer {

struct MonteCarloConfig {
  std::int64_t draws = 10000;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct GroupHypothesis {
  std::vector<int> indices;  // 0-based coefficient indices
  std::string label;
};

void validate_group(const GroupHypothesis& group, Eigen::Index p);

// Bias-corrected Ridge statistics: beta_corr_j = beta_ridge_j -
// sum_{k != j} (P_X)_jk beta_init_k, standardized by
// a_j(sigma_hat) = sqrt(n) / sigma_hat * Omega_jj^{-1/2}.
struct CorrectedRidgeFit {
  double lambda = 0.0;
  double xi = 0.0;
  double sigma_used = 0.0;
  Eigen::VectorXd beta_ridge;
  Eigen::VectorXd beta_corr;
  Eigen::VectorXd stats;  // a_j(sigma_hat) |beta_corr_j|, 0 on untestable coords
  Eigen::VectorXd delta;  // max_{k != j} |a_j (P_X)_jk| (log p / n)^(1/2 - xi)
  std::vector<bool> untestable;
};

CorrectedRidgeFit corrected_fit(const DesignContext& ctx, const RidgeCovariance& cov,
                                const InitialFit& init, const Eigen::VectorXd& y,
                                double lambda, double xi);

// P_j = 2 (1 - Phi((stats_j - delta_j)_+)); untestable coordinates get 1.
Eigen::VectorXd single_pvalues(const CorrectedRidgeFit& fit);

// Generates the sigma-free standardized null statistics a_j |Z_j| with
// Z ~ N_p(0, sigma^2 n^-1 Omega), drawn through the SVD factorization so a
// draw costs O(p r). Draw index determines the substream, so any blocking
// of indices yields the same numbers.
class NullSampler {
 public:
  NullSampler(const DesignContext& ctx, const RidgeCovariance& cov, std::uint64_t seed,
              std::uint64_t stream_tag = kStreamNullDraw);

  // Fills out (p x count) with the statistics for draws [first, first+count).
  void fill_block(std::int64_t first, std::int64_t count, Eigen::MatrixXd& out) const;

  static constexpr std::int64_t kBlock = 512;

 private:
  const DesignContext* ctx_;
  Eigen::VectorXd dvals_;           // s / (s^2 + lambda)
  Eigen::VectorXd inv_sqrt_omega_;  // 0 on untestable coordinates
  std::uint64_t seed_;
  std::uint64_t stream_tag_;
};

// Monte Carlo p-value for H_{0,G} with the max statistic, using the
// plus-one estimator (1 + #exceed) / (draws + 1).
double group_pvalue(const CorrectedRidgeFit& fit, const RidgeCovariance& cov,
                    const DesignContext& ctx, const GroupHypothesis& group,
                    const MonteCarloConfig& mc);

}  // namespace hdinfer
