#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "hdinfer/inference.hpp"

namespace hdinfer {

enum class NullKind { kIndividual, kGroup };

// Sorted Monte Carlo sample of min_j 2(1 - Phi(a_j |Z_j|)) (or the group
// analogue), the simulation-based null used for familywise error control.
struct NullDistribution {
  std::vector<double> sorted_min_pvalues;
  std::int64_t draws = 0;
  std::uint64_t seed = 0;
  NullKind kind = NullKind::kIndividual;

  // Empirical CDF with the weak-inequality convention #{draws <= c} / draws.
  double cdf(double c) const;
};

NullDistribution simulate_fz(const DesignContext& ctx, const RidgeCovariance& cov,
                             const MonteCarloConfig& mc);

// P_corr_j = F_Z(P_j + zeta), clipped to [0,1].
Eigen::VectorXd adjust_pvalues(const Eigen::VectorXd& raw, const NullDistribution& fz,
                               double zeta);

// Westfall-Young-style adjustment for a family of group hypotheses. The
// per-group null CDFs J_G are rank-transformed from one shared ensemble of
// draws; the group null statistic is max_{j in G} a_j |Z_j| without the
// delta shift.
Eigen::VectorXd adjust_group_pvalues(const std::vector<double>& raw_groups,
                                     const std::vector<GroupHypothesis>& groups,
                                     const DesignContext& ctx, const RidgeCovariance& cov,
                                     const MonteCarloConfig& mc, double zeta = 0.0);

// Step-down Bonferroni-Holm, the comparison baseline.
Eigen::VectorXd bonferroni_holm(const Eigen::VectorXd& raw);

}  // namespace hdinfer
