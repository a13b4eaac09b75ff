#include "hdinfer/multiplicity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hdinfer/mathutil.hpp"
#include "hdinfer/parallel.hpp"
#include "hdinfer/rng.hpp"

namespace hdinfer {

double NullDistribution::cdf(double c) const {
  const auto it = std::upper_bound(sorted_min_pvalues.begin(), sorted_min_pvalues.end(), c);
  return static_cast<double>(it - sorted_min_pvalues.begin()) /
         static_cast<double>(sorted_min_pvalues.size());
}

NullDistribution simulate_fz(const DesignContext& ctx, const RidgeCovariance& cov,
                             const MonteCarloConfig& mc) {
  if (mc.draws < 1000) throw std::invalid_argument("simulate_fz: need at least 1000 draws");
  NullDistribution null;
  null.draws = mc.draws;
  null.seed = mc.seed;
  null.kind = NullKind::kIndividual;
  null.sorted_min_pvalues.assign(static_cast<std::size_t>(mc.draws), 0.0);

  const NullSampler sampler(ctx, cov, mc.seed);
  parallel_for_chunks(mc.draws, NullSampler::kBlock, mc.threads,
                      [&](std::int64_t first, std::int64_t last) {
                        Eigen::MatrixXd stats;
                        sampler.fill_block(first, last - first, stats);
                        for (std::int64_t b = 0; b < last - first; ++b) {
                          // min_j of 2(1 - Phi(.)) is the two-sided tail at the max.
                          const double max_stat = stats.col(b).maxCoeff();
                          null.sorted_min_pvalues[static_cast<std::size_t>(first + b)] =
                              clamp01(two_sided_pvalue(max_stat));
                        }
                      });
  std::sort(null.sorted_min_pvalues.begin(), null.sorted_min_pvalues.end());
  return null;
}

Eigen::VectorXd adjust_pvalues(const Eigen::VectorXd& raw, const NullDistribution& fz,
                               double zeta) {
  if (zeta < 0.0) throw std::invalid_argument("adjust_pvalues: zeta must be nonnegative");
  Eigen::VectorXd adjusted(raw.size());
  for (Eigen::Index j = 0; j < raw.size(); ++j) {
    if (raw(j) < 0.0 || raw(j) > 1.0)
      throw std::invalid_argument("adjust_pvalues: raw p-value outside [0,1]");
    adjusted(j) = clamp01(fz.cdf(raw(j) + zeta));
  }
  return adjusted;
}

Eigen::VectorXd adjust_group_pvalues(const std::vector<double>& raw_groups,
                                     const std::vector<GroupHypothesis>& groups,
                                     const DesignContext& ctx, const RidgeCovariance& cov,
                                     const MonteCarloConfig& mc, double zeta) {
  if (groups.empty()) throw std::invalid_argument("adjust_group_pvalues: empty group list");
  if (raw_groups.size() != groups.size())
    throw std::invalid_argument("adjust_group_pvalues: raw p-value count mismatch");
  for (const auto& g : groups) validate_group(g, ctx.p);
  if (mc.draws < 1000) throw std::invalid_argument("adjust_group_pvalues: need at least 1000 draws");

  const std::size_t m = groups.size();
  const auto draws = static_cast<std::size_t>(mc.draws);

  // Per-draw max statistic for every group, from a single ensemble.
  std::vector<std::vector<double>> group_max(m, std::vector<double>(draws, 0.0));
  const NullSampler sampler(ctx, cov, mc.seed, kStreamGroupDraw);
  parallel_for_chunks(mc.draws, NullSampler::kBlock, mc.threads,
                      [&](std::int64_t first, std::int64_t last) {
                        Eigen::MatrixXd stats;
                        sampler.fill_block(first, last - first, stats);
                        for (std::int64_t b = 0; b < last - first; ++b) {
                          for (std::size_t g = 0; g < m; ++g) {
                            double mx = 0.0;
                            for (int j : groups[g].indices) mx = std::max(mx, stats(j, b));
                            group_max[g][static_cast<std::size_t>(first + b)] = mx;
                          }
                        }
                      });

  // Rank transform within the ensemble: 1 - J_G(c) = #{draws > c} / draws.
  std::vector<std::vector<double>> sorted_max = group_max;
  for (auto& v : sorted_max) std::sort(v.begin(), v.end());
  NullDistribution minima;
  minima.draws = mc.draws;
  minima.seed = mc.seed;
  minima.kind = NullKind::kGroup;
  minima.sorted_min_pvalues.assign(draws, 1.0);
  for (std::size_t b = 0; b < draws; ++b) {
    double min_p = 1.0;
    for (std::size_t g = 0; g < m; ++g) {
      const auto& sorted = sorted_max[g];
      const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), group_max[g][b]);
      min_p = std::min(min_p, static_cast<double>(above) / static_cast<double>(draws));
    }
    minima.sorted_min_pvalues[b] = min_p;
  }
  std::sort(minima.sorted_min_pvalues.begin(), minima.sorted_min_pvalues.end());

  Eigen::VectorXd adjusted(static_cast<Eigen::Index>(m));
  for (std::size_t g = 0; g < m; ++g) {
    if (raw_groups[g] < 0.0 || raw_groups[g] > 1.0)
      throw std::invalid_argument("adjust_group_pvalues: raw p-value outside [0,1]");
    adjusted(static_cast<Eigen::Index>(g)) = clamp01(minima.cdf(raw_groups[g] + zeta));
  }
  return adjusted;
}

Eigen::VectorXd bonferroni_holm(const Eigen::VectorXd& raw) {
  const Eigen::Index p = raw.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return raw(a) < raw(b); });
  Eigen::VectorXd adjusted(p);
  double running_max = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) {
    const Eigen::Index j = order[static_cast<std::size_t>(i)];
    if (raw(j) < 0.0 || raw(j) > 1.0)
      throw std::invalid_argument("bonferroni_holm: raw p-value outside [0,1]");
    running_max = std::max(running_max, static_cast<double>(p - i) * raw(j));
    adjusted(j) = std::min(1.0, running_max);
  }
  return adjusted;
}

}  // namespace hdinfer
