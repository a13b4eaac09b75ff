#include "hdinfer/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "hdinfer/mathutil.hpp"
#include "hdinfer/parallel.hpp"
#include "hdinfer/rng.hpp"

namespace hdinfer {

void validate_group(const GroupHypothesis& group, Eigen::Index p) {
  if (group.indices.empty()) throw std::invalid_argument("group hypothesis: empty index set");
  std::set<int> seen;
  for (int idx : group.indices) {
    if (idx < 0 || idx >= p) throw std::invalid_argument("group hypothesis: index out of range");
    if (!seen.insert(idx).second) throw std::invalid_argument("group hypothesis: duplicate index");
  }
}

CorrectedRidgeFit corrected_fit(const DesignContext& ctx, const RidgeCovariance& cov,
                                const InitialFit& init, const Eigen::VectorXd& y,
                                double lambda, double xi) {
  if (!(lambda > 0.0)) throw std::invalid_argument("corrected_fit: lambda must be positive");
  if (cov.lambda != lambda)
    throw std::invalid_argument("corrected_fit: covariance was built for a different lambda");
  if (!(xi > 0.0 && xi < 0.5)) throw std::invalid_argument("corrected_fit: xi must be in (0, 0.5)");
  if (init.beta_init.size() != ctx.p)
    throw std::invalid_argument("corrected_fit: initial fit dimension mismatch");

  CorrectedRidgeFit fit;
  fit.lambda = lambda;
  fit.xi = xi;
  fit.sigma_used = init.sigma_hat;
  fit.untestable = ctx.untestable;
  fit.beta_ridge = ridge_fit(ctx, y, lambda);

  // sum_{k != j} (P_X)_jk beta_init_k = (P_X beta_init)_j - (P_X)_jj beta_init_j
  const Eigen::VectorXd projected = ctx.project(init.beta_init);
  fit.beta_corr = fit.beta_ridge - (projected - ctx.proj_diag.cwiseProduct(init.beta_init));

  const double n = static_cast<double>(ctx.n);
  const double log_ratio =
      std::pow(std::log(static_cast<double>(ctx.p)) / n, 0.5 - xi);
  fit.stats = Eigen::VectorXd::Zero(ctx.p);
  fit.delta = Eigen::VectorXd::Zero(ctx.p);
  for (Eigen::Index j = 0; j < ctx.p; ++j) {
    if (fit.untestable[static_cast<std::size_t>(j)]) continue;
    const double a_j = std::sqrt(n) / init.sigma_hat * cov.a_factors_unit(j);
    fit.stats(j) = a_j * std::abs(fit.beta_corr(j));
    fit.delta(j) = a_j * ctx.proj_max_offdiag(j) * log_ratio;
  }
  return fit;
}

Eigen::VectorXd single_pvalues(const CorrectedRidgeFit& fit) {
  Eigen::VectorXd pvalues(fit.stats.size());
  for (Eigen::Index j = 0; j < fit.stats.size(); ++j) {
    if (fit.untestable[static_cast<std::size_t>(j)]) {
      pvalues(j) = 1.0;
      continue;
    }
    const double shifted = std::max(fit.stats(j) - fit.delta(j), 0.0);
    pvalues(j) = clamp01(two_sided_pvalue(shifted));
  }
  return pvalues;
}

NullSampler::NullSampler(const DesignContext& ctx, const RidgeCovariance& cov,
                         std::uint64_t seed, std::uint64_t stream_tag)
    : ctx_(&ctx), seed_(seed), stream_tag_(stream_tag) {
  const Eigen::ArrayXd s = ctx.s_vals.array();
  dvals_ = (s / (s.square() + cov.lambda)).matrix();
  inv_sqrt_omega_.resize(ctx.p);
  for (Eigen::Index j = 0; j < ctx.p; ++j) {
    const bool dead = ctx.untestable[static_cast<std::size_t>(j)] || !(cov.omega_diag(j) > 0.0);
    inv_sqrt_omega_(j) = dead ? 0.0 : 1.0 / std::sqrt(cov.omega_diag(j));
  }
}

void NullSampler::fill_block(std::int64_t first, std::int64_t count, Eigen::MatrixXd& out) const {
  const Eigen::Index r = ctx_->rank;
  Eigen::MatrixXd scaled_normals(r, count);
  for (std::int64_t b = 0; b < count; ++b) {
    Rng rng = Rng::substream(seed_, stream_tag_, static_cast<std::uint64_t>(first + b));
    for (Eigen::Index k = 0; k < r; ++k) scaled_normals(k, b) = dvals_(k) * rng.normal();
  }
  out.resize(ctx_->p, count);
  out.noalias() = ctx_->v_mat * scaled_normals;
  out = inv_sqrt_omega_.asDiagonal() * out.cwiseAbs().matrix();
}

double group_pvalue(const CorrectedRidgeFit& fit, const RidgeCovariance& cov,
                    const DesignContext& ctx, const GroupHypothesis& group,
                    const MonteCarloConfig& mc) {
  validate_group(group, ctx.p);
  if (mc.draws < 1000) throw std::invalid_argument("group_pvalue: need at least 1000 draws");

  double gamma_hat = 0.0;
  for (int j : group.indices) gamma_hat = std::max(gamma_hat, fit.stats(j));

  const NullSampler sampler(ctx, cov, mc.seed, kStreamGroupDraw);
  const std::int64_t n_blocks = (mc.draws + NullSampler::kBlock - 1) / NullSampler::kBlock;
  std::vector<std::int64_t> exceed(static_cast<std::size_t>(n_blocks), 0);
  parallel_for_chunks(mc.draws, NullSampler::kBlock, mc.threads,
                      [&](std::int64_t first, std::int64_t last) {
                        Eigen::MatrixXd stats;
                        sampler.fill_block(first, last - first, stats);
                        std::int64_t count = 0;
                        for (std::int64_t b = 0; b < last - first; ++b) {
                          double draw_max = 0.0;
                          for (int j : group.indices)
                            draw_max = std::max(draw_max, stats(j, b) + fit.delta(j));
                          if (draw_max >= gamma_hat) ++count;
                        }
                        exceed[static_cast<std::size_t>(first / NullSampler::kBlock)] = count;
                      });
  const auto total = std::accumulate(exceed.begin(), exceed.end(), std::int64_t{0});
  return static_cast<double>(1 + total) / static_cast<double>(mc.draws + 1);
}

}  // namespace hdinfer
