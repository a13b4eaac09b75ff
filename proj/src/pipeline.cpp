#include "hdinfer/pipeline.hpp"

#include <cmath>

#include "hdinfer/multiplicity.hpp"
#include "hdinfer/scaled_lasso.hpp"

namespace hdinfer {

TestReport run_test_pipeline(const Eigen::MatrixXd& x_raw, const Eigen::VectorXd& y,
                             const TestOptions& options) {
  if (y.size() != x_raw.rows())
    throw std::invalid_argument("test pipeline: response length does not match design rows");

  const DesignContext ctx = build_design(x_raw, /*standardize=*/true);
  const double lambda =
      options.ridge_lambda > 0.0 ? options.ridge_lambda : 1.0 / static_cast<double>(ctx.n);
  const double lambda0 =
      options.lambda0 > 0.0 ? options.lambda0 : default_scaled_lasso_lambda0(ctx.n, ctx.p);
  const RidgeCovariance cov = ridge_covariance(ctx, lambda);
  const InitialFit init = scaled_lasso_fit(ctx, y, lambda0);
  const CorrectedRidgeFit fit = corrected_fit(ctx, cov, init, y, lambda, options.xi);
  const Eigen::VectorXd raw = single_pvalues(fit);

  const MonteCarloConfig mc{options.mc_draws, options.seed, options.threads};
  const NullDistribution fz = simulate_fz(ctx, cov, mc);
  const Eigen::VectorXd adjusted = adjust_pvalues(raw, fz, options.zeta);

  TestReport report;
  report.n = static_cast<int>(ctx.n);
  report.p = static_cast<int>(ctx.p);
  report.rank = static_cast<int>(ctx.rank);
  report.sigma_hat = init.sigma_hat;
  report.alpha = options.alpha;
  report.ridge_lambda = lambda;
  report.lambda0 = lambda0;
  report.xi = options.xi;
  report.zeta = options.zeta;
  report.mc_draws = options.mc_draws;
  report.seed = options.seed;

  for (Eigen::Index j = 0; j < ctx.p; ++j) {
    CoefficientRecord rec;
    rec.index = static_cast<int>(j) + 1;
    rec.testable = !ctx.untestable[static_cast<std::size_t>(j)];
    rec.beta_corr_original = fit.beta_corr(j) / ctx.col_scales(j);
    rec.statistic = fit.stats(j);
    rec.delta = fit.delta(j);
    rec.p_raw = raw(j);
    rec.p_adjusted = adjusted(j);
    rec.reject = rec.p_adjusted <= options.alpha;
    report.coefficients.push_back(rec);
  }

  if (!options.groups.empty()) {
    std::vector<double> raw_group_pvalues;
    for (const auto& group : options.groups)
      raw_group_pvalues.push_back(group_pvalue(fit, cov, ctx, group, mc));
    const Eigen::VectorXd adjusted_groups =
        adjust_group_pvalues(raw_group_pvalues, options.groups, ctx, cov, mc, options.zeta);
    for (std::size_t g = 0; g < options.groups.size(); ++g) {
      GroupRecord rec;
      rec.label = options.groups[g].label;
      for (int idx : options.groups[g].indices) rec.indices.push_back(idx + 1);
      double gamma = 0.0;
      for (int idx : options.groups[g].indices) gamma = std::max(gamma, fit.stats(idx));
      rec.gamma = gamma;
      rec.p_raw = raw_group_pvalues[g];
      rec.p_adjusted = adjusted_groups(static_cast<Eigen::Index>(g));
      rec.reject = rec.p_adjusted <= options.alpha;
      report.groups.push_back(rec);
    }
  }

  for (Eigen::Index j = 0; j < ctx.p; ++j) {
    if (ctx.constant_col[static_cast<std::size_t>(j)])
      report.warnings.push_back("column " + std::to_string(j + 1) +
                                " is constant and excluded from testing");
    else if (ctx.untestable[static_cast<std::size_t>(j)])
      report.warnings.push_back("column " + std::to_string(j + 1) +
                                " is untestable (zero projection variance)");
  }
  if (!init.converged)
    report.warnings.push_back("scaled lasso did not converge within the iteration budget");

  return report;
}

}  // namespace hdinfer
