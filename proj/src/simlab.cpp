#include "hdinfer/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "hdinfer/mathutil.hpp"
#include "hdinfer/parallel.hpp"
#include "hdinfer/rng.hpp"
#include "hdinfer/scaled_lasso.hpp"

namespace hdinfer {

double ScenarioConfig::effective_rho() const {
  if (rho >= 0.0) return rho;
  return model == DesignModel::kM2 ? 0.8 : 0.0;
}

double ScenarioConfig::effective_ridge_lambda() const {
  return ridge_lambda > 0.0 ? ridge_lambda : 1.0 / static_cast<double>(n);
}

double ScenarioConfig::effective_lambda0() const {
  return lambda0 > 0.0 ? lambda0 : default_scaled_lasso_lambda0(n, p);
}

void ScenarioConfig::validate() const {
  if (n < 2 || p < 1) throw std::invalid_argument("scenario: need n >= 2 and p >= 1");
  if (s0 < 0 || s0 > p) throw std::invalid_argument("scenario: s0 must lie in [0, p]");
  if (s0 > 0 && !(b > 0.0)) throw std::invalid_argument("scenario: b must be positive");
  const double r = effective_rho();
  if (r < 0.0 || r >= 1.0) throw std::invalid_argument("scenario: rho must lie in [0, 1)");
  if (!(sigma > 0.0)) throw std::invalid_argument("scenario: sigma must be positive");
  if (reps < 1) throw std::invalid_argument("scenario: reps must be at least 1");
  if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("scenario: alpha must lie in (0, 1)");
  if (mc_draws < 1000) throw std::invalid_argument("scenario: need at least 1000 Monte Carlo draws");
  if (group) validate_group(*group, p);
  if (null_group) validate_group(*null_group, p);
}

Eigen::MatrixXd generate_design(const ScenarioConfig& cfg, std::uint64_t seed) {
  Eigen::MatrixXd x(cfg.n, cfg.p);
  Rng rng = Rng::substream(seed, kStreamDesign);
  const double rho = cfg.effective_rho();
  if (rho == 0.0) {
    for (int i = 0; i < cfg.n; ++i)
      for (int j = 0; j < cfg.p; ++j) x(i, j) = rng.normal();
    return x;
  }
  const double shared = std::sqrt(rho);
  const double own = std::sqrt(1.0 - rho);
  for (int i = 0; i < cfg.n; ++i) {
    const double g = rng.normal();
    for (int j = 0; j < cfg.p; ++j) x(i, j) = shared * g + own * rng.normal();
  }
  return x;
}

Eigen::VectorXd projection_bias_values(const DesignContext& ctx, const RidgeCovariance& cov,
                                       double sigma, const Eigen::VectorXd& beta_init,
                                       const Eigen::VectorXd& beta_true) {
  if (!(sigma > 0.0)) throw std::invalid_argument("projection_bias_values: sigma must be positive");
  const Eigen::VectorXd diff = beta_init - beta_true;
  const Eigen::VectorXd projected = ctx.project(diff);
  const double sqrt_n = std::sqrt(static_cast<double>(ctx.n));
  Eigen::VectorXd values = Eigen::VectorXd::Zero(ctx.p);
  for (Eigen::Index j = 0; j < ctx.p; ++j) {
    if (ctx.untestable[static_cast<std::size_t>(j)]) continue;
    const double a_j = sqrt_n / sigma * cov.a_factors_unit(j);
    values(j) = a_j * (projected(j) - ctx.proj_diag(j) * diff(j));
  }
  return values;
}

namespace {

struct ScenarioEngine {
  const ScenarioConfig& cfg;
  Eigen::MatrixXd x_raw;
  Eigen::VectorXd beta_true_raw;
  DesignContext ctx;
  RidgeCovariance cov;
  double lambda = 0.0;
  double lambda0 = 0.0;
  NullDistribution fz;
  // Null statistics a_j|Z_j| for tracked coefficients, tracked x draws.
  std::vector<int> tracked_cols;
  std::vector<Eigen::Index> tracked_pos;  // position by coefficient, -1 if untracked
  Eigen::MatrixXd tracked_stats;

  explicit ScenarioEngine(const ScenarioConfig& config) : cfg(config) {
    cfg.validate();
    x_raw = generate_design(cfg, cfg.seed);
    beta_true_raw = Eigen::VectorXd::Zero(cfg.p);
    beta_true_raw.head(cfg.s0).setConstant(cfg.b);
    ctx = build_design(x_raw, /*standardize=*/true);
    lambda = cfg.effective_ridge_lambda();
    lambda0 = cfg.effective_lambda0();
    cov = ridge_covariance(ctx, lambda);
    simulate_null_pass();
  }

  double snr() const {
    return (x_raw * beta_true_raw).norm() /
           (std::sqrt(static_cast<double>(cfg.n)) * cfg.sigma);
  }

  // One ensemble serves both the F_Z minima and the group null statistics;
  // the design is fixed per scenario so both are functions of the design
  // alone (the delta shift is applied per replicate at evaluation time).
  void simulate_null_pass() {
    std::set<int> tracked;
    if (cfg.group) tracked.insert(cfg.group->indices.begin(), cfg.group->indices.end());
    if (cfg.null_group) tracked.insert(cfg.null_group->indices.begin(), cfg.null_group->indices.end());
    tracked_cols.assign(tracked.begin(), tracked.end());
    tracked_pos.assign(static_cast<std::size_t>(cfg.p), -1);
    for (std::size_t i = 0; i < tracked_cols.size(); ++i)
      tracked_pos[static_cast<std::size_t>(tracked_cols[i])] = static_cast<Eigen::Index>(i);

    fz.draws = cfg.mc_draws;
    fz.seed = cfg.seed;
    fz.kind = NullKind::kIndividual;
    fz.sorted_min_pvalues.assign(static_cast<std::size_t>(cfg.mc_draws), 0.0);
    if (!tracked_cols.empty())
      tracked_stats.resize(static_cast<Eigen::Index>(tracked_cols.size()), cfg.mc_draws);

    const NullSampler sampler(ctx, cov, cfg.seed);
    parallel_for_chunks(cfg.mc_draws, NullSampler::kBlock, cfg.threads,
                        [&](std::int64_t first, std::int64_t last) {
                          Eigen::MatrixXd stats;
                          sampler.fill_block(first, last - first, stats);
                          for (std::int64_t b = 0; b < last - first; ++b) {
                            const double max_stat = stats.col(b).maxCoeff();
                            fz.sorted_min_pvalues[static_cast<std::size_t>(first + b)] =
                                clamp01(two_sided_pvalue(max_stat));
                            for (std::size_t i = 0; i < tracked_cols.size(); ++i)
                              tracked_stats(static_cast<Eigen::Index>(i), first + b) =
                                  stats(tracked_cols[i], b);
                          }
                        });
    std::sort(fz.sorted_min_pvalues.begin(), fz.sorted_min_pvalues.end());
  }

  double tracked_group_pvalue(const GroupHypothesis& group, const Eigen::VectorXd& stats,
                              const Eigen::VectorXd& delta) const {
    double gamma_hat = 0.0;
    for (int j : group.indices) gamma_hat = std::max(gamma_hat, stats(j));
    std::int64_t exceed = 0;
    for (std::int64_t b = 0; b < cfg.mc_draws; ++b) {
      double mx = 0.0;
      for (int j : group.indices) {
        const Eigen::Index pos = tracked_pos[static_cast<std::size_t>(j)];
        mx = std::max(mx, tracked_stats(pos, b) + delta(j));
      }
      if (mx >= gamma_hat) {
        ++exceed;
      }
    }
    return static_cast<double>(1 + exceed) / static_cast<double>(cfg.mc_draws + 1);
  }

  RepRecord run_replicate(int rep) const {
    RepRecord rec;
    rec.rep = rep;
    Rng rng = Rng::substream(cfg.seed, kStreamNoise, static_cast<std::uint64_t>(rep));
    Eigen::VectorXd noise(cfg.n);
    for (int i = 0; i < cfg.n; ++i) noise(i) = cfg.sigma * rng.normal();
    const Eigen::VectorXd y = x_raw * beta_true_raw + noise;

    const InitialFit init = scaled_lasso_fit(ctx, y, lambda0);
    rec.sigma_hat = init.sigma_hat;
    rec.scaled_lasso_iterations = init.iterations;
    rec.scaled_lasso_converged = init.converged;

    const CorrectedRidgeFit fit = corrected_fit(ctx, cov, init, y, lambda, cfg.xi);
    const Eigen::VectorXd raw = single_pvalues(fit);
    const Eigen::VectorXd adjusted = adjust_pvalues(raw, fz, cfg.zeta);

    for (int j = 0; j < cfg.p; ++j) {
      const bool active = j < cfg.s0;
      if (raw(j) <= cfg.alpha) (active ? rec.raw_rejections_active : rec.raw_rejections_null)++;
      if (adjusted(j) <= cfg.alpha) (active ? rec.adjusted_rejections_active : rec.false_positives)++;
    }
    if (cfg.group) rec.group_pvalue = tracked_group_pvalue(*cfg.group, fit.stats, fit.delta);
    if (cfg.null_group)
      rec.null_group_pvalue = tracked_group_pvalue(*cfg.null_group, fit.stats, fit.delta);
    return rec;
  }
};

// Tail indices outside the active set and the configured group, used as the
// type-I counterpart when no explicit null group is given.
std::optional<GroupHypothesis> derive_null_group(const ScenarioConfig& cfg) {
  if (!cfg.group || cfg.null_group) return cfg.null_group;
  bool covers_active = false;
  for (int j : cfg.group->indices)
    if (j < cfg.s0) covers_active = true;
  if (!covers_active) return std::nullopt;
  std::set<int> taken(cfg.group->indices.begin(), cfg.group->indices.end());
  GroupHypothesis null_group;
  null_group.label = "null_counterpart";
  for (int j = cfg.p - 1; j >= cfg.s0 && static_cast<int>(null_group.indices.size()) <
                                             static_cast<int>(cfg.group->indices.size());
       --j) {
    if (taken.count(j) == 0) null_group.indices.push_back(j);
  }
  if (null_group.indices.size() != cfg.group->indices.size()) return std::nullopt;
  std::sort(null_group.indices.begin(), null_group.indices.end());
  return null_group;
}

}  // namespace

SimulationReport run_scenario(const ScenarioConfig& cfg_in) {
  ScenarioConfig cfg = cfg_in;
  cfg.null_group = derive_null_group(cfg);
  const ScenarioEngine engine(cfg);

  std::vector<RepRecord> records(static_cast<std::size_t>(cfg.reps));
  parallel_for_chunks(cfg.reps, 1, cfg.threads, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t rep = lo; rep < hi; ++rep) {
      try {
        records[static_cast<std::size_t>(rep)] = engine.run_replicate(static_cast<int>(rep));
      } catch (const std::exception& e) {
        records[static_cast<std::size_t>(rep)].rep = static_cast<int>(rep);
        records[static_cast<std::size_t>(rep)].error = e.what();
      }
    }
  });

  SimulationReport report;
  report.config = cfg;
  report.snr = engine.snr();
  report.reps = std::move(records);

  const int n_null = cfg.p - cfg.s0;
  double sum_type1 = 0.0, sum_power = 0.0, sum_power_adj = 0.0;
  double sum_group_reject = 0.0, sum_null_group_reject = 0.0;
  int ok = 0, max_v = 0;
  for (const auto& rec : report.reps) {
    if (!rec.error.empty()) {
      ++report.error_count;
      continue;
    }
    ++ok;
    max_v = std::max(max_v, rec.false_positives);
    if (n_null > 0) sum_type1 += static_cast<double>(rec.raw_rejections_null) / n_null;
    if (cfg.s0 > 0) {
      sum_power += static_cast<double>(rec.raw_rejections_active) / cfg.s0;
      sum_power_adj += static_cast<double>(rec.adjusted_rejections_active) / cfg.s0;
    }
    if (rec.group_pvalue) sum_group_reject += *rec.group_pvalue <= cfg.alpha ? 1.0 : 0.0;
    if (rec.null_group_pvalue)
      sum_null_group_reject += *rec.null_group_pvalue <= cfg.alpha ? 1.0 : 0.0;
  }
  if (report.error_count > 0 &&
      static_cast<double>(report.error_count) > 0.01 * static_cast<double>(cfg.reps)) {
    throw std::runtime_error("run_scenario: more than 1% of replicates failed (" +
                             std::to_string(report.error_count) + " of " +
                             std::to_string(cfg.reps) + ")");
  }
  if (ok == 0) throw std::runtime_error("run_scenario: no successful replicates");

  report.v_distribution.assign(static_cast<std::size_t>(max_v) + 1, 0);
  for (const auto& rec : report.reps)
    if (rec.error.empty()) ++report.v_distribution[static_cast<std::size_t>(rec.false_positives)];

  report.avg_type1 = n_null > 0 ? sum_type1 / ok : 0.0;
  if (cfg.s0 > 0) {
    report.avg_power = sum_power / ok;
    report.avg_power_adjusted = sum_power_adj / ok;
  }
  report.fwer = 1.0 - static_cast<double>(report.v_distribution[0]) / static_cast<double>(ok);
  if (cfg.group) {
    bool group_is_alt = false;
    for (int j : cfg.group->indices)
      if (j < cfg.s0) group_is_alt = true;
    if (group_is_alt)
      report.group_power = sum_group_reject / ok;
    else
      report.group_type1 = sum_group_reject / ok;
  }
  if (cfg.null_group) report.group_type1 = sum_null_group_reject / ok;
  return report;
}

HistogramData projection_bias_histogram(const ScenarioConfig& cfg_in, int bins) {
  if (bins < 1) throw std::invalid_argument("projection_bias_histogram: need at least one bin");
  ScenarioConfig cfg = cfg_in;
  cfg.group.reset();
  cfg.null_group.reset();
  cfg.validate();

  const Eigen::MatrixXd x_raw = generate_design(cfg, cfg.seed);
  Eigen::VectorXd beta_true_raw = Eigen::VectorXd::Zero(cfg.p);
  beta_true_raw.head(cfg.s0).setConstant(cfg.b);
  const DesignContext ctx = build_design(x_raw, /*standardize=*/true);
  const RidgeCovariance cov = ridge_covariance(ctx, cfg.effective_ridge_lambda());
  const double lambda0 = cfg.effective_lambda0();
  const Eigen::VectorXd beta_true_std = beta_true_raw.cwiseProduct(ctx.col_scales);

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(cfg.reps) * static_cast<std::size_t>(cfg.p));
  std::vector<Eigen::VectorXd> per_rep(static_cast<std::size_t>(cfg.reps));
  parallel_for_chunks(cfg.reps, 1, cfg.threads, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t rep = lo; rep < hi; ++rep) {
      Rng rng = Rng::substream(cfg.seed, kStreamNoise, static_cast<std::uint64_t>(rep));
      Eigen::VectorXd noise(cfg.n);
      for (int i = 0; i < cfg.n; ++i) noise(i) = cfg.sigma * rng.normal();
      const Eigen::VectorXd y = x_raw * beta_true_raw + noise;
      const InitialFit init = scaled_lasso_fit(ctx, y, lambda0);
      per_rep[static_cast<std::size_t>(rep)] =
          projection_bias_values(ctx, cov, cfg.sigma, init.beta_init, beta_true_std);
    }
  });
  for (const auto& v : per_rep)
    for (Eigen::Index j = 0; j < v.size(); ++j) values.push_back(v(j));

  HistogramData hist;
  hist.total = static_cast<std::int64_t>(values.size());
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / bins;
  hist.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int k = 0; k <= bins; ++k) hist.bin_edges[static_cast<std::size_t>(k)] = lo + width * k;
  hist.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    auto bin = static_cast<std::int64_t>((v - lo) / width);
    bin = std::clamp<std::int64_t>(bin, 0, bins - 1);
    ++hist.counts[static_cast<std::size_t>(bin)];
  }
  return hist;
}

}  // namespace hdinfer
