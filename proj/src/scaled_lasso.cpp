#include "hdinfer/scaled_lasso.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace hdinfer {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double lasso_objective(const Eigen::VectorXd& residual, const Eigen::VectorXd& beta,
                       double lambda, double n) {
  return residual.squaredNorm() / n + lambda * beta.lpNorm<1>();
}

}  // namespace

Eigen::VectorXd lasso_fit(const DesignContext& ctx, const Eigen::VectorXd& y, double lambda,
                          const Eigen::VectorXd* warm_start, std::vector<double>* objective_trace,
                          const LassoOptions& options) {
  if (y.size() != ctx.n) throw std::invalid_argument("lasso_fit: response length mismatch");
  if (lambda < 0.0) throw std::invalid_argument("lasso_fit: lambda must be nonnegative");

  const Eigen::Index p = ctx.p;
  const double n = static_cast<double>(ctx.n);
  const Eigen::VectorXd yc = ctx.center_response(y);

  // diag(n^-1 X'X); 1 for standardized columns, 0 for constant ones.
  Eigen::VectorXd col_sqnorm(p);
  for (Eigen::Index j = 0; j < p; ++j) col_sqnorm(j) = ctx.x_std.col(j).squaredNorm() / n;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  if (warm_start) {
    if (warm_start->size() != p) throw std::invalid_argument("lasso_fit: warm start length mismatch");
    beta = *warm_start;
    for (Eigen::Index j = 0; j < p; ++j)
      if (col_sqnorm(j) == 0.0) beta(j) = 0.0;
  }
  Eigen::VectorXd residual = yc - ctx.x_std * beta;

  const double threshold = lambda / 2.0;
  int sweeps = 0;

  auto sweep = [&](bool active_only) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_sqnorm(j) == 0.0) continue;
      if (active_only && beta(j) == 0.0) continue;
      const double old = beta(j);
      const double z = ctx.x_std.col(j).dot(residual) / n + col_sqnorm(j) * old;
      const double updated = soft_threshold(z, threshold) / col_sqnorm(j);
      if (updated != old) {
        residual.noalias() -= ctx.x_std.col(j) * (updated - old);
        beta(j) = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    ++sweeps;
    if (objective_trace) objective_trace->push_back(lasso_objective(residual, beta, lambda, n));
    return max_change;
  };

  auto kkt_satisfied = [&](const Eigen::VectorXd& b, const Eigen::VectorXd& res) {
    const Eigen::VectorXd grad = ctx.x_std.transpose() * res / n;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_sqnorm(j) == 0.0) continue;
      if (b(j) != 0.0) {
        if (std::abs(grad(j) - threshold * (b(j) > 0 ? 1.0 : -1.0)) > options.kkt_tol)
          return false;
      } else if (std::abs(grad(j)) > threshold + options.kkt_tol) {
        return false;
      }
    }
    return true;
  };

  // Once the sign pattern stops moving, the restricted problem is a linear
  // system; plain cyclic descent can need thousands of sweeps on strongly
  // correlated designs. Solve the working-set system directly, pull KKT
  // violators into the working set, and accept only when the full KKT
  // conditions hold with the solved signs matching the assumed ones.
  auto exact_finish = [&]() -> bool {
    std::vector<Eigen::Index> working;
    Eigen::VectorXd signs = Eigen::VectorXd::Zero(p);
    for (Eigen::Index j = 0; j < p; ++j) {
      if (beta(j) != 0.0) {
        working.push_back(j);
        signs(j) = beta(j) > 0 ? 1.0 : -1.0;
      }
    }
    if (working.empty()) return kkt_satisfied(beta, residual);
    const Eigen::Index cap = std::min<Eigen::Index>(p, 2 * ctx.n);

    constexpr int kMaxRounds = 40;
    for (int round = 0; round < kMaxRounds; ++round) {
      const auto k = static_cast<Eigen::Index>(working.size());
      if (k > cap) return false;
      Eigen::MatrixXd gram(k, k);
      Eigen::VectorXd rhs(k);
      for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = a; b < k; ++b) {
          gram(a, b) = ctx.x_std.col(working[a]).dot(ctx.x_std.col(working[b])) / n;
          gram(b, a) = gram(a, b);
        }
        rhs(a) = ctx.x_std.col(working[a]).dot(yc) / n - threshold * signs(working[a]);
      }
      const Eigen::VectorXd solved = gram.ldlt().solve(rhs);
      if (!solved.allFinite()) return false;
      if (lambda > 0.0) {
        // sign flips mean those coordinates leave the support; drop and re-solve
        std::vector<Eigen::Index> kept;
        kept.reserve(working.size());
        for (Eigen::Index a = 0; a < k; ++a)
          if (solved(a) * signs(working[a]) > 0.0) kept.push_back(working[a]);
        if (kept.empty()) return false;
        if (static_cast<Eigen::Index>(kept.size()) < k) {
          working = std::move(kept);
          continue;
        }
      }
      Eigen::VectorXd candidate = Eigen::VectorXd::Zero(p);
      for (Eigen::Index a = 0; a < k; ++a) candidate(working[a]) = solved(a);
      const Eigen::VectorXd candidate_residual = yc - ctx.x_std * candidate;
      const Eigen::VectorXd grad = ctx.x_std.transpose() * candidate_residual / n;

      // coordinates outside the working set whose correlation breaches the
      // threshold must enter before the candidate can be stationary
      std::vector<std::pair<double, Eigen::Index>> violators;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (col_sqnorm(j) == 0.0 || candidate(j) != 0.0) continue;
        const double excess = std::abs(grad(j)) - threshold;
        if (excess > options.kkt_tol) violators.emplace_back(excess, j);
      }
      if (violators.empty()) {
        if (!kkt_satisfied(candidate, candidate_residual)) return false;
        beta = candidate;
        residual = candidate_residual;
        if (objective_trace)
          objective_trace->push_back(lasso_objective(residual, beta, lambda, n));
        return true;
      }
      std::sort(violators.begin(), violators.end(), [](const auto& a, const auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
      });
      const std::size_t add = std::min<std::size_t>(violators.size(), 10);
      for (std::size_t v = 0; v < add; ++v) {
        const Eigen::Index j = violators[v].second;
        working.push_back(j);
        signs(j) = grad(j) > 0 ? 1.0 : -1.0;
      }
    }
    return false;
  };

  while (sweeps < options.max_sweeps) {
    const double full_change = sweep(/*active_only=*/false);
    for (int polish = 0; polish < 5 && sweeps < options.max_sweeps; ++polish) {
      if (sweep(/*active_only=*/true) <= options.tol) break;
    }
    if (exact_finish()) return beta;
    if (full_change <= options.tol && kkt_satisfied(beta, residual)) return beta;
  }
  throw LassoConvergenceError("lasso_fit: no convergence after max sweeps", beta);
}

double default_scaled_lasso_lambda0(Eigen::Index n, Eigen::Index p) {
  // floored at p = 2: the formula degenerates to zero for a single covariate
  const double dim = static_cast<double>(std::max<Eigen::Index>(p, 2));
  return 2.0 * std::sqrt(std::log(dim) / static_cast<double>(n));
}

InitialFit scaled_lasso_fit(const DesignContext& ctx, const Eigen::VectorXd& y, double lambda0) {
  if (!(lambda0 > 0.0)) throw std::invalid_argument("scaled_lasso_fit: lambda0 must be positive");
  if (y.size() != ctx.n) throw std::invalid_argument("scaled_lasso_fit: response length mismatch");

  const double n = static_cast<double>(ctx.n);
  const Eigen::VectorXd yc = ctx.center_response(y);

  InitialFit fit;
  fit.lambda0 = lambda0;
  fit.beta_init = Eigen::VectorXd::Zero(ctx.p);

  constexpr int kMaxOuter = 50;
  constexpr double kSigmaTol = 1e-8;
  double sigma_prev = -1.0;
  for (int iter = 0; iter < kMaxOuter; ++iter) {
    const Eigen::VectorXd residual = yc - ctx.x_std * fit.beta_init;
    const double sigma = residual.norm() / std::sqrt(n);
    if (sigma < 1e-12)
      throw std::runtime_error("scaled_lasso_fit: degenerate noise estimate");
    fit.sigma_hat = sigma;
    fit.iterations = iter;
    if (sigma_prev >= 0.0 && std::abs(sigma - sigma_prev) <= kSigmaTol) {
      fit.converged = true;
      return fit;
    }
    sigma_prev = sigma;
    // Penalty sigma * lambda0 under the |.|^2/n objective; the stationary
    // point satisfies |n^-1 X_j' r| = sigma * lambda0 / 2 on the active set.
    fit.beta_init = lasso_fit(ctx, y, sigma * lambda0, &fit.beta_init);
  }
  fit.iterations = kMaxOuter;
  return fit;
}

}  // namespace hdinfer
