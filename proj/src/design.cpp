#include "hdinfer/design.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hdinfer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool column_is_constant(const Eigen::VectorXd& col) {
  return col.maxCoeff() == col.minCoeff();
}

}  // namespace

Eigen::VectorXd DesignContext::proj_row(Eigen::Index j) const {
  if (px_materialized) return p_x.row(j);
  return v_mat * v_mat.row(j).transpose();
}

Eigen::VectorXd DesignContext::project(const Eigen::VectorXd& beta) const {
  return v_mat * (v_mat.transpose() * beta);
}

Eigen::Index DesignContext::n_testable() const {
  Eigen::Index count = 0;
  for (bool u : untestable)
    if (!u) ++count;
  return count;
}

Eigen::VectorXd DesignContext::center_response(const Eigen::VectorXd& y) const {
  if (!standardized) return y;
  return y.array() - y.mean();
}

DesignContext build_design(const Eigen::MatrixXd& x_raw, bool standardize) {
  const Eigen::Index n = x_raw.rows();
  const Eigen::Index p = x_raw.cols();
  if (n < 2) throw std::invalid_argument("build_design: need at least 2 observations");
  if (p < 1) throw std::invalid_argument("build_design: need at least 1 covariate");
  if (!x_raw.allFinite()) throw std::invalid_argument("build_design: non-finite entries in design");

  DesignContext ctx;
  ctx.n = n;
  ctx.p = p;
  ctx.standardized = standardize;
  ctx.col_means = Eigen::VectorXd::Zero(p);
  ctx.col_scales = Eigen::VectorXd::Ones(p);
  ctx.constant_col.assign(static_cast<std::size_t>(p), false);

  ctx.x_std = x_raw;
  Eigen::Index n_constant = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    const bool exact_constant = column_is_constant(x_raw.col(j));
    if (standardize) {
      const double mean = x_raw.col(j).mean();
      ctx.col_means(j) = mean;
      ctx.x_std.col(j).array() -= mean;
      const double scale = std::sqrt(ctx.x_std.col(j).squaredNorm() / static_cast<double>(n));
      const bool numerically_constant = scale <= 1e-14 * std::max(1.0, std::abs(mean));
      if (exact_constant || numerically_constant) {
        ctx.constant_col[static_cast<std::size_t>(j)] = true;
        ctx.x_std.col(j).setZero();
        ++n_constant;
      } else {
        ctx.col_scales(j) = scale;
        ctx.x_std.col(j) /= scale;
      }
    } else if (exact_constant) {
      ctx.constant_col[static_cast<std::size_t>(j)] = true;
      ++n_constant;
    }
  }
  if (n_constant == p) throw std::invalid_argument("build_design: degenerate design (all columns constant)");

  // SVD of n^{-1/2} X_std, so eigenvalues of Sigma_hat are the squared
  // singular values.
  const Eigen::MatrixXd scaled = ctx.x_std / std::sqrt(static_cast<double>(n));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& all_s = svd.singularValues();
  const double eps = std::numeric_limits<double>::epsilon();
  const double rank_threshold =
      all_s.size() > 0 ? all_s(0) * static_cast<double>(std::max(n, p)) * eps : 0.0;
  Eigen::Index r = 0;
  while (r < all_s.size() && all_s(r) > rank_threshold) ++r;
  if (r == 0) throw std::invalid_argument("build_design: degenerate design (numerical rank 0)");

  ctx.rank = r;
  ctx.s_vals = all_s.head(r);
  ctx.r_mat = svd.matrixU().leftCols(r);
  ctx.v_mat = svd.matrixV().leftCols(r);
  ctx.lambda_min_nonzero = ctx.s_vals(r - 1) * ctx.s_vals(r - 1);

  // Rows of V below representational noise are exactly zeroed so that the
  // untestable flag and omega_diag == 0 coincide.
  const double row_noise = static_cast<double>(std::max(n, p)) * eps;
  ctx.untestable.assign(static_cast<std::size_t>(p), false);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (ctx.v_mat.row(j).cwiseAbs().maxCoeff() <= row_noise) {
      ctx.v_mat.row(j).setZero();
      ctx.untestable[static_cast<std::size_t>(j)] = true;
    }
    if (ctx.constant_col[static_cast<std::size_t>(j)]) ctx.untestable[static_cast<std::size_t>(j)] = true;
  }

  // Projection diagnostics, blockwise over rows of P_X = V V'. The same
  // blocks fill the materialized matrix, so both representations carry
  // identical entries.
  ctx.px_materialized = p <= DesignContext::kMaterializePxLimit;
  if (ctx.px_materialized) ctx.p_x.resize(p, p);
  ctx.proj_diag = Eigen::VectorXd::Zero(p);
  ctx.proj_max_offdiag = Eigen::VectorXd::Zero(p);
  constexpr Eigen::Index kRowBlock = 256;
  Eigen::MatrixXd block;
  for (Eigen::Index b0 = 0; b0 < p; b0 += kRowBlock) {
    const Eigen::Index nb = std::min(kRowBlock, p - b0);
    block.noalias() = ctx.v_mat.middleRows(b0, nb) * ctx.v_mat.transpose();
    for (Eigen::Index i = 0; i < nb; ++i) {
      const Eigen::Index j = b0 + i;
      ctx.proj_diag(j) = block(i, j);
      double max_off = 0.0;
      for (Eigen::Index k = 0; k < p; ++k) {
        if (k == j) continue;
        max_off = std::max(max_off, std::abs(block(i, k)));
      }
      ctx.proj_max_offdiag(j) = max_off;
    }
    if (ctx.px_materialized) ctx.p_x.middleRows(b0, nb) = block;
  }

  return ctx;
}

RidgeCovariance ridge_covariance(const DesignContext& ctx, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("ridge_covariance: lambda must be positive");
  RidgeCovariance cov;
  cov.lambda = lambda;
  const Eigen::ArrayXd s2 = ctx.s_vals.array().square();
  const Eigen::ArrayXd weights = s2 / (s2 + lambda).square();
  cov.omega_diag = (ctx.v_mat.array().square().rowwise() * weights.transpose()).rowwise().sum();
  cov.omega_min = cov.omega_diag.minCoeff();
  cov.a_factors_unit.resize(ctx.p);
  for (Eigen::Index j = 0; j < ctx.p; ++j)
    cov.a_factors_unit(j) = cov.omega_diag(j) > 0.0 ? 1.0 / std::sqrt(cov.omega_diag(j)) : kInf;
  return cov;
}

Eigen::VectorXd ridge_fit(const DesignContext& ctx, const Eigen::VectorXd& y, double lambda) {
  if (y.size() != ctx.n) throw std::invalid_argument("ridge_fit: response length mismatch");
  if (!(lambda > 0.0)) throw std::invalid_argument("ridge_fit: lambda must be positive");
  const Eigen::VectorXd yc = ctx.center_response(y);
  const Eigen::ArrayXd s = ctx.s_vals.array();
  const Eigen::VectorXd scale =
      (s / (std::sqrt(static_cast<double>(ctx.n)) * (s.square() + lambda))).matrix();
  return ctx.v_mat * scale.asDiagonal() * (ctx.r_mat.transpose() * yc);
}

KappaDiagnostics kappa_diagnostics(const DesignContext& ctx) {
  KappaDiagnostics diag;
  diag.kappa.resize(ctx.p);
  for (Eigen::Index j = 0; j < ctx.p; ++j) {
    if (ctx.proj_diag(j) > 0.0) {
      diag.kappa(j) = ctx.proj_max_offdiag(j) / ctx.proj_diag(j);
    } else {
      diag.kappa(j) = kInf;
      diag.any_untestable = true;
    }
  }
  std::vector<double> values(diag.kappa.data(), diag.kappa.data() + diag.kappa.size());
  diag.summary = summarize_quantiles(std::move(values));
  return diag;
}

Eigen::VectorXd detection_bound(const DesignContext& ctx, const RidgeCovariance& cov,
                                double sigma, int s0_bound, DetectionMode mode) {
  if (!(sigma > 0.0)) throw std::invalid_argument("detection_bound: sigma must be positive");
  if (s0_bound < 1) throw std::invalid_argument("detection_bound: s0_bound must be at least 1");
  const double n = static_cast<double>(ctx.n);
  const double logp = std::log(static_cast<double>(ctx.p));
  const double ratio_scale = static_cast<double>(s0_bound) * std::sqrt(logp / n);
  const double numerator = mode == DetectionMode::kMultiple ? std::sqrt(logp) : 1.0;
  Eigen::VectorXd bound(ctx.p);
  for (Eigen::Index j = 0; j < ctx.p; ++j) {
    if (ctx.proj_diag(j) <= 0.0) {
      bound(j) = kInf;
      continue;
    }
    const double kappa_term = ctx.proj_max_offdiag(j) / ctx.proj_diag(j) * ratio_scale;
    const double a_j = std::sqrt(n) / sigma * cov.a_factors_unit(j);
    const double variance_term = numerator / (ctx.proj_diag(j) * a_j);
    bound(j) = std::max(kappa_term, variance_term);
  }
  return bound;
}

}  // namespace hdinfer
