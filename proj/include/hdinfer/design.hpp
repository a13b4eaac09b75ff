#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hdinfer/mathutil.hpp"

namespace hdinfer {

// Standardized design matrix with its thin SVD and projection machinery.
//
// The stored singular values are those of n^{-1/2} * x_std, so the sample
// covariance Sigma_hat = n^{-1} X'X equals V diag(s^2) V' and the Ridge
// covariance formulas below can be evaluated directly on (s, V).
//
// Immutable after construction; safe to share across threads.
struct DesignContext {
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  bool standardized = false;

  Eigen::MatrixXd x_std;       // n x p, columns scaled so diag(n^-1 X'X) = 1
  Eigen::VectorXd col_means;   // length p (zero when not standardizing)
  Eigen::VectorXd col_scales;  // length p, positive (1 for constant columns)

  Eigen::MatrixXd r_mat;   // n x r left singular vectors
  Eigen::VectorXd s_vals;  // length r, positive, nonincreasing
  Eigen::MatrixXd v_mat;   // p x r right singular vectors, noise rows zeroed
  Eigen::Index rank = 0;
  double lambda_min_nonzero = 0.0;  // smallest nonzero eigenvalue of Sigma_hat

  Eigen::VectorXd proj_diag;         // (P_X)_jj
  Eigen::VectorXd proj_max_offdiag;  // max_{k != j} |(P_X)_jk|

  std::vector<bool> constant_col;  // zero-variance input columns
  std::vector<bool> untestable;    // constant or zero row of V

  // P_X = V V' materialized only up to the size cap; proj_row covers both
  // representations with identical arithmetic.
  Eigen::MatrixXd p_x;
  bool px_materialized = false;

  static constexpr Eigen::Index kMaterializePxLimit = 8000;

  Eigen::VectorXd proj_row(Eigen::Index j) const;

  // P_X * beta computed as V (V' beta).
  Eigen::VectorXd project(const Eigen::VectorXd& beta) const;

  Eigen::Index n_testable() const;

  // Centers y when the design was standardized, otherwise returns it as is.
  Eigen::VectorXd center_response(const Eigen::VectorXd& y) const;
};

DesignContext build_design(const Eigen::MatrixXd& x_raw, bool standardize);

// Ridge covariance diagnostics Omega(lambda) = V diag(s^2/(s^2+lambda)^2) V'.
struct RidgeCovariance {
  double lambda = 0.0;
  Eigen::VectorXd omega_diag;
  double omega_min = 0.0;
  // Omega_jj^{-1/2}, the sigma- and n-free part of the normalizing factors;
  // +inf on untestable coordinates.
  Eigen::VectorXd a_factors_unit;
};

RidgeCovariance ridge_covariance(const DesignContext& ctx, double lambda);

// Ridge fit (Sigma_hat + lambda I)^{-1} n^{-1} X'y through the SVD.
Eigen::VectorXd ridge_fit(const DesignContext& ctx, const Eigen::VectorXd& y, double lambda);

struct KappaDiagnostics {
  Eigen::VectorXd kappa;  // max_{k != j}|(P_X)_jk| / |(P_X)_jj|, +inf when diag is 0
  QuantileSummary summary;
  bool any_untestable = false;
};

KappaDiagnostics kappa_diagnostics(const DesignContext& ctx);

enum class DetectionMode { kSingle, kMultiple };

// Unitless per-coefficient detection scale (constant C = 1): the larger of
// the projection-ratio term kappa_j * s0 * sqrt(log p / n) and the variance
// term [sqrt(log p) or 1] / ((P_X)_jj * a_j(sigma)).
Eigen::VectorXd detection_bound(const DesignContext& ctx, const RidgeCovariance& cov,
                                double sigma, int s0_bound, DetectionMode mode);

}  // namespace hdinfer
