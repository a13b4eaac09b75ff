#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "hdinfer/design.hpp"

namespace hdinfer {

struct LassoOptions {
  double tol = 1e-7;       // max coefficient change per sweep
  double kkt_tol = 1e-8;   // gradient residual at the reported solution
  int max_sweeps = 1000;
};

// Thrown when coordinate descent exhausts its sweep budget; carries the best
// iterate found so far.
class LassoConvergenceError : public std::runtime_error {
 public:
  LassoConvergenceError(std::string what, Eigen::VectorXd best_iterate)
      : std::runtime_error(std::move(what)), best(std::move(best_iterate)) {}
  Eigen::VectorXd best;
};

// Coordinate-descent minimizer of |y - X beta|^2 / n + lambda |beta|_1.
// With this objective the soft threshold sits at lambda/2, so beta = 0 as
// soon as lambda >= max_j |2 n^-1 X_j'y|.
Eigen::VectorXd lasso_fit(const DesignContext& ctx, const Eigen::VectorXd& y, double lambda,
                          const Eigen::VectorXd* warm_start = nullptr,
                          std::vector<double>* objective_trace = nullptr,
                          const LassoOptions& options = {});

struct InitialFit {
  Eigen::VectorXd beta_init;  // standardized scale
  double sigma_hat = 0.0;
  double lambda0 = 0.0;
  int iterations = 0;
  bool converged = false;
};

double default_scaled_lasso_lambda0(Eigen::Index n, Eigen::Index p);

// Alternates sigma_hat <- |y - X beta|_2 / sqrt(n) with a Lasso fit at
// penalty sigma_hat * lambda0, whose stationary point satisfies
// |n^-1 X_j'(y - X beta)| = sigma_hat * lambda0 / 2 on the active set.
InitialFit scaled_lasso_fit(const DesignContext& ctx, const Eigen::VectorXd& y, double lambda0);

}  // namespace hdinfer
