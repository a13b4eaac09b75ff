#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hdinfer/report.hpp"

namespace hdinfer {

struct TestOptions {
  double alpha = 0.05;
  double ridge_lambda = -1.0;  // negative means 1/n
  double lambda0 = -1.0;       // negative means 2 sqrt(log p / n)
  double xi = 0.05;
  double zeta = 0.0;
  std::int64_t mc_draws = 10000;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<GroupHypothesis> groups;
};

// Full single-dataset pipeline: standardize, Scaled Lasso, corrected Ridge,
// raw and FWER-adjusted p-values, optional group hypotheses.
TestReport run_test_pipeline(const Eigen::MatrixXd& x_raw, const Eigen::VectorXd& y,
                             const TestOptions& options);

}  // namespace hdinfer
