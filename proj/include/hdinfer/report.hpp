#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hdinfer/design.hpp"
#include "hdinfer/inference.hpp"
#include "hdinfer/simlab.hpp"

namespace hdinfer {

struct CoefficientRecord {
  int index = 0;  // 1-based, as reported
  bool testable = true;
  double beta_corr_original = 0.0;  // corrected coefficient, input scale
  double statistic = 0.0;           // a_j(sigma_hat) |beta_corr_j|, standardized scale
  double delta = 0.0;
  double p_raw = 1.0;
  double p_adjusted = 1.0;
  bool reject = false;  // p_adjusted <= alpha
};

struct GroupRecord {
  std::string label;
  std::vector<int> indices;  // 1-based echo
  double gamma = 0.0;
  double p_raw = 1.0;
  double p_adjusted = 1.0;
  bool reject = false;
};

struct TestReport {
  int n = 0;
  int p = 0;
  int rank = 0;
  double sigma_hat = 0.0;
  double alpha = 0.05;
  double ridge_lambda = 0.0;
  double lambda0 = 0.0;
  double xi = 0.05;
  double zeta = 0.0;
  std::int64_t mc_draws = 10000;
  std::uint64_t seed = 0;
  std::vector<CoefficientRecord> coefficients;
  std::vector<GroupRecord> groups;
  std::vector<std::string> warnings;
};

std::string test_report_to_json(const TestReport& report);
TestReport test_report_from_json(const std::string& json_text);
std::string test_report_to_csv(const TestReport& report);

std::string simulation_report_to_json(const SimulationReport& report);

std::string histogram_to_csv(const HistogramData& hist);

struct DesignDiagnostics {
  int n = 0;
  int p = 0;
  int rank = 0;
  double lambda_min_nonzero = 0.0;
  double ridge_lambda = 0.0;
  double omega_min = 0.0;
  bool minvar_condition_holds = false;
  QuantileSummary kappa_summary;
  std::vector<double> kappa;  // +inf serialized as null
  std::vector<double> detection_bound_single;
  std::vector<double> detection_bound_multiple;
  double sigma = 1.0;
  int s0_bound = 1;
  std::vector<int> constant_columns;  // 1-based
  std::vector<int> untestable_columns;
};

DesignDiagnostics compute_design_diagnostics(const DesignContext& ctx, double ridge_lambda,
                                             double sigma, int s0_bound);
std::string design_diagnostics_to_json(const DesignDiagnostics& diag);

// Groups file: [{"label": str, "indices": [int, ...]}] with 1-based indices.
std::vector<GroupHypothesis> parse_groups_json(const std::string& json_text, int p);

}  // namespace hdinfer
