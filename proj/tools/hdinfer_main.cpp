// hdinfer - hypothesis testing for high-dimensional linear models.
//
// Subcommands:
//   test        p-values and FWER-adjusted decisions for user data
//   simulate    replicated synthetic scenarios with aggregate error metrics
//   design-diag projection and detection diagnostics for a design matrix

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "hdinfer/csv.hpp"
#include "hdinfer/pipeline.hpp"
#include "hdinfer/report.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitPipeline = 3;

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

struct TestArgs {
  std::string x_path, y_path, groups_path, out_path, format = "json";
  hdinfer::TestOptions options;
};

int run_test(const TestArgs& args) {
  const Eigen::MatrixXd x = hdinfer::read_csv_matrix(args.x_path);
  const Eigen::VectorXd y = hdinfer::read_csv_vector(args.y_path);
  if (y.size() != x.rows()) {
    std::cerr << "error: design has " << x.rows() << " rows but response has " << y.size()
              << " values\n";
    return kExitUsage;
  }
  hdinfer::TestOptions options = args.options;
  if (!args.groups_path.empty())
    options.groups = hdinfer::parse_groups_json(read_file(args.groups_path), static_cast<int>(x.cols()));
  const hdinfer::TestReport report = hdinfer::run_test_pipeline(x, y, options);
  write_output(args.out_path, args.format == "csv" ? hdinfer::test_report_to_csv(report)
                                                   : hdinfer::test_report_to_json(report));
  return 0;
}

struct SimulateArgs {
  std::string model = "m1";
  std::string out_path;
  std::string histogram_path;
  int group_size = 0;
  int histogram_bins = 101;
  hdinfer::ScenarioConfig cfg;
};

int run_simulate(SimulateArgs& args) {
  args.cfg.model = args.model == "m2" ? hdinfer::DesignModel::kM2 : hdinfer::DesignModel::kM1;
  if (args.group_size > 0) {
    if (args.group_size > args.cfg.p) {
      std::cerr << "error: --group-size exceeds p\n";
      return kExitUsage;
    }
    hdinfer::GroupHypothesis group;
    group.label = "leading_block";
    for (int j = 0; j < args.group_size; ++j) group.indices.push_back(j);
    args.cfg.group = group;
  }
  const hdinfer::SimulationReport report = hdinfer::run_scenario(args.cfg);
  write_output(args.out_path, hdinfer::simulation_report_to_json(report));
  if (!args.histogram_path.empty()) {
    const hdinfer::HistogramData hist =
        hdinfer::projection_bias_histogram(args.cfg, args.histogram_bins);
    write_output(args.histogram_path, hdinfer::histogram_to_csv(hist));
  }
  return 0;
}

struct DiagArgs {
  std::string x_path, out_path;
  double ridge_lambda = -1.0;
  double sigma = 1.0;
  int s0_bound = 1;
};

int run_design_diag(const DiagArgs& args) {
  const Eigen::MatrixXd x = hdinfer::read_csv_matrix(args.x_path);
  const hdinfer::DesignContext ctx = hdinfer::build_design(x, /*standardize=*/true);
  const double lambda =
      args.ridge_lambda > 0.0 ? args.ridge_lambda : 1.0 / static_cast<double>(ctx.n);
  const hdinfer::DesignDiagnostics diag =
      hdinfer::compute_design_diagnostics(ctx, lambda, args.sigma, args.s0_bound);
  write_output(args.out_path, hdinfer::design_diagnostics_to_json(diag));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Significance testing for high-dimensional linear models"};
  app.require_subcommand(1);

  TestArgs test_args;
  auto* test = app.add_subcommand("test", "Test coefficients of a linear model on CSV data");
  test->add_option("--x", test_args.x_path, "Design matrix CSV (rows = observations)")->required();
  test->add_option("--y", test_args.y_path, "Response CSV (single column)")->required();
  test->add_option("--groups", test_args.groups_path,
                   "Group hypotheses JSON: [{\"label\": str, \"indices\": [1-based, ...]}]");
  test->add_option("--alpha", test_args.options.alpha, "Significance level")->capture_default_str();
  test->add_option("--ridge-lambda", test_args.options.ridge_lambda,
                   "Ridge regularization (negative = auto 1/n)");
  test->add_option("--lambda0", test_args.options.lambda0,
                   "Scaled-lasso level (negative = auto 2 sqrt(log p / n))");
  test->add_option("--xi", test_args.options.xi, "Exponent in the delta bound")->capture_default_str();
  test->add_option("--zeta", test_args.options.zeta, "Adjustment offset")->capture_default_str();
  test->add_option("--mc-draws", test_args.options.mc_draws, "Monte Carlo draws")
      ->capture_default_str();
  test->add_option("--seed", test_args.options.seed, "RNG seed")->capture_default_str();
  test->add_option("--threads", test_args.options.threads, "Worker threads")
      ->envname("HDINFER_THREADS")
      ->capture_default_str();
  test->add_option("--out", test_args.out_path, "Output path (default stdout)");
  test->add_option("--format", test_args.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Run a replicated synthetic scenario");
  simulate->add_option("--model", sim_args.model, "m1 or m2")
      ->check(CLI::IsMember({"m1", "m2"}))
      ->required();
  simulate->add_option("--n", sim_args.cfg.n, "Observations")->required();
  simulate->add_option("--p", sim_args.cfg.p, "Covariates")->required();
  simulate->add_option("--s0", sim_args.cfg.s0, "Active-set size")->required();
  simulate->add_option("--b", sim_args.cfg.b, "Active coefficient magnitude")->required();
  simulate->add_option("--reps", sim_args.cfg.reps, "Replicates")->required();
  simulate->add_option("--seed", sim_args.cfg.seed, "RNG seed")->required();
  simulate->add_option("--rho", sim_args.cfg.rho, "Equicorrelation (default: 0 for m1, 0.8 for m2)");
  simulate->add_option("--sigma", sim_args.cfg.sigma, "Noise standard deviation")
      ->capture_default_str();
  simulate->add_option("--alpha", sim_args.cfg.alpha, "Significance level")->capture_default_str();
  simulate->add_option("--mc-draws", sim_args.cfg.mc_draws, "Monte Carlo draws")
      ->capture_default_str();
  simulate->add_option("--group-size", sim_args.group_size,
                       "Test the group {1..N} (a disjoint tail block supplies the type-I rate)");
  simulate->add_option("--threads", sim_args.cfg.threads, "Worker threads")
      ->envname("HDINFER_THREADS")
      ->capture_default_str();
  simulate->add_option("--out", sim_args.out_path, "Output path (default stdout)");
  simulate->add_option("--histogram", sim_args.histogram_path,
                       "Also write the projection-bias histogram CSV to this path");
  simulate->add_option("--histogram-bins", sim_args.histogram_bins, "Histogram bins")
      ->capture_default_str();

  DiagArgs diag_args;
  auto* diag = app.add_subcommand("design-diag", "Projection and detection diagnostics");
  diag->add_option("--x", diag_args.x_path, "Design matrix CSV")->required();
  diag->add_option("--ridge-lambda", diag_args.ridge_lambda,
                   "Ridge regularization (negative = auto 1/n)");
  diag->add_option("--sigma", diag_args.sigma, "Noise scale for detection bounds")
      ->capture_default_str();
  diag->add_option("--s0-bound", diag_args.s0_bound, "Sparsity bound for detection bounds")
      ->capture_default_str();
  diag->add_option("--out", diag_args.out_path, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (test->parsed()) return run_test(test_args);
    if (simulate->parsed()) return run_simulate(sim_args);
    if (diag->parsed()) return run_design_diag(diag_args);
  } catch (const hdinfer::CsvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "pipeline error: " << e.what() << "\n";
    return kExitPipeline;
  }
  return kExitUsage;
}
