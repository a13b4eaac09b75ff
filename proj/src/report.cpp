#include "hdinfer/report.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace hdinfer {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json json_double_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::string model_name(DesignModel model) {
  return model == DesignModel::kM1 ? "m1" : "m2";
}

ordered_json group_to_json(const GroupHypothesis& group) {
  ordered_json j;
  j["label"] = group.label;
  std::vector<int> one_based;
  one_based.reserve(group.indices.size());
  for (int idx : group.indices) one_based.push_back(idx + 1);
  j["indices"] = one_based;
  return j;
}

}  // namespace

std::string test_report_to_json(const TestReport& report) {
  ordered_json j;
  j["n"] = report.n;
  j["p"] = report.p;
  j["rank"] = report.rank;
  j["sigma_hat"] = report.sigma_hat;
  j["config"] = {{"alpha", report.alpha},
                 {"ridge_lambda", report.ridge_lambda},
                 {"lambda0", report.lambda0},
                 {"xi", report.xi},
                 {"zeta", report.zeta},
                 {"mc_draws", report.mc_draws},
                 {"seed", report.seed}};
  j["coefficients"] = ordered_json::array();
  for (const auto& c : report.coefficients) {
    j["coefficients"].push_back({{"index", c.index},
                                 {"testable", c.testable},
                                 {"beta_corr", c.beta_corr_original},
                                 {"statistic", c.statistic},
                                 {"delta", c.delta},
                                 {"p_raw", c.p_raw},
                                 {"p_adjusted", c.p_adjusted},
                                 {"reject", c.reject}});
  }
  j["groups"] = ordered_json::array();
  for (const auto& g : report.groups) {
    j["groups"].push_back({{"label", g.label},
                           {"indices", g.indices},
                           {"gamma", g.gamma},
                           {"p_raw", g.p_raw},
                           {"p_adjusted", g.p_adjusted},
                           {"reject", g.reject}});
  }
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

TestReport test_report_from_json(const std::string& json_text) {
  const auto j = ordered_json::parse(json_text);
  TestReport report;
  report.n = j.at("n").get<int>();
  report.p = j.at("p").get<int>();
  report.rank = j.at("rank").get<int>();
  report.sigma_hat = j.at("sigma_hat").get<double>();
  const auto& cfg = j.at("config");
  report.alpha = cfg.at("alpha").get<double>();
  report.ridge_lambda = cfg.at("ridge_lambda").get<double>();
  report.lambda0 = cfg.at("lambda0").get<double>();
  report.xi = cfg.at("xi").get<double>();
  report.zeta = cfg.at("zeta").get<double>();
  report.mc_draws = cfg.at("mc_draws").get<std::int64_t>();
  report.seed = cfg.at("seed").get<std::uint64_t>();
  for (const auto& c : j.at("coefficients")) {
    CoefficientRecord rec;
    rec.index = c.at("index").get<int>();
    rec.testable = c.at("testable").get<bool>();
    rec.beta_corr_original = c.at("beta_corr").get<double>();
    rec.statistic = c.at("statistic").get<double>();
    rec.delta = c.at("delta").get<double>();
    rec.p_raw = c.at("p_raw").get<double>();
    rec.p_adjusted = c.at("p_adjusted").get<double>();
    rec.reject = c.at("reject").get<bool>();
    report.coefficients.push_back(rec);
  }
  for (const auto& g : j.at("groups")) {
    GroupRecord rec;
    rec.label = g.at("label").get<std::string>();
    rec.indices = g.at("indices").get<std::vector<int>>();
    rec.gamma = g.at("gamma").get<double>();
    rec.p_raw = g.at("p_raw").get<double>();
    rec.p_adjusted = g.at("p_adjusted").get<double>();
    rec.reject = g.at("reject").get<bool>();
    report.groups.push_back(rec);
  }
  report.warnings = j.at("warnings").get<std::vector<std::string>>();
  return report;
}

std::string test_report_to_csv(const TestReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "index,testable,beta_corr,statistic,delta,p_raw,p_adjusted,reject\n";
  for (const auto& c : report.coefficients) {
    out << c.index << ',' << (c.testable ? 1 : 0) << ',' << c.beta_corr_original << ','
        << c.statistic << ',' << c.delta << ',' << c.p_raw << ',' << c.p_adjusted << ','
        << (c.reject ? 1 : 0) << '\n';
  }
  if (!report.groups.empty()) {
    out << "\nlabel,gamma,p_raw,p_adjusted,reject\n";
    for (const auto& g : report.groups) {
      out << g.label << ',' << g.gamma << ',' << g.p_raw << ',' << g.p_adjusted << ','
          << (g.reject ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

std::string simulation_report_to_json(const SimulationReport& report) {
  ordered_json j;
  const auto& cfg = report.config;
  ordered_json config;
  config["model"] = model_name(cfg.model);
  config["n"] = cfg.n;
  config["p"] = cfg.p;
  config["s0"] = cfg.s0;
  config["b"] = cfg.b;
  config["rho"] = cfg.effective_rho();
  config["sigma"] = cfg.sigma;
  config["reps"] = cfg.reps;
  config["alpha"] = cfg.alpha;
  config["seed"] = cfg.seed;
  config["mc_draws"] = cfg.mc_draws;
  config["ridge_lambda"] = cfg.effective_ridge_lambda();
  config["lambda0"] = cfg.effective_lambda0();
  config["xi"] = cfg.xi;
  config["zeta"] = cfg.zeta;
  config["group"] = cfg.group ? group_to_json(*cfg.group) : ordered_json(nullptr);
  config["null_group"] = cfg.null_group ? group_to_json(*cfg.null_group) : ordered_json(nullptr);
  j["config"] = config;
  j["snr"] = report.snr;
  j["avg_type1"] = report.avg_type1;
  j["avg_power"] = report.avg_power ? ordered_json(*report.avg_power) : ordered_json(nullptr);
  j["avg_power_adjusted"] =
      report.avg_power_adjusted ? ordered_json(*report.avg_power_adjusted) : ordered_json(nullptr);
  j["fwer"] = report.fwer;
  j["v_distribution"] = report.v_distribution;
  j["group_power"] = report.group_power ? ordered_json(*report.group_power) : ordered_json(nullptr);
  j["group_type1"] = report.group_type1 ? ordered_json(*report.group_type1) : ordered_json(nullptr);
  j["error_count"] = report.error_count;
  j["replicates"] = ordered_json::array();
  for (const auto& rec : report.reps) {
    ordered_json r;
    r["rep"] = rec.rep;
    r["error"] = rec.error;
    r["sigma_hat"] = rec.sigma_hat;
    r["scaled_lasso_iterations"] = rec.scaled_lasso_iterations;
    r["scaled_lasso_converged"] = rec.scaled_lasso_converged;
    r["raw_rejections_active"] = rec.raw_rejections_active;
    r["raw_rejections_null"] = rec.raw_rejections_null;
    r["adjusted_rejections_active"] = rec.adjusted_rejections_active;
    r["false_positives"] = rec.false_positives;
    r["group_pvalue"] = rec.group_pvalue ? ordered_json(*rec.group_pvalue) : ordered_json(nullptr);
    r["null_group_pvalue"] =
        rec.null_group_pvalue ? ordered_json(*rec.null_group_pvalue) : ordered_json(nullptr);
    j["replicates"].push_back(r);
  }
  return j.dump(2) + "\n";
}

std::string histogram_to_csv(const HistogramData& hist) {
  std::ostringstream out;
  out.precision(17);
  out << "bin_left,bin_right,count\n";
  for (std::size_t k = 0; k < hist.counts.size(); ++k)
    out << hist.bin_edges[k] << ',' << hist.bin_edges[k + 1] << ',' << hist.counts[k] << '\n';
  return out.str();
}

DesignDiagnostics compute_design_diagnostics(const DesignContext& ctx, double ridge_lambda,
                                             double sigma, int s0_bound) {
  DesignDiagnostics diag;
  diag.n = static_cast<int>(ctx.n);
  diag.p = static_cast<int>(ctx.p);
  diag.rank = static_cast<int>(ctx.rank);
  diag.lambda_min_nonzero = ctx.lambda_min_nonzero;
  diag.ridge_lambda = ridge_lambda;
  diag.sigma = sigma;
  diag.s0_bound = s0_bound;

  const RidgeCovariance cov = ridge_covariance(ctx, ridge_lambda);
  diag.omega_min = cov.omega_min;
  diag.minvar_condition_holds = cov.omega_min > 0.0;

  const KappaDiagnostics kappa = kappa_diagnostics(ctx);
  diag.kappa_summary = kappa.summary;
  diag.kappa.assign(kappa.kappa.data(), kappa.kappa.data() + kappa.kappa.size());

  const Eigen::VectorXd single =
      detection_bound(ctx, cov, sigma, s0_bound, DetectionMode::kSingle);
  const Eigen::VectorXd multiple =
      detection_bound(ctx, cov, sigma, s0_bound, DetectionMode::kMultiple);
  diag.detection_bound_single.assign(single.data(), single.data() + single.size());
  diag.detection_bound_multiple.assign(multiple.data(), multiple.data() + multiple.size());

  for (int j = 0; j < diag.p; ++j) {
    if (ctx.constant_col[static_cast<std::size_t>(j)]) diag.constant_columns.push_back(j + 1);
    if (ctx.untestable[static_cast<std::size_t>(j)]) diag.untestable_columns.push_back(j + 1);
  }
  return diag;
}

std::string design_diagnostics_to_json(const DesignDiagnostics& diag) {
  ordered_json j;
  j["n"] = diag.n;
  j["p"] = diag.p;
  j["rank"] = diag.rank;
  j["lambda_min_nonzero"] = diag.lambda_min_nonzero;
  j["ridge_lambda"] = diag.ridge_lambda;
  j["omega_min"] = diag.omega_min;
  j["minvar_condition_holds"] = diag.minvar_condition_holds;
  j["kappa_summary"] = {{"min", diag.kappa_summary.min},
                        {"q25", diag.kappa_summary.q25},
                        {"median", diag.kappa_summary.median},
                        {"q75", diag.kappa_summary.q75},
                        {"max", json_double_or_null(diag.kappa_summary.max)}};
  auto dump_values = [](const std::vector<double>& values) {
    ordered_json arr = ordered_json::array();
    for (double v : values) arr.push_back(json_double_or_null(v));
    return arr;
  };
  j["kappa"] = dump_values(diag.kappa);
  j["detection_bound"] = {{"sigma", diag.sigma},
                          {"s0_bound", diag.s0_bound},
                          {"single", dump_values(diag.detection_bound_single)},
                          {"multiple", dump_values(diag.detection_bound_multiple)}};
  j["constant_columns"] = diag.constant_columns;
  j["untestable_columns"] = diag.untestable_columns;
  return j.dump(2) + "\n";
}

std::vector<GroupHypothesis> parse_groups_json(const std::string& json_text, int p) {
  const auto j = ordered_json::parse(json_text);
  if (!j.is_array()) throw std::invalid_argument("groups file: expected a JSON array");
  std::vector<GroupHypothesis> groups;
  for (const auto& entry : j) {
    GroupHypothesis g;
    g.label = entry.value("label", "group" + std::to_string(groups.size() + 1));
    if (!entry.contains("indices"))
      throw std::invalid_argument("groups file: entry without indices");
    for (const auto& idx : entry.at("indices")) {
      const int one_based = idx.get<int>();
      g.indices.push_back(one_based - 1);
    }
    validate_group(g, p);
    groups.push_back(std::move(g));
  }
  if (groups.empty()) throw std::invalid_argument("groups file: no groups");
  return groups;
}

}  // namespace hdinfer
