//
// Copyright 2026 The dpvb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Command-line front end. Exit codes: 0 success, 2 usage error, 3 I/O error,
// 4 numeric failure.

#include <chrono>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpvb/dpvb.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

std::vector<int> parse_levels(const std::string& text, int features) {
  std::vector<int> levels;
  std::string part;
  std::istringstream ss(text);
  while (std::getline(ss, part, ',')) levels.push_back(std::stoi(part));
  if (levels.size() == 1) levels.assign(features, levels.front());
  return levels;
}

int run_simulate(int classes, int features, const std::string& levels_text, std::int64_t n,
                 std::uint64_t seed, double alpha, const std::string& out) {
  dpvb::ModelShape shape{classes, features, parse_levels(levels_text, features), n};
  shape.validate();
  const dpvb::PriorSpec prior = dpvb::PriorSpec::uniform(shape, alpha);
  dpvb::RngStream params_stream(seed, 1);
  dpvb::RngStream counts_stream(seed, 2);
  const dpvb::ModelParams params = dpvb::sample_model_params(shape, prior, params_stream);
  const dpvb::TrueMarginals truth = dpvb::sample_counts(params, shape, counts_stream);
  dpvb::write_dataset(out, truth, &params);
  std::cerr << "wrote dataset (" << classes << " classes, " << features << " features, N=" << n
            << ") to " << out << "\n";
  return 0;
}

int run_privatize(const std::string& in, double epsilon, std::uint64_t seed,
                  const std::string& out) {
  const dpvb::Dataset ds = dpvb::read_dataset(in);
  dpvb::RngStream noise_stream(seed, 3);
  const dpvb::NoisyMarginals noisy = dpvb::privatize(ds.marginals, epsilon, noise_stream);
  dpvb::write_noisy(out, noisy);
  std::cerr << "wrote noisy release (epsilon=" << epsilon
            << " per query, total=" << noisy.total_epsilon << ") to " << out << "\n";
  return 0;
}

int run_fit(const std::string& method, const std::string& in, const std::string& truth_path,
            double tol, int max_iter, double alpha, const std::string& init_mode,
            bool naive_conjugate, const std::string& out) {
  dpvb::FitConfig cfg;
  cfg.tol = tol;
  cfg.max_iter = max_iter;
  if (init_mode == "naive") cfg.init = dpvb::InitMode::kFromNaive;
  else if (init_mode == "uniform") cfg.init = dpvb::InitMode::kUniform;
  else throw CLI::ValidationError("--init", "must be 'naive' or 'uniform'");

  std::optional<dpvb::Dataset> truth;
  if (!truth_path.empty()) truth = dpvb::read_dataset(truth_path);

  dpvb::PosteriorEstimate est;
  dpvb::ModelShape shape;
  std::optional<dpvb::FitResult> fit_result;
  if (method == "vb" || method == "naive") {
    const dpvb::NoisyMarginals noisy = dpvb::read_noisy(in);
    shape = noisy.shape;
    const dpvb::PriorSpec prior = dpvb::PriorSpec::uniform(shape, alpha);
    if (method == "vb") {
      fit_result = dpvb::fit(noisy, prior, cfg);
      est = dpvb::estimate_from_fit(*fit_result, shape);
      std::cerr << "vb fit: " << est.iterations << " iterations, "
                << (est.converged ? "converged" : "not converged") << "\n";
    } else {
      est = naive_conjugate ? dpvb::naive_estimate_conjugate(noisy, prior)
                            : dpvb::naive_estimate(noisy);
    }
  } else if (method == "bayes") {
    const dpvb::Dataset ds = truth ? *truth : dpvb::read_dataset(in);
    shape = ds.marginals.shape;
    const dpvb::PriorSpec prior = dpvb::PriorSpec::uniform(shape, alpha);
    est = dpvb::bayes_estimate(ds.marginals, prior);
  } else {
    throw CLI::ValidationError("--method", "must be vb, naive, or bayes");
  }

  std::optional<double> sq_error;
  if (truth && truth->params) sq_error = dpvb::squared_error(est.point, *truth->params);
  dpvb::write_posterior(out, est, shape, fit_result ? &*fit_result : nullptr,
                        method == "vb" ? &cfg : nullptr, sq_error);
  std::cerr << "wrote " << method << " posterior to " << out << "\n";
  return 0;
}

int run_experiment_cmd(const std::string& config_path, const std::string& out_csv, int jobs,
                       std::optional<std::uint64_t> seed) {
  dpvb::ExperimentConfig cfg = dpvb::parse_experiment_config(config_path);
  if (!out_csv.empty()) cfg.out_csv = out_csv;
  if (jobs > 0) cfg.jobs = jobs;
  if (seed) cfg.seed = *seed;
  if (cfg.out_csv.empty())
    throw CLI::ValidationError("--out-csv", "no output path given (flag or out_csv config key)");
  cfg.validate();

  const auto start = std::chrono::steady_clock::now();
  const std::vector<dpvb::ExperimentRecord> records = dpvb::run_experiment(cfg);
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  dpvb::write_records_csv(cfg.out_csv, records);
  std::cerr << records.size() << " records in " << elapsed.count() << " ms -> " << cfg.out_csv
            << "\n";
  if (!cfg.out_summary.empty() || !cfg.out_plot.empty()) {
    const auto summary = dpvb::summarize(records);
    if (!cfg.out_summary.empty()) dpvb::write_summary_csv(cfg.out_summary, summary);
    if (!cfg.out_plot.empty()) dpvb::emit_plot_data(summary, cfg.out_plot);
  }
  return 0;
}

int run_summarize(const std::string& in, const std::string& out, const std::string& plot,
                  const std::string& aggregate) {
  std::vector<dpvb::ExperimentRecord> records = dpvb::read_records_csv(in);
  if (aggregate == "outer-mean") records = dpvb::collapse_to_outer_means(records);
  else if (aggregate != "raw")
    throw CLI::ValidationError("--aggregate", "must be 'raw' or 'outer-mean'");
  const auto summary = dpvb::summarize(records);
  dpvb::write_summary_csv(out, summary);
  if (!plot.empty()) dpvb::emit_plot_data(summary, plot);
  std::cerr << summary.size() << " summary rows -> " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Valid Bayesian inference from Laplace-noised naive Bayes marginals"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
  int classes = 2, features = 5;
  std::string levels_text = "2";
  std::int64_t n = 100;
  std::uint64_t seed = 1;
  double alpha = 1.0;
  std::string out;
  simulate->add_option("--classes", classes, "number of classes I");
  simulate->add_option("--features", features, "number of features K");
  simulate->add_option("--levels", levels_text, "levels per feature (single value or comma list)");
  simulate->add_option("--n", n, "total sample size N")->required();
  simulate->add_option("--seed", seed, "random seed");
  simulate->add_option("--alpha", alpha, "Dirichlet concentration for the true parameters");
  simulate->add_option("--out", out, "output dataset file")->required();

  // privatize
  auto* privatize = app.add_subcommand("privatize", "release noisy marginals");
  std::string priv_in, priv_out;
  double epsilon = 0.1;
  std::uint64_t priv_seed = 1;
  privatize->add_option("--in", priv_in, "input dataset file")->required();
  privatize->add_option("--epsilon", epsilon, "privacy budget per marginal query")->required();
  privatize->add_option("--seed", priv_seed, "random seed");
  privatize->add_option("--out", priv_out, "output noisy-release file")->required();

  // fit
  auto* fit = app.add_subcommand("fit", "fit one estimator");
  std::string method, fit_in, truth_path, fit_out, init_mode = "naive";
  double tol = 1e-6, fit_alpha = 1.0;
  int max_iter = 500;
  bool naive_conjugate = false;
  fit->add_option("--method", method, "vb | naive | bayes")->required();
  fit->add_option("--in", fit_in, "noisy release (vb/naive) or dataset (bayes)")->required();
  fit->add_option("--truth", truth_path, "dataset file with ground truth for scoring");
  fit->add_option("--tol", tol, "relative bound-increase tolerance");
  fit->add_option("--max-iter", max_iter, "maximum coordinate-ascent sweeps");
  fit->add_option("--alpha", fit_alpha, "uniform Dirichlet prior value");
  fit->add_option("--init", init_mode, "starting point: naive | uniform");
  fit->add_flag("--naive-conjugate", naive_conjugate,
                "naive method: conjugate Dirichlet update instead of raw frequencies");
  fit->add_option("--out", fit_out, "output posterior file")->required();

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run the simulation study");
  std::string config_path, out_csv;
  int jobs = 0;
  std::uint64_t exp_seed = 0;
  bool seed_given = false;
  experiment->add_option("--config", config_path, "key=value configuration file")->required();
  experiment->add_option("--out-csv", out_csv, "records CSV output path");
  experiment->add_option("--jobs", jobs, "parallel dataset jobs");
  experiment->add_option("--seed", exp_seed, "master seed override")
      ->each([&seed_given](const std::string&) { seed_given = true; });

  // summarize
  auto* summarize = app.add_subcommand("summarize", "aggregate a records CSV");
  std::string sum_in, sum_out, plot_path, aggregate = "raw";
  summarize->add_option("--in", sum_in, "records CSV")->required();
  summarize->add_option("--out", sum_out, "summary CSV output path")->required();
  summarize->add_option("--plot", plot_path, "box-plot data file (SVG written alongside)");
  summarize->add_option("--aggregate", aggregate, "raw | outer-mean");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (simulate->parsed())
      return run_simulate(classes, features, levels_text, n, seed, alpha, out);
    if (privatize->parsed()) return run_privatize(priv_in, epsilon, priv_seed, priv_out);
    if (fit->parsed())
      return run_fit(method, fit_in, truth_path, tol, max_iter, fit_alpha, init_mode,
                     naive_conjugate, fit_out);
    if (experiment->parsed())
      return run_experiment_cmd(config_path, out_csv, jobs,
                                seed_given ? std::optional<std::uint64_t>(exp_seed) : std::nullopt);
    if (summarize->parsed()) return run_summarize(sum_in, sum_out, plot_path, aggregate);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const dpvb::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
