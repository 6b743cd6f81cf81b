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

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "dpvb/experiment.hpp"
#include "dpvb/io.hpp"

using namespace dpvb;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("dpvb_io_" + name)).string();
}

Dataset make_dataset(std::uint64_t seed, std::int64_t n) {
  const ModelShape shape{2, 2, {2, 3}, n};
  const PriorSpec prior = PriorSpec::uniform(shape);
  RngStream master(seed);
  RngStream ps = master.substream(1);
  RngStream cs = master.substream(2);
  Dataset ds;
  ds.params = sample_model_params(shape, prior, ps);
  ds.marginals = sample_counts(*ds.params, shape, cs);
  return ds;
}

}  // namespace

TEST_CASE("dataset files round trip") {
  const Dataset ds = make_dataset(5, 40);
  const std::string path = temp_path("dataset.json");
  write_dataset(path, ds.marginals, &*ds.params);
  const Dataset back = read_dataset(path);
  CHECK(back.marginals.shape == ds.marginals.shape);
  CHECK(back.marginals.class_counts == ds.marginals.class_counts);
  for (int k = 0; k < 2; ++k) CHECK(back.marginals.counts[k] == ds.marginals.counts[k]);
  REQUIRE(back.params.has_value());
  CHECK(back.params->class_probs == ds.params->class_probs);

  write_dataset(path, ds.marginals, nullptr);
  CHECK_FALSE(read_dataset(path).params.has_value());
  std::remove(path.c_str());
}

TEST_CASE("noisy release files round trip") {
  const Dataset ds = make_dataset(6, 25);
  RngStream noise(6, 9);
  const NoisyMarginals noisy = privatize(ds.marginals, 0.2, noise);
  const std::string path = temp_path("noisy.json");
  write_noisy(path, noisy);
  const NoisyMarginals back = read_noisy(path);
  CHECK(back.shape == noisy.shape);
  CHECK(back.spec.epsilon_per_query == noisy.spec.epsilon_per_query);
  CHECK(back.spec.scale == noisy.spec.scale);
  CHECK(back.total_epsilon == noisy.total_epsilon);
  for (int k = 0; k < 2; ++k) CHECK(back.values[k] == noisy.values[k]);
  std::remove(path.c_str());
}

TEST_CASE("read failures surface as IoError") {
  CHECK_THROWS_AS(read_dataset("/nonexistent/nowhere.json"), IoError);
  const std::string path = temp_path("garbage.json");
  detail::write_text_file(path, "{not json");
  CHECK_THROWS_AS(read_dataset(path), IoError);
  detail::write_text_file(path, R"({"shape": {"classes": 2}})");
  CHECK_THROWS_AS(read_dataset(path), IoError);
  // Inconsistent counts are rejected at read time.
  const Dataset ds = make_dataset(7, 30);
  nlohmann::json j;
  j["shape"] = {{"classes", 2}, {"features", 2}, {"levels", {2, 3}}, {"n_total", 30}};
  j["class_counts"] = {20, 9};  // sums to 29, not 30
  j["counts"] = nlohmann::json::array();
  for (const auto& t : ds.marginals.counts) j["counts"].push_back(t.data());
  detail::write_text_file(path, j.dump());
  CHECK_THROWS_AS(read_dataset(path), IoError);
  std::remove(path.c_str());
}

TEST_CASE("posterior files carry the fit artifacts") {
  const Dataset ds = make_dataset(8, 35);
  RngStream noise(8, 2);
  const NoisyMarginals noisy = privatize(ds.marginals, 0.3, noise);
  const PriorSpec prior = PriorSpec::uniform(noisy.shape);
  FitConfig cfg;
  const FitResult result = fit(noisy, prior, cfg);
  const PosteriorEstimate est = estimate_from_fit(result, noisy.shape);
  const std::string path = temp_path("posterior.json");
  write_posterior(path, est, noisy.shape, &result, &cfg, 0.125);

  const nlohmann::json j = nlohmann::json::parse(detail::read_text_file(path));
  CHECK(j.at("method") == "vb");
  CHECK(j.at("converged").get<bool>() == est.converged);
  CHECK(j.at("iterations").get<int>() == est.iterations);
  CHECK(j.at("bound_trace").size() == result.trace.size());
  CHECK(j.at("theta_class").size() == 2);
  CHECK(j.at("theta_cond").size() == 2);
  CHECK(j.at("theta_class")[0].get<double>() == result.state.theta_class[0]);
  CHECK(j.at("config").at("max_iter") == cfg.max_iter);
  CHECK(j.at("squared_error").get<double>() == 0.125);
  CHECK(j.at("class_posterior").size() == 2);
  CHECK(j.at("cond_posterior").size() == 2);
  std::remove(path.c_str());
}

TEST_CASE("format_double is shortest round trip") {
  CHECK(format_double(0.0001) == "0.0001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(1.525) == "1.525");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("experiment config parsing") {
  const std::string text = R"(
# grid
classes = 2
features = 3
levels = 2      # broadcast to all features
n_grid = 50, 100
epsilon_grid = 0.01, 0.1, 1
outer_reps = 4
inner_reps = 2
seed = 99
gen_alpha = 1.5
fit_alpha = 1.0
tol = 1e-7
max_iter = 300
init = uniform
resample_params = false
jobs = 2
out_csv = records.csv
)";
  const ExperimentConfig cfg = parse_experiment_config_text(text);
  CHECK(cfg.classes == 2);
  CHECK(cfg.features == 3);
  CHECK(cfg.levels == std::vector<int>{2, 2, 2});
  CHECK(cfg.n_grid == std::vector<std::int64_t>{50, 100});
  CHECK(cfg.epsilon_grid == std::vector<double>{0.01, 0.1, 1.0});
  CHECK(cfg.outer_reps == 4);
  CHECK(cfg.inner_reps == 2);
  CHECK(cfg.seed == 99);
  CHECK(cfg.gen_alpha == 1.5);
  CHECK(cfg.fit.tol == 1e-7);
  CHECK(cfg.fit.max_iter == 300);
  CHECK(cfg.fit.init == InitMode::kUniform);
  CHECK_FALSE(cfg.resample_params);
  CHECK(cfg.jobs == 2);
  CHECK(cfg.out_csv == "records.csv");
  CHECK_NOTHROW(cfg.validate());

  CHECK_THROWS_AS(parse_experiment_config_text("bogus_key = 3\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_experiment_config_text("resample_params = maybe\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_experiment_config_text("init = random\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_experiment_config_text("no equals sign\n"), std::invalid_argument);

  // Defaults parse clean and levels broadcast to the feature count.
  const ExperimentConfig defaults = parse_experiment_config_text("features = 4\n");
  CHECK(defaults.levels == std::vector<int>{2, 2, 2, 2});
}

TEST_CASE("records CSV round trips") {
  std::vector<ExperimentRecord> records{
      {0, 0, 0.01, 50, EstimatorKind::kNaive, 3.25, 0, true, 0},
      {0, 0, 0.01, 50, EstimatorKind::kVb, 1.5, 12, true, 0},
      {1, 3, 1.0, 200, EstimatorKind::kBayes, 0.015625, 0, true, 0},
  };
  const std::string path = temp_path("records.csv");
  write_records_csv(path, records);
  const auto back = read_records_csv(path);
  REQUIRE(back.size() == 3);
  CHECK(back[1].estimator == EstimatorKind::kVb);
  CHECK(back[1].sq_error == 1.5);
  CHECK(back[1].iterations == 12);
  CHECK(back[2].epsilon == 1.0);
  CHECK(back[2].n_total == 200);
  CHECK(back[2].sq_error == 0.015625);

  detail::write_text_file(path, std::string(kRecordsCsvHeader) + "\n0,0,oops,50,vb,1,1,true,0\n");
  CHECK_THROWS_AS(read_records_csv(path), IoError);
  detail::write_text_file(path, "wrong,header\n");
  CHECK_THROWS_AS(read_records_csv(path), IoError);
  std::remove(path.c_str());
}
