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
#include <sstream>
#include <string>

#include "dpvb/experiment.hpp"

using namespace dpvb;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.classes = 2;
  cfg.features = 2;
  cfg.levels = {2, 2};
  cfg.n_grid = {30, 60};
  cfg.epsilon_grid = {0.1, 1.0};
  cfg.outer_reps = 2;
  cfg.inner_reps = 2;
  cfg.seed = 4321;
  cfg.fit.max_iter = 200;
  return cfg;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("dpvb_exp_" + name)).string();
}

bool same_records(const ExperimentRecord& a, const ExperimentRecord& b) {
  return a.outer_rep == b.outer_rep && a.inner_rep == b.inner_rep && a.epsilon == b.epsilon &&
         a.n_total == b.n_total && a.estimator == b.estimator && a.sq_error == b.sq_error &&
         a.iterations == b.iterations && a.converged == b.converged;
}

}  // namespace

TEST_CASE("record count follows the grid size") {
  const ExperimentConfig cfg = small_config();
  const auto records = run_experiment(cfg);
  CHECK(records.size() == 2u * 2u * 2u * 2u * 3u);

  // The default study grid would produce 5 * 4 * 10 * 5 * 3 = 3000 records.
  const ExperimentConfig defaults;
  CHECK(defaults.epsilon_grid.size() * defaults.n_grid.size() * defaults.outer_reps *
            defaults.inner_reps * 3 ==
        3000u);
}

TEST_CASE("runs are deterministic given the master seed") {
  const ExperimentConfig cfg = small_config();
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(same_records(a[i], b[i]));

  const std::string p1 = temp_path("a.csv"), p2 = temp_path("b.csv");
  write_records_csv(p1, a);
  write_records_csv(p2, b);
  CHECK(detail::read_text_file(p1) == detail::read_text_file(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("parallel execution matches the serial order") {
  ExperimentConfig cfg = small_config();
  const auto serial = run_experiment(cfg);
  cfg.jobs = 3;
  const auto parallel = run_experiment(cfg);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) CHECK(same_records(serial[i], parallel[i]));
}

TEST_CASE("bayes records ignore epsilon within a dataset cell") {
  const auto records = run_experiment(small_config());
  std::map<std::pair<std::int64_t, int>, std::vector<double>> bayes_errors;
  for (const auto& rec : records)
    if (rec.estimator == EstimatorKind::kBayes)
      bayes_errors[{rec.n_total, rec.outer_rep}].push_back(rec.sq_error);
  for (const auto& [key, errs] : bayes_errors) {
    REQUIRE(errs.size() == 4u);  // 2 epsilons x 2 inner reps
    for (double e : errs) CHECK(e == errs.front());
  }
}

TEST_CASE("grid order does not change a cell's records") {
  ExperimentConfig fwd = small_config();
  ExperimentConfig rev = small_config();
  rev.n_grid = {60, 30};
  rev.epsilon_grid = {1.0, 0.1};
  const auto a = run_experiment(fwd);
  const auto b = run_experiment(rev);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(same_records(a[i], b[i]));
}

TEST_CASE("sq_error respects the loose simplex bound") {
  const ExperimentConfig cfg = small_config();
  const auto records = run_experiment(cfg);
  const double limit = cfg.classes + 2.0 * cfg.classes * cfg.features;
  for (const auto& rec : records) {
    CHECK(rec.sq_error >= 0.0);
    CHECK(rec.sq_error <= limit);
  }
}

TEST_CASE("summarize statistics") {
  std::vector<ExperimentRecord> records;
  for (double v : {4.0, 1.0, 3.0, 2.0})
    records.push_back({0, 0, 0.1, 50, EstimatorKind::kVb, v, 1, true, 0});
  const auto rows = summarize(records);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].count == 4);
  CHECK(rows[0].mean == 2.5);
  CHECK(rows[0].median == 2.5);
  CHECK(rows[0].q1 == 1.75);
  CHECK(rows[0].q3 == 3.25);
  CHECK(rows[0].min == 1.0);
  CHECK(rows[0].max == 4.0);

  // Order independence.
  std::reverse(records.begin(), records.end());
  const auto again = summarize(records);
  CHECK(again[0].mean == rows[0].mean);
  CHECK(again[0].q1 == rows[0].q1);

  const std::vector<ExperimentRecord> single{records.front()};
  const auto one = summarize(single);
  CHECK(one[0].mean == one[0].median);
  CHECK(one[0].min == one[0].max);
  CHECK(one[0].mean == records.front().sq_error);

  CHECK_THROWS_AS(summarize({}), std::invalid_argument);
}

TEST_CASE("summary rows are ordered N-ascending then epsilon-ascending") {
  const auto records = run_experiment(small_config());
  const auto rows = summarize(records);
  REQUIRE(rows.size() == 2u * 2u * 3u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const bool n_ok = rows[i].n_total > rows[i - 1].n_total ||
                      (rows[i].n_total == rows[i - 1].n_total &&
                       (rows[i].epsilon > rows[i - 1].epsilon ||
                        (rows[i].epsilon == rows[i - 1].epsilon &&
                         static_cast<int>(rows[i].estimator) >
                             static_cast<int>(rows[i - 1].estimator))));
    CHECK(n_ok);
  }
}

TEST_CASE("outer-mean collapse averages inner replicates") {
  std::vector<ExperimentRecord> records;
  records.push_back({0, 0, 0.1, 50, EstimatorKind::kVb, 1.0, 1, true, 0});
  records.push_back({0, 1, 0.1, 50, EstimatorKind::kVb, 3.0, 1, true, 0});
  records.push_back({1, 0, 0.1, 50, EstimatorKind::kVb, 5.0, 1, true, 0});
  const auto collapsed = collapse_to_outer_means(records);
  REQUIRE(collapsed.size() == 2);
  CHECK(collapsed[0].sq_error == 2.0);
  CHECK(collapsed[1].sq_error == 5.0);
}

TEST_CASE("plot emission is ordered, complete, and byte-stable") {
  const auto records = run_experiment(small_config());
  const auto summary = summarize(records);
  const std::string path = temp_path("plot.csv");
  emit_plot_data(summary, path);
  const std::string first = detail::read_text_file(path);
  emit_plot_data(summary, path);
  CHECK(detail::read_text_file(path) == first);

  std::istringstream in(first);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "n,epsilon,estimator,count,min,q1,median,q3,max,mean");
  int boxes = 0;
  std::vector<std::string> first_fields;
  while (std::getline(in, line))
    if (!line.empty()) ++boxes;
  CHECK(boxes == 2 * 2 * 3);  // one box per (N, epsilon, estimator)

  const std::string svg = detail::read_text_file(path + ".svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("N = 30") != std::string::npos);
  CHECK(svg.find("N = 60") != std::string::npos);
  std::remove(path.c_str());
  std::remove((path + ".svg").c_str());
}

TEST_CASE("vb iteration counts land in the records") {
  const auto records = run_experiment(small_config());
  bool saw_vb_iterations = false;
  for (const auto& rec : records) {
    if (rec.estimator == EstimatorKind::kVb && rec.iterations > 0) saw_vb_iterations = true;
    if (rec.estimator != EstimatorKind::kVb) CHECK(rec.iterations == 0);
    CHECK(rec.wall_ms == 0);
  }
  CHECK(saw_vb_iterations);
}
