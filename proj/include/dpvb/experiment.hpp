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
// Simulation-study harness: generate -> privatize -> fit the three
// estimators -> score squared errors, over a grid of (epsilon, N) cells.
// Every random stream is keyed by the cell's values (not grid positions), so
// reordering the grids or running cells in parallel never changes a cell's
// records, and the whole pipeline is byte-reproducible from the master seed.

#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "dpvb/estimators.hpp"
#include "dpvb/io.hpp"
#include "dpvb/model.hpp"
#include "dpvb/privacy.hpp"
#include "dpvb/rng.hpp"
#include "dpvb/vb.hpp"

namespace dpvb {

struct ExperimentConfig {
  int classes = 2;
  int features = 5;
  std::vector<int> levels = {2, 2, 2, 2, 2};
  std::vector<std::int64_t> n_grid = {50, 100, 200, 500};
  std::vector<double> epsilon_grid = {0.0001, 0.001, 0.01, 0.1, 1.0};
  int outer_reps = 10;
  int inner_reps = 5;
  std::uint64_t seed = 20260801;
  double gen_alpha = 1.0;  // Dirichlet concentration used to draw true params
  double fit_alpha = 1.0;  // prior used by the vb and bayes estimators
  FitConfig fit;
  bool resample_params = true;  // re-draw true params every outer rep
  int jobs = 1;
  std::string out_csv;
  std::string out_summary;
  std::string out_plot;

  void validate() const {
    if (n_grid.empty()) throw std::invalid_argument("ExperimentConfig: empty n_grid");
    if (epsilon_grid.empty()) throw std::invalid_argument("ExperimentConfig: empty epsilon_grid");
    for (std::int64_t n : n_grid)
      if (n < 0) throw std::invalid_argument("ExperimentConfig: negative n");
    for (double e : epsilon_grid)
      if (!(e > 0.0)) throw std::invalid_argument("ExperimentConfig: epsilon must be positive");
    if (outer_reps < 1 || inner_reps < 1)
      throw std::invalid_argument("ExperimentConfig: reps must be >= 1");
    if (!(gen_alpha > 0.0) || !(fit_alpha > 0.0))
      throw std::invalid_argument("ExperimentConfig: alphas must be positive");
    if (jobs < 1) throw std::invalid_argument("ExperimentConfig: jobs must be >= 1");
    ModelShape shape{classes, features, levels, n_grid.front()};
    shape.validate();
    fit.validate();
  }

  ModelShape shape_for(std::int64_t n) const { return ModelShape{classes, features, levels, n}; }
};

/// One scored (replicate, epsilon, N, estimator) row. wall_ms is fixed at 0
/// in persisted records: real timings are not reproducible, and the CSV
/// contract is byte-identical output for a given seed.
struct ExperimentRecord {
  int outer_rep = 0;
  int inner_rep = 0;
  double epsilon = 0.0;
  std::int64_t n_total = 0;
  EstimatorKind estimator = EstimatorKind::kNaive;
  double sq_error = 0.0;
  int iterations = 0;
  bool converged = true;
  std::int64_t wall_ms = 0;
};

namespace detail {

inline constexpr std::uint64_t kParamsTag = 0x706172616d73ull;
inline constexpr std::uint64_t kCountsTag = 0x636f756e7473ull;
inline constexpr std::uint64_t kNoiseTag = 0x6e6f697365ull;

inline std::uint64_t key_bits(double value) { return std::bit_cast<std::uint64_t>(value); }

template <typename T>
std::vector<T> sorted_unique(std::vector<T> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

}  // namespace detail

/// Runs the full grid. For each (N, outer_rep) a dataset is generated (true
/// parameters re-drawn per outer rep unless resample_params is off, counts
/// always re-drawn); each (epsilon, inner_rep) privatizes that dataset with
/// its own noise stream and scores all three estimators against the true
/// parameters. Record order: N ascending, outer, epsilon ascending, inner,
/// then naive/vb/bayes.
inline std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto n_grid = detail::sorted_unique(cfg.n_grid);
  const auto eps_grid = detail::sorted_unique(cfg.epsilon_grid);
  const RngStream master(cfg.seed);

  struct Job {
    std::int64_t n = 0;
    int outer = 0;
  };
  std::vector<Job> jobs;
  jobs.reserve(n_grid.size() * cfg.outer_reps);
  for (std::int64_t n : n_grid)
    for (int outer = 0; outer < cfg.outer_reps; ++outer) jobs.push_back({n, outer});

  std::vector<std::vector<ExperimentRecord>> per_job(jobs.size());

  auto run_job = [&](std::size_t index) {
    const Job job = jobs[index];
    const ModelShape shape = cfg.shape_for(job.n);
    const PriorSpec gen_prior = PriorSpec::uniform(shape, cfg.gen_alpha);
    const PriorSpec fit_prior = PriorSpec::uniform(shape, cfg.fit_alpha);

    RngStream params_stream =
        cfg.resample_params
            ? master.substream({detail::kParamsTag, static_cast<std::uint64_t>(job.n),
                                static_cast<std::uint64_t>(job.outer)})
            : master.substream({detail::kParamsTag, static_cast<std::uint64_t>(job.n)});
    const ModelParams params = sample_model_params(shape, gen_prior, params_stream);
    RngStream counts_stream = master.substream(
        {detail::kCountsTag, static_cast<std::uint64_t>(job.n), static_cast<std::uint64_t>(job.outer)});
    const TrueMarginals truth = sample_counts(params, shape, counts_stream);

    const PosteriorEstimate bayes = bayes_estimate(truth, fit_prior);
    const double bayes_err = squared_error(bayes.point, params);

    std::vector<ExperimentRecord>& out = per_job[index];
    out.reserve(eps_grid.size() * cfg.inner_reps * 3);
    for (double eps : eps_grid) {
      for (int inner = 0; inner < cfg.inner_reps; ++inner) {
        RngStream noise_stream = master.substream(
            {detail::kNoiseTag, static_cast<std::uint64_t>(job.n), detail::key_bits(eps),
             static_cast<std::uint64_t>(job.outer), static_cast<std::uint64_t>(inner)});
        const NoisyMarginals noisy = privatize(truth, eps, noise_stream);

        const PosteriorEstimate naive = naive_estimate(noisy);
        out.push_back({job.outer, inner, eps, job.n, EstimatorKind::kNaive,
                       squared_error(naive.point, params), 0, true, 0});

        const PosteriorEstimate vb = vb_estimate(noisy, fit_prior, cfg.fit);
        out.push_back({job.outer, inner, eps, job.n, EstimatorKind::kVb,
                       squared_error(vb.point, params), vb.iterations, vb.converged, 0});

        out.push_back({job.outer, inner, eps, job.n, EstimatorKind::kBayes, bayes_err, 0, true, 0});
      }
    }
  };

  if (cfg.jobs <= 1 || jobs.size() <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
  } else {
    std::atomic<std::size_t> next{0};
    const int worker_count = std::min<int>(cfg.jobs, static_cast<int>(jobs.size()));
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (int w = 0; w < worker_count; ++w)
      workers.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) run_job(i);
      });
    for (auto& t : workers) t.join();
  }

  std::vector<ExperimentRecord> records;
  for (auto& chunk : per_job)
    records.insert(records.end(), chunk.begin(), chunk.end());
  return records;
}

struct SummaryRow {
  double epsilon = 0.0;
  std::int64_t n_total = 0;
  EstimatorKind estimator = EstimatorKind::kNaive;
  std::int64_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

namespace detail {

/// Linear-interpolation quantile (type 7) on a sorted vector.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace detail

/// Per-(epsilon, N, estimator) squared-error statistics, rows ordered by N
/// ascending, then epsilon ascending, then naive/vb/bayes.
inline std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  std::map<std::tuple<std::int64_t, double, int>, std::vector<double>> groups;
  for (const auto& rec : records)
    groups[{rec.n_total, rec.epsilon, static_cast<int>(rec.estimator)}].push_back(rec.sq_error);

  std::vector<SummaryRow> rows;
  rows.reserve(groups.size());
  for (auto& [key, values] : groups) {
    std::sort(values.begin(), values.end());
    SummaryRow row;
    row.n_total = std::get<0>(key);
    row.epsilon = std::get<1>(key);
    row.estimator = static_cast<EstimatorKind>(std::get<2>(key));
    row.count = static_cast<std::int64_t>(values.size());
    double total = 0.0;
    for (double v : values) total += v;
    row.mean = total / static_cast<double>(values.size());
    row.median = detail::quantile_sorted(values, 0.5);
    row.q1 = detail::quantile_sorted(values, 0.25);
    row.q3 = detail::quantile_sorted(values, 0.75);
    row.min = values.front();
    row.max = values.back();
    rows.push_back(row);
  }
  return rows;
}

/// Collapses records to one row per (N, epsilon, estimator, outer_rep) whose
/// sq_error is the mean over inner replicates; summarizing the result gives
/// the per-outer-rep-mean reading of the box plots.
inline std::vector<ExperimentRecord> collapse_to_outer_means(
    const std::vector<ExperimentRecord>& records) {
  std::map<std::tuple<std::int64_t, double, int, int>, std::pair<double, int>> groups;
  for (const auto& rec : records) {
    auto& acc = groups[{rec.n_total, rec.epsilon, static_cast<int>(rec.estimator), rec.outer_rep}];
    acc.first += rec.sq_error;
    acc.second += 1;
  }
  std::vector<ExperimentRecord> out;
  out.reserve(groups.size());
  for (const auto& [key, acc] : groups) {
    ExperimentRecord rec;
    rec.n_total = std::get<0>(key);
    rec.epsilon = std::get<1>(key);
    rec.estimator = static_cast<EstimatorKind>(std::get<2>(key));
    rec.outer_rep = std::get<3>(key);
    rec.inner_rep = 0;
    rec.sq_error = acc.first / acc.second;
    out.push_back(rec);
  }
  return out;
}

inline const char* kRecordsCsvHeader =
    "outer_rep,inner_rep,epsilon,n,estimator,sq_error,iterations,converged,wall_ms";

inline void write_records_csv(const std::string& path,
                              const std::vector<ExperimentRecord>& records) {
  std::ostringstream out;
  out << kRecordsCsvHeader << "\n";
  for (const auto& rec : records) {
    out << rec.outer_rep << ',' << rec.inner_rep << ',' << format_double(rec.epsilon) << ','
        << rec.n_total << ',' << estimator_name(rec.estimator) << ','
        << format_double(rec.sq_error) << ',' << rec.iterations << ','
        << (rec.converged ? "true" : "false") << ',' << rec.wall_ms << "\n";
  }
  detail::write_text_file(path, out.str());
}

inline std::vector<ExperimentRecord> read_records_csv(const std::string& path) {
  std::istringstream in(detail::read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line != kRecordsCsvHeader)
    throw IoError("unexpected records CSV header in " + path);
  std::vector<ExperimentRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    auto next = [&]() {
      if (!std::getline(fields, field, ',')) throw IoError("short CSV row in " + path);
      return field;
    };
    try {
      ExperimentRecord rec;
      rec.outer_rep = std::stoi(next());
      rec.inner_rep = std::stoi(next());
      rec.epsilon = std::stod(next());
      rec.n_total = std::stoll(next());
      rec.estimator = estimator_from_name(next());
      rec.sq_error = std::stod(next());
      rec.iterations = std::stoi(next());
      rec.converged = next() == "true";
      rec.wall_ms = std::stoll(next());
      records.push_back(rec);
    } catch (const std::invalid_argument& e) {
      throw IoError("malformed CSV row in " + path + ": " + e.what());
    } catch (const std::out_of_range& e) {
      throw IoError("malformed CSV row in " + path + ": " + e.what());
    }
  }
  return records;
}

inline const char* kSummaryCsvHeader = "epsilon,n,estimator,count,mean,median,q1,q3,min,max";

inline void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << kSummaryCsvHeader << "\n";
  for (const auto& row : rows) {
    out << format_double(row.epsilon) << ',' << row.n_total << ',' << estimator_name(row.estimator)
        << ',' << row.count << ',' << format_double(row.mean) << ',' << format_double(row.median)
        << ',' << format_double(row.q1) << ',' << format_double(row.q3) << ','
        << format_double(row.min) << ',' << format_double(row.max) << "\n";
  }
  detail::write_text_file(path, out.str());
}

namespace detail {

inline std::string svg_boxplot(const std::vector<SummaryRow>& rows);

}  // namespace detail

/// Writes the grouped box-plot data file (one group per (N, epsilon), one box
/// per estimator, epsilon ascending within N ascending) and a companion SVG
/// rendering at `path` + ".svg".
inline void emit_plot_data(const std::vector<SummaryRow>& summary, const std::string& path) {
  std::vector<SummaryRow> rows = summary;
  std::sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
    if (a.n_total != b.n_total) return a.n_total < b.n_total;
    if (a.epsilon != b.epsilon) return a.epsilon < b.epsilon;
    return static_cast<int>(a.estimator) < static_cast<int>(b.estimator);
  });
  std::ostringstream out;
  out << "n,epsilon,estimator,count,min,q1,median,q3,max,mean\n";
  for (const auto& row : rows) {
    out << row.n_total << ',' << format_double(row.epsilon) << ',' << estimator_name(row.estimator)
        << ',' << row.count << ',' << format_double(row.min) << ',' << format_double(row.q1) << ','
        << format_double(row.median) << ',' << format_double(row.q3) << ','
        << format_double(row.max) << ',' << format_double(row.mean) << "\n";
  }
  detail::write_text_file(path, out.str());
  detail::write_text_file(path + ".svg", detail::svg_boxplot(rows));
}

namespace detail {

inline std::string svg_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

/// Grid of box plots: one panel per N, epsilon groups on the x axis, log10
/// squared error on the y axis, one colored box per estimator.
inline std::string svg_boxplot(const std::vector<SummaryRow>& rows) {
  std::vector<std::int64_t> n_values;
  std::vector<double> eps_values;
  for (const auto& r : rows) {
    n_values.push_back(r.n_total);
    eps_values.push_back(r.epsilon);
  }
  n_values = sorted_unique(n_values);
  eps_values = sorted_unique(eps_values);

  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& r : rows) {
    const double rmin = std::log10(std::max(r.min, 1e-12));
    const double rmax = std::log10(std::max(r.max, 1e-12));
    if (first) {
      lo = rmin;
      hi = rmax;
      first = false;
    } else {
      lo = std::min(lo, rmin);
      hi = std::max(hi, rmax);
    }
  }
  lo = std::floor(lo) - 0.2;
  hi = std::ceil(hi) + 0.2;

  constexpr double kBoxW = 12.0, kBoxGap = 3.0, kGroupPad = 16.0;
  const double group_w = 3 * kBoxW + 2 * kBoxGap + kGroupPad;
  const double panel_plot_w = eps_values.size() * group_w + kGroupPad;
  constexpr double kPlotH = 180.0, kTop = 40.0, kBottom = 42.0, kLeft = 52.0, kPanelGap = 18.0;
  const double panel_w = panel_plot_w;
  const double width = kLeft + n_values.size() * (panel_w + kPanelGap) + 10.0;
  const double height = kTop + kPlotH + kBottom;

  auto y_of = [&](double value) {
    const double v = std::log10(std::max(value, 1e-12));
    return kTop + kPlotH * (hi - v) / (hi - lo);
  };
  const char* colors[3] = {"#d62728", "#1f77b4", "#2ca02c"};  // naive, vb, bayes

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_number(width)
      << "\" height=\"" << svg_number(height) << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << svg_number(kLeft) << "\" y=\"14\" font-size=\"12\">"
      << "Squared error of naive / vb / bayes estimators by epsilon and N (log scale)</text>\n";
  for (int e = 0; e < 3; ++e) {
    const double lx = kLeft + 360.0 + e * 70.0;
    svg << "<rect x=\"" << svg_number(lx) << "\" y=\"8\" width=\"10\" height=\"10\" fill=\""
        << colors[e] << "\"/>\n";
    svg << "<text x=\"" << svg_number(lx + 14.0) << "\" y=\"17\">"
        << estimator_name(static_cast<EstimatorKind>(e)) << "</text>\n";
  }

  // y axis ticks at integer decades, drawn once on the left.
  for (int dec = static_cast<int>(std::ceil(lo)); dec <= static_cast<int>(std::floor(hi)); ++dec) {
    const double y = kTop + kPlotH * (hi - dec) / (hi - lo);
    svg << "<text x=\"6\" y=\"" << svg_number(y + 3.0) << "\">1e" << dec << "</text>\n";
    svg << "<line x1=\"" << svg_number(kLeft - 4.0) << "\" y1=\"" << svg_number(y) << "\" x2=\""
        << svg_number(kLeft + n_values.size() * (panel_w + kPanelGap) - kPanelGap) << "\" y2=\""
        << svg_number(y) << "\" stroke=\"#dddddd\"/>\n";
  }

  for (std::size_t p = 0; p < n_values.size(); ++p) {
    const double x0 = kLeft + p * (panel_w + kPanelGap);
    svg << "<rect x=\"" << svg_number(x0) << "\" y=\"" << svg_number(kTop) << "\" width=\""
        << svg_number(panel_w) << "\" height=\"" << svg_number(kPlotH)
        << "\" fill=\"none\" stroke=\"#888888\"/>\n";
    svg << "<text x=\"" << svg_number(x0 + panel_w / 2.0 - 18.0) << "\" y=\""
        << svg_number(kTop - 6.0) << "\">N = " << n_values[p] << "</text>\n";
    for (std::size_t g = 0; g < eps_values.size(); ++g) {
      const double gx = x0 + kGroupPad + g * group_w;
      svg << "<text x=\"" << svg_number(gx) << "\" y=\"" << svg_number(kTop + kPlotH + 14.0)
          << "\">" << format_double(eps_values[g]) << "</text>\n";
      for (const auto& r : rows) {
        if (r.n_total != n_values[p] || r.epsilon != eps_values[g]) continue;
        const int e = static_cast<int>(r.estimator);
        const double bx = gx + e * (kBoxW + kBoxGap);
        const double cx = bx + kBoxW / 2.0;
        svg << "<line x1=\"" << svg_number(cx) << "\" y1=\"" << svg_number(y_of(r.min))
            << "\" x2=\"" << svg_number(cx) << "\" y2=\"" << svg_number(y_of(r.max))
            << "\" stroke=\"" << colors[e] << "\"/>\n";
        svg << "<rect x=\"" << svg_number(bx) << "\" y=\"" << svg_number(y_of(r.q3))
            << "\" width=\"" << svg_number(kBoxW) << "\" height=\""
            << svg_number(std::max(y_of(r.q1) - y_of(r.q3), 0.5)) << "\" fill=\"" << colors[e]
            << "\" fill-opacity=\"0.45\" stroke=\"" << colors[e] << "\"/>\n";
        svg << "<line x1=\"" << svg_number(bx) << "\" y1=\"" << svg_number(y_of(r.median))
            << "\" x2=\"" << svg_number(bx + kBoxW) << "\" y2=\"" << svg_number(y_of(r.median))
            << "\" stroke=\"" << colors[e] << "\" stroke-width=\"2\"/>\n";
      }
    }
    svg << "<text x=\"" << svg_number(x0 + panel_w / 2.0 - 20.0) << "\" y=\""
        << svg_number(kTop + kPlotH + 30.0) << "\">epsilon</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace detail

/// Flat key=value experiment configuration ('#' starts a comment). Lists are
/// comma separated; a single `levels` value broadcasts to all features.
inline ExperimentConfig parse_experiment_config_text(const std::string& text) {
  ExperimentConfig cfg;
  bool levels_given = false;
  std::istringstream in(text);
  std::string line;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  auto split_list = [&trim](const std::string& s) {
    std::vector<std::string> parts;
    std::istringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) parts.push_back(trim(part));
    return parts;
  };
  auto parse_bool = [](const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw std::invalid_argument("config: bad boolean '" + s + "'");
  };

  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "classes") cfg.classes = std::stoi(value);
    else if (key == "features") cfg.features = std::stoi(value);
    else if (key == "levels") {
      cfg.levels.clear();
      for (const auto& p : split_list(value)) cfg.levels.push_back(std::stoi(p));
      levels_given = true;
    } else if (key == "n_grid") {
      cfg.n_grid.clear();
      for (const auto& p : split_list(value)) cfg.n_grid.push_back(std::stoll(p));
    } else if (key == "epsilon_grid") {
      cfg.epsilon_grid.clear();
      for (const auto& p : split_list(value)) cfg.epsilon_grid.push_back(std::stod(p));
    } else if (key == "outer_reps") cfg.outer_reps = std::stoi(value);
    else if (key == "inner_reps") cfg.inner_reps = std::stoi(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "gen_alpha") cfg.gen_alpha = std::stod(value);
    else if (key == "fit_alpha") cfg.fit_alpha = std::stod(value);
    else if (key == "tol") cfg.fit.tol = std::stod(value);
    else if (key == "max_iter") cfg.fit.max_iter = std::stoi(value);
    else if (key == "solver_tol") cfg.fit.solver_tol = std::stod(value);
    else if (key == "solver_max_iter") cfg.fit.solver_max_iter = std::stoi(value);
    else if (key == "ls_sigma") cfg.fit.line_search.sigma = std::stod(value);
    else if (key == "ls_nu") cfg.fit.line_search.nu = std::stod(value);
    else if (key == "ls_max_backtracks") cfg.fit.line_search.max_backtracks = std::stoi(value);
    else if (key == "ls_boundary_fraction") cfg.fit.line_search.boundary_fraction = std::stod(value);
    else if (key == "init") {
      if (value == "naive") cfg.fit.init = InitMode::kFromNaive;
      else if (value == "uniform") cfg.fit.init = InitMode::kUniform;
      else throw std::invalid_argument("config: init must be 'naive' or 'uniform'");
    } else if (key == "resample_params") cfg.resample_params = parse_bool(value);
    else if (key == "jobs") cfg.jobs = std::stoi(value);
    else if (key == "out_csv") cfg.out_csv = value;
    else if (key == "out_summary") cfg.out_summary = value;
    else if (key == "out_plot") cfg.out_plot = value;
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }

  if (!levels_given || cfg.levels.size() == 1) {
    const int level = cfg.levels.empty() ? 2 : cfg.levels.front();
    cfg.levels.assign(cfg.features, level);
  }
  return cfg;
}

inline ExperimentConfig parse_experiment_config(const std::string& path) {
  return parse_experiment_config_text(detail::read_text_file(path));
}

}  // namespace dpvb
