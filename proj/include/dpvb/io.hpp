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
// File formats: JSON documents for datasets, noisy releases, and posterior
// fits; CSV for experiment records and summaries; a flat key=value file for
// experiment configuration. All numeric output goes through std::to_chars,
// so files are byte-reproducible and locale-independent.

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpvb/estimators.hpp"
#include "dpvb/model.hpp"
#include "dpvb/privacy.hpp"
#include "dpvb/table.hpp"
#include "dpvb/vb.hpp"

namespace dpvb {

/// I/O failures carry their own type so the CLI can map them to exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal rendering of a double ('.' separator, no locale).
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (!in.good() && !in.eof()) throw IoError("read failure: " + path);
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
  if (!out.good()) throw IoError("write failure: " + path);
}

inline nlohmann::json parse_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed JSON in " + path + ": " + e.what());
  }
}

inline nlohmann::json shape_to_json(const ModelShape& shape) {
  return {{"classes", shape.num_classes},
          {"features", shape.num_features},
          {"levels", shape.levels},
          {"n_total", shape.n_total}};
}

inline ModelShape shape_from_json(const nlohmann::json& j) {
  ModelShape shape;
  shape.num_classes = j.at("classes").get<int>();
  shape.num_features = j.at("features").get<int>();
  shape.levels = j.at("levels").get<std::vector<int>>();
  shape.n_total = j.at("n_total").get<std::int64_t>();
  shape.validate();
  return shape;
}

template <typename T>
nlohmann::json tables_to_json(const std::vector<Table<T>>& tables) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : tables) out.push_back(t.data());  // row-major
  return out;
}

template <typename T>
std::vector<Table<T>> tables_from_json(const nlohmann::json& j, const ModelShape& shape) {
  if (!j.is_array() || static_cast<int>(j.size()) != shape.num_features)
    throw IoError("table array has wrong length");
  std::vector<Table<T>> tables;
  tables.reserve(j.size());
  for (int k = 0; k < shape.num_features; ++k) {
    const auto flat = j[k].get<std::vector<T>>();
    if (static_cast<int>(flat.size()) != shape.num_classes * shape.levels[k])
      throw IoError("table " + std::to_string(k) + " has wrong cell count");
    Table<T> table(shape.num_classes, shape.levels[k]);
    table.data() = flat;
    tables.push_back(std::move(table));
  }
  return tables;
}

inline nlohmann::json params_to_json(const ModelParams& params) {
  return {{"class_probs", params.class_probs}, {"cond_probs", tables_to_json(params.cond_probs)}};
}

inline ModelParams params_from_json(const nlohmann::json& j, const ModelShape& shape) {
  ModelParams params;
  params.class_probs = j.at("class_probs").get<std::vector<double>>();
  params.cond_probs = tables_from_json<double>(j.at("cond_probs"), shape);
  params.validate(shape);
  return params;
}

}  // namespace detail

struct Dataset {
  TrueMarginals marginals;
  std::optional<ModelParams> params;  // ground truth when simulated
};

inline void write_dataset(const std::string& path, const TrueMarginals& marginals,
                          const ModelParams* params = nullptr) {
  nlohmann::json j{{"shape", detail::shape_to_json(marginals.shape)},
                   {"class_counts", marginals.class_counts},
                   {"counts", detail::tables_to_json(marginals.counts)}};
  if (params != nullptr) j["params"] = detail::params_to_json(*params);
  detail::write_text_file(path, j.dump(2) + "\n");
}

inline Dataset read_dataset(const std::string& path) {
  const nlohmann::json j = detail::parse_json_file(path);
  try {
    Dataset ds;
    ds.marginals.shape = detail::shape_from_json(j.at("shape"));
    ds.marginals.class_counts = j.at("class_counts").get<std::vector<std::int64_t>>();
    ds.marginals.counts = detail::tables_from_json<std::int64_t>(j.at("counts"), ds.marginals.shape);
    if (j.contains("params")) ds.params = detail::params_from_json(j["params"], ds.marginals.shape);
    if (!check_consistency(ds.marginals)) throw IoError("dataset is inconsistent: " + path);
    return ds;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad dataset file " + path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError("bad dataset file " + path + ": " + e.what());
  } catch (const std::domain_error& e) {
    throw IoError("bad dataset file " + path + ": " + e.what());
  }
}

inline void write_noisy(const std::string& path, const NoisyMarginals& noisy) {
  noisy.validate();
  const nlohmann::json j{{"shape", detail::shape_to_json(noisy.shape)},
                         {"epsilon_per_query", noisy.spec.epsilon_per_query},
                         {"sensitivity", noisy.spec.sensitivity},
                         {"scale", noisy.spec.scale},
                         {"total_epsilon", noisy.total_epsilon},
                         {"counts", detail::tables_to_json(noisy.values)}};
  detail::write_text_file(path, j.dump(2) + "\n");
}

inline NoisyMarginals read_noisy(const std::string& path) {
  const nlohmann::json j = detail::parse_json_file(path);
  try {
    NoisyMarginals noisy;
    noisy.shape = detail::shape_from_json(j.at("shape"));
    noisy.spec.epsilon_per_query = j.at("epsilon_per_query").get<double>();
    noisy.spec.sensitivity = j.at("sensitivity").get<double>();
    noisy.spec.scale = j.at("scale").get<double>();
    noisy.total_epsilon = j.at("total_epsilon").get<double>();
    noisy.values = detail::tables_from_json<double>(j.at("counts"), noisy.shape);
    noisy.validate();
    return noisy;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad noisy-release file " + path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError("bad noisy-release file " + path + ": " + e.what());
  } catch (const std::domain_error& e) {
    throw IoError("bad noisy-release file " + path + ": " + e.what());
  }
}

/// Posterior output: Dirichlet parameters where the method has them, the
/// point estimate, and for vb the variational theta vectors, bound trace,
/// and the fit configuration echoed back. `sq_error` is present when the
/// caller had ground truth to score against.
inline void write_posterior(const std::string& path, const PosteriorEstimate& est,
                            const ModelShape& shape, const FitResult* fit_details,
                            const FitConfig* cfg, std::optional<double> sq_error) {
  nlohmann::json j{{"method", estimator_name(est.method)},
                   {"shape", detail::shape_to_json(shape)},
                   {"point", detail::params_to_json(est.point)},
                   {"iterations", est.iterations},
                   {"converged", est.converged}};
  if (est.class_posterior) j["class_posterior"] = est.class_posterior->alpha;
  if (!est.cond_posterior.empty()) {
    nlohmann::json cond = nlohmann::json::array();
    for (const auto& per_feature : est.cond_posterior) {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& block : per_feature) rows.push_back(block.alpha);
      cond.push_back(rows);
    }
    j["cond_posterior"] = cond;
  }
  if (fit_details != nullptr) {
    j["bound_trace"] = fit_details->trace;
    j["theta_class"] = fit_details->state.theta_class;
    j["theta_cond"] = detail::tables_to_json(fit_details->state.theta_cond);
  }
  if (cfg != nullptr) {
    j["config"] = {{"tol", cfg->tol},
                   {"max_iter", cfg->max_iter},
                   {"init", cfg->init == InitMode::kFromNaive ? "naive" : "uniform"},
                   {"solver_tol", cfg->solver_tol},
                   {"solver_max_iter", cfg->solver_max_iter}};
  }
  if (sq_error) j["squared_error"] = *sq_error;
  detail::write_text_file(path, j.dump(2) + "\n");
}

}  // namespace dpvb
