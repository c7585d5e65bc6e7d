// Copyright 2026 The kmstep Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kmstep/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "kmstep/csv.hpp"
#include "kmstep/errors.hpp"

namespace kmstep {
namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json numbers(const std::vector<double>& values) {
  Json arr = Json::array();
  for (const auto v : values) arr.push_back(number_or_null(v));
  return arr;
}

Json batch_json(const Batch& batch) {
  Json j{{"scheme", std::string(to_string(batch.scheme))}, {"size", batch.size()}};
  if (batch.size() <= kMaxSerializedBatch) {
    j["indices"] = batch.indices;
  } else {
    j["indices"] = nullptr;
    j["elided"] = true;
  }
  return j;
}

}  // namespace

Json to_json(const Diagnostics& diag) {
  return Json{{"phi", diag.phi},         {"phi_j", diag.phi_j}, {"k_C", diag.k_C},   {"eta", diag.eta},
              {"eta_bar", diag.eta_bar}, {"eta_hat", diag.eta_hat}, {"cost", diag.cost},
              {"per_cluster_cost", diag.per_cluster_cost}};
}

Json to_json(const StepReport& report) {
  Json j{{"empty_clusters", report.empty_clusters},
         {"lambda_hats", numbers(report.lambda_hats)},
         {"batch", batch_json(report.batch)}};
  if (report.size_batch) j["size_batch"] = batch_json(*report.size_batch);
  return j;
}

Json to_json(const QueryLedger& ledger) {
  return Json{{"cluster_assignment_queries", ledger.cluster_assignment_queries},
              {"boosting_queries", ledger.boosting_queries},
              {"rv_access_queries", ledger.rv_access_queries},
              {"mean_estimation_oracle_calls", ledger.mean_estimation_oracle_calls},
              {"total", ledger.total()}};
}

Json to_json(const EmulationConfig& config) {
  return Json{{"delta_prime_policy", std::string(to_string(config.delta_prime_policy))},
              {"garbage_policy", std::string(to_string(config.garbage_policy))},
              {"failure_blowup", config.failure_blowup},
              {"constants", {{"mean_est", config.constants.mean_est}, {"boost", config.constants.boost}}},
              {"noise_scale", config.noise_scale},
              {"delta_override", config.delta_override ? Json(*config.delta_override) : Json(nullptr)},
              {"delta_floor", config.delta_floor}};
}

Json to_json(const QuantumStepResult& result) {
  Json degenerate = Json::array();
  Json failed = Json::array();
  for (std::size_t j = 0; j < result.degenerate.size(); ++j) {
    degenerate.push_back(static_cast<bool>(result.degenerate[j]));
    failed.push_back(static_cast<bool>(result.failed[j]));
  }
  return Json{{"ledger", to_json(result.ledger)}, {"degenerate", degenerate}, {"failed", failed},
              {"eps_j", result.eps_j},          {"delta_j", result.delta_j},   {"delta", result.delta}};
}

Json to_json(const SweepResult& result) {
  Json summaries = Json::array();
  std::vector<Algorithm> seen;
  for (const auto& s : result.summaries()) {
    summaries.push_back({{"b", s.b},
                         {"algorithm", std::string(to_string(s.algorithm))},
                         {"trials", s.trials},
                         {"median_max_err", s.median_max_err},
                         {"q05_max_err", s.q05_max_err},
                         {"q95_max_err", s.q95_max_err},
                         {"median_weighted_err", s.median_weighted_err},
                         {"median_cost", s.median_cost}});
    if (std::find(seen.begin(), seen.end(), s.algorithm) == seen.end()) seen.push_back(s.algorithm);
  }
  Json slopes = Json::object();
  for (const auto a : seen) {
    try {
      slopes[std::string(to_string(a))] = number_or_null(result.median_slope(a));
    } catch (const ParameterError&) {
      slopes[std::string(to_string(a))] = nullptr;
    }
  }
  return Json{{"summaries", summaries}, {"loglog_slope_median_max_err", slopes}};
}

Json to_json(const MultiStepResult& result) {
  Json summaries = Json::array();
  for (const auto& s : result.summaries()) {
    summaries.push_back({{"t", s.t},
                         {"algorithm", std::string(to_string(s.algorithm))},
                         {"median_max_err", s.median_max_err},
                         {"q05_max_err", s.q05_max_err},
                         {"q95_max_err", s.q95_max_err}});
  }
  return Json{{"summaries", summaries}};
}

Json to_json(const InvarianceReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"b", r.b},
                    {"instance", r.instance},
                    {"algorithm", std::string(to_string(r.algorithm))},
                    {"trials", r.trials},
                    {"recovery_rate", r.recovery_rate},
                    {"hit_rate", r.hit_rate},
                    {"closed_form_hit", r.closed_form_hit}});
  }
  return Json{{"alpha", report.alpha}, {"n", report.n},       {"shift", report.shift},
              {"threshold", report.threshold}, {"rows", rows}};
}

Json to_json(const BoundCheckReport& report) {
  Json j{{"which", std::string(to_string(report.which))},
         {"eps", report.eps},
         {"delta", report.delta},
         {"trials", report.trials},
         {"b", report.b},
         {"phi", report.phi},
         {"k_C", report.k_C},
         {"initial_cost", report.initial_cost},
         {"statistic", report.statistic},
         {"bound", report.bound},
         {"failures", report.failures},
         {"failure_rate", report.failure_rate},
         {"allowed_rate", report.allowed_rate},
         {"sigma", report.sigma},
         {"threshold", report.threshold},
         {"pass", report.pass}};
  if (!report.values.empty()) {
    j["median_statistic"] = quantile(report.values, 0.5);
    j["q95_statistic"] = quantile(report.values, 0.95);
  }
  if (report.corrected_bound) {
    j["corrected_bound"] = *report.corrected_bound;
    j["corrected_failures"] = *report.corrected_failures;
  }
  if (report.mean_ledger_total) {
    j["mean_ledger_total"] = *report.mean_ledger_total;
    j["predicted_queries"] = *report.predicted_queries;
    j["ledger_to_bound_ratio"] = *report.mean_ledger_total / *report.predicted_queries;
    if (report.first_ledger) j["first_ledger"] = to_json(*report.first_ledger);
  }
  return j;
}

EmulationConfig emulation_config_from_json(const Json& j, EmulationConfig base) {
  if (!j.is_object()) throw ParameterError("emulator config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "delta_prime_policy") {
        base.delta_prime_policy = parse_delta_prime_policy(value.get<std::string>());
      } else if (key == "garbage_policy") {
        base.garbage_policy = parse_garbage_policy(value.get<std::string>());
      } else if (key == "failure_blowup") {
        base.failure_blowup = value.get<double>();
      } else if (key == "constants") {
        for (const auto& [ck, cv] : value.items()) {
          if (ck == "mean_est") {
            base.constants.mean_est = cv.get<double>();
          } else if (ck == "boost") {
            base.constants.boost = cv.get<double>();
          } else {
            throw ParameterError("unknown constants key '" + ck + "'");
          }
        }
      } else if (key == "noise_scale") {
        base.noise_scale = value.get<double>();
      } else if (key == "delta_override") {
        if (value.is_null()) {
          base.delta_override.reset();
        } else {
          base.delta_override = value.get<double>();
        }
      } else if (key == "delta_floor") {
        base.delta_floor = value.get<double>();
      } else {
        throw ParameterError("unknown emulator config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("bad emulator config: ") + e.what());
  }
  base.validate();
  return base;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "b,algorithm,trial,max_err,weighted_err,cost,samples\n";
  for (const auto& r : result.rows) {
    out << r.b << ',' << to_string(r.algorithm) << ',' << r.trial << ',' << format_double(r.max_err) << ','
        << format_double(r.weighted_err) << ',' << format_double(r.cost) << ',' << r.samples << '\n';
  }
}

void write_multistep_csv(std::ostream& out, const MultiStepResult& result) {
  out << "t,algorithm,trial,max_err\n";
  for (const auto& r : result.rows) {
    out << r.t << ',' << to_string(r.algorithm) << ',' << r.trial << ',' << format_double(r.max_err) << '\n';
  }
}

void write_invariance_csv(std::ostream& out, const InvarianceReport& report) {
  out << "b,instance,algorithm,trials,recovery_rate,hit_rate,closed_form_hit\n";
  for (const auto& r : report.rows) {
    out << r.b << ',' << r.instance << ',' << to_string(r.algorithm) << ',' << r.trials << ','
        << format_double(r.recovery_rate) << ',' << format_double(r.hit_rate) << ','
        << format_double(r.closed_form_hit) << '\n';
  }
}

void write_bound_check_csv(std::ostream& out, const BoundCheckReport& report) {
  out << "trial," << report.statistic << ",failed\n";
  for (std::size_t t = 0; t < report.values.size(); ++t) {
    out << t << ',' << format_double(report.values[t]) << ',' << (report.values[t] > report.bound ? 1 : 0) << '\n';
  }
}

}  // namespace kmstep
