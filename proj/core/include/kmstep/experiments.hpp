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

#ifndef KMSTEP_EXPERIMENTS_HPP_
#define KMSTEP_EXPERIMENTS_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kmstep/kmeans.hpp"
#include "kmstep/quantum_emulator.hpp"
#include "kmstep/rng.hpp"
#include "kmstep/samplers.hpp"
#include "kmstep/types.hpp"

namespace kmstep {

enum class Algorithm { uniform, dlt_row_norm_squared, dlt_row_norm };

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);  // accepts '-' or '_'
std::vector<Algorithm> all_algorithms();

// Runs body(i) for i in [0, count) on up to `threads` workers (0 = all cores).
// Exceptions from workers are rethrown on the caller's thread.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

// One approximate step of the given algorithm. dlt variants use a = b.
StepResult run_algorithm(Algorithm algorithm, const DataSet& data, const Centers& centers0, std::size_t b,
                         Seed seed, const IndexSampler* weighted_sampler = nullptr);

// Samples drawn per step: b for uniform, 2b for the two-batch variants.
std::size_t samples_per_step(Algorithm algorithm, std::size_t b);

// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> values, double q);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct SweepRow {
  std::size_t b = 0;
  Algorithm algorithm = Algorithm::uniform;
  std::size_t trial = 0;
  double max_err = 0.0;
  double weighted_err = 0.0;
  double cost = 0.0;
  std::size_t samples = 0;
};

struct SweepSummary {
  std::size_t b = 0;
  Algorithm algorithm = Algorithm::uniform;
  std::size_t trials = 0;
  double median_max_err = 0.0;
  double q05_max_err = 0.0;
  double q95_max_err = 0.0;
  double median_weighted_err = 0.0;
  double median_cost = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ordered by (b, algorithm, trial)

  std::vector<SweepSummary> summaries() const;
  // Slope of the median max_err against b for one algorithm.
  double median_slope(Algorithm algorithm) const;
};

// Errors are measured against the exact step from centers0.
SweepResult batch_sweep(const DataSet& data, const Centers& centers0, const std::vector<std::size_t>& b_grid,
                        const std::vector<Algorithm>& algorithms, std::size_t trials, Seed seed,
                        std::size_t threads = 0);

struct MultiStepRow {
  std::size_t t = 0;  // 1-based iteration
  Algorithm algorithm = Algorithm::uniform;
  std::size_t trial = 0;
  double max_err = 0.0;  // against the exact track at iteration t
};

struct MultiStepSummary {
  std::size_t t = 0;
  Algorithm algorithm = Algorithm::uniform;
  double median_max_err = 0.0;
  double q05_max_err = 0.0;
  double q95_max_err = 0.0;
};

struct MultiStepResult {
  std::vector<MultiStepRow> rows;  // ordered by (algorithm, trial, t)
  std::vector<Centers> exact_track;

  std::vector<MultiStepSummary> summaries() const;
};

struct MultiStepOptions {
  // Uniform steps use every index once instead of a sampled batch.
  bool force_full_batch = false;
  std::size_t threads = 0;
};

MultiStepResult multistep_run(const DataSet& data, const Centers& centers_init, std::size_t steps,
                              std::size_t b, const std::vector<Algorithm>& algorithms, std::size_t trials,
                              Seed seed, const MultiStepOptions& options = {});

struct InvarianceRow {
  std::size_t b = 0;
  std::string instance;  // "original" or "shifted"
  Algorithm algorithm = Algorithm::uniform;
  std::size_t trials = 0;
  double recovery_rate = 0.0;  // max center error <= recovery threshold
  // uniform: the batch meets both clusters. dlt: the weighted batch meets
  // the cluster at -1 (before shifting).
  double hit_rate = 0.0;
  double closed_form_hit = 0.0;
};

struct InvarianceReport {
  double alpha = 0.0;
  std::size_t n = 0;
  double shift = 0.0;
  double threshold = 0.01;
  std::vector<InvarianceRow> rows;  // ordered by (b, instance, algorithm)
};

// Runs every algorithm on hard_instance(n, alpha) and on its copy shifted by
// `shift`. Trials share seeds across instances.
InvarianceReport invariance_demo(double alpha, std::size_t n, double shift, const std::vector<std::size_t>& b_grid,
                                 std::size_t trials, Seed seed, std::size_t threads = 0);

enum class BoundKind { thm_main, cor_monotone, cor_damped, quantum_main };

std::string_view to_string(BoundKind kind);
BoundKind parse_bound_kind(std::string_view name);

struct BoundCheckOptions {
  std::optional<DampedSpec> damping;  // cor_damped; defaults to alpha = 0.5 everywhere
  EmulationConfig quantum;            // quantum_main
  std::size_t threads = 0;
};

struct BoundCheckReport {
  BoundKind which = BoundKind::thm_main;
  double eps = 0.0;
  double delta = 0.0;
  std::size_t trials = 0;
  std::size_t b = 0;  // prescribed batch size (0 for quantum_main)
  double phi = 0.0;
  double k_C = 0.0;
  double initial_cost = 0.0;
  double bound = 0.0;  // threshold applied to the per-trial statistic
  std::string statistic;
  std::vector<double> values;  // per-trial statistic
  std::size_t failures = 0;
  double failure_rate = 0.0;
  double allowed_rate = 0.0;
  double sigma = 0.0;
  double threshold = 0.0;  // allowed_rate + 3 sigma
  bool pass = false;
  // cor_damped: ((1 - a_min) sqrt(L(c^0)) + a_max sqrt((1 + eps) phi))^2 and its failures.
  std::optional<double> corrected_bound;
  std::optional<std::size_t> corrected_failures;
  // quantum_main: mean ledger total and its ratio to the unit-constant bound.
  std::optional<double> mean_ledger_total;
  std::optional<double> predicted_queries;
  std::optional<QueryLedger> first_ledger;
};

// Prescribed b for the mini-batch bounds.
std::size_t prescribed_batch_size(BoundKind kind, const Diagnostics& diag, double eps, double delta);

BoundCheckReport bound_check(const DataSet& data, const Centers& centers0, double eps, double delta,
                             std::size_t trials, Seed seed, BoundKind which,
                             const BoundCheckOptions& options = {});

}  // namespace kmstep

#endif  // KMSTEP_EXPERIMENTS_HPP_
