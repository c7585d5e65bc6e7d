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

#include "kmstep/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>
#include <utility>

#include "kmstep/dataset.hpp"
#include "kmstep/errors.hpp"

namespace kmstep {
namespace {

Seed step_seed(Seed seed, std::size_t b, std::size_t trial, std::size_t t) {
  return derive_seed(derive_seed(seed, b, trial), t);
}

double max_center_error(const Centers& exact, const Centers& approx) {
  return center_error(exact, approx, std::vector<std::size_t>(exact.k(), 1), exact.k()).max_err;
}

void require_positive(std::size_t value, const char* what) {
  if (value == 0) throw ParameterError(std::string(what) + " must be >= 1");
}

std::size_t algorithm_index(Algorithm a) { return static_cast<std::size_t>(a); }

// One sampler per dlt scheme, built only when requested.
struct SamplerCache {
  std::optional<IndexSampler> squared;
  std::optional<IndexSampler> plain;

  SamplerCache(const DataSet& data, const std::vector<Algorithm>& algorithms) {
    for (const auto a : algorithms) {
      if (a == Algorithm::dlt_row_norm_squared && !squared) squared.emplace(data, SamplingScheme::row_norm_squared);
      if (a == Algorithm::dlt_row_norm && !plain) plain.emplace(data, SamplingScheme::row_norm);
    }
  }

  const IndexSampler* get(Algorithm a) const {
    if (a == Algorithm::dlt_row_norm_squared) return &*squared;
    if (a == Algorithm::dlt_row_norm) return &*plain;
    return nullptr;
  }
};

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::uniform: return "uniform";
    case Algorithm::dlt_row_norm_squared: return "dlt_row_norm_squared";
    case Algorithm::dlt_row_norm: return "dlt_row_norm";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string norm(name);
  std::replace(norm.begin(), norm.end(), '-', '_');
  for (const auto a : all_algorithms()) {
    if (norm == to_string(a)) return a;
  }
  throw ParameterError("unknown algorithm tag '" + std::string(name) + "'");
}

std::vector<Algorithm> all_algorithms() {
  return {Algorithm::uniform, Algorithm::dlt_row_norm_squared, Algorithm::dlt_row_norm};
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

StepResult run_algorithm(Algorithm algorithm, const DataSet& data, const Centers& centers0, std::size_t b,
                         Seed seed, const IndexSampler* weighted_sampler) {
  switch (algorithm) {
    case Algorithm::uniform:
      return minibatch_step(data, centers0, b, seed);
    case Algorithm::dlt_row_norm_squared:
    case Algorithm::dlt_row_norm: {
      const auto scheme = algorithm == Algorithm::dlt_row_norm ? SamplingScheme::row_norm
                                                                : SamplingScheme::row_norm_squared;
      if (weighted_sampler != nullptr) {
        if (weighted_sampler->scheme() != scheme) throw ParameterError("run_algorithm: sampler scheme mismatch");
        return dlt_step(data, centers0, b, b, *weighted_sampler, seed);
      }
      return dlt_step(data, centers0, b, b, scheme, seed);
    }
  }
  throw ParameterError("run_algorithm: unknown algorithm");
}

std::size_t samples_per_step(Algorithm algorithm, std::size_t b) {
  return algorithm == Algorithm::uniform ? b : 2 * b;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ParameterError("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("quantile: q must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("loglog_slope: need >= 2 paired points");
  const auto m = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ParameterError("loglog_slope: values must be > 0");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw ParameterError("loglog_slope: x values must not all be equal");
  return (m * sxy - sx * sy) / denom;
}

std::vector<SweepSummary> SweepResult::summaries() const {
  std::vector<SweepSummary> out;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> slot;
  std::vector<std::vector<const SweepRow*>> groups;
  for (const auto& row : rows) {
    const auto key = std::make_pair(row.b, algorithm_index(row.algorithm));
    auto [it, inserted] = slot.emplace(key, groups.size());
    if (inserted) {
      groups.emplace_back();
      out.push_back({row.b, row.algorithm, 0, 0, 0, 0, 0, 0});
    }
    groups[it->second].push_back(&row);
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<double> max_err, weighted, costs;
    for (const auto* row : groups[g]) {
      max_err.push_back(row->max_err);
      weighted.push_back(row->weighted_err);
      costs.push_back(row->cost);
    }
    auto& s = out[g];
    s.trials = groups[g].size();
    s.median_max_err = quantile(max_err, 0.5);
    s.q05_max_err = quantile(max_err, 0.05);
    s.q95_max_err = quantile(max_err, 0.95);
    s.median_weighted_err = quantile(weighted, 0.5);
    s.median_cost = quantile(costs, 0.5);
  }
  return out;
}

double SweepResult::median_slope(Algorithm algorithm) const {
  std::vector<double> bs, med;
  for (const auto& s : summaries()) {
    if (s.algorithm != algorithm) continue;
    bs.push_back(static_cast<double>(s.b));
    med.push_back(s.median_max_err);
  }
  return loglog_slope(bs, med);
}

SweepResult batch_sweep(const DataSet& data, const Centers& centers0, const std::vector<std::size_t>& b_grid,
                        const std::vector<Algorithm>& algorithms, std::size_t trials, Seed seed,
                        std::size_t threads) {
  require_same_dim(data, centers0, "batch_sweep");
  require_positive(trials, "trials");
  if (b_grid.empty() || algorithms.empty()) throw ParameterError("batch_sweep: empty b grid or algorithm list");
  for (const auto b : b_grid) require_positive(b, "b");
  const auto exact = lloyd_step(data, centers0);
  const SamplerCache samplers(data, algorithms);

  const auto per_b = algorithms.size() * trials;
  SweepResult result;
  result.rows.resize(b_grid.size() * per_b);
  parallel_for(result.rows.size(), threads, [&](std::size_t idx) {
    const auto b = b_grid[idx / per_b];
    const auto alg = algorithms[(idx % per_b) / trials];
    const auto trial = idx % trials;
    const auto step = run_algorithm(alg, data, centers0, b, step_seed(seed, b, trial, 1), samplers.get(alg));
    const auto err = center_error(exact.centers, step.centers, exact.assignment.sizes, data.n());
    result.rows[idx] = {b, alg, trial, err.max_err, err.weighted_err, cost(data, step.centers),
                        samples_per_step(alg, b)};
  });
  return result;
}

std::vector<MultiStepSummary> MultiStepResult::summaries() const {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> groups;
  for (const auto& row : rows) groups[{algorithm_index(row.algorithm), row.t}].push_back(row.max_err);
  std::vector<MultiStepSummary> out;
  for (const auto& [key, errs] : groups) {
    out.push_back({key.second, static_cast<Algorithm>(key.first), quantile(errs, 0.5), quantile(errs, 0.05),
                   quantile(errs, 0.95)});
  }
  return out;
}

MultiStepResult multistep_run(const DataSet& data, const Centers& centers_init, std::size_t steps,
                              std::size_t b, const std::vector<Algorithm>& algorithms, std::size_t trials,
                              Seed seed, const MultiStepOptions& options) {
  require_same_dim(data, centers_init, "multistep_run");
  require_positive(steps, "steps");
  require_positive(b, "b");
  require_positive(trials, "trials");
  if (algorithms.empty()) throw ParameterError("multistep_run: empty algorithm list");
  if (options.force_full_batch) {
    for (const auto a : algorithms) {
      if (a != Algorithm::uniform) throw ParameterError("multistep_run: force_full_batch applies to uniform only");
    }
  }
  MultiStepResult result;
  Centers current = centers_init;
  for (std::size_t t = 0; t < steps; ++t) {
    current = lloyd_step(data, current).centers;
    result.exact_track.push_back(current);
  }
  Batch full;
  if (options.force_full_batch) {
    full.indices.resize(data.n());
    std::iota(full.indices.begin(), full.indices.end(), std::size_t{0});
  }
  const SamplerCache samplers(data, algorithms);

  result.rows.resize(algorithms.size() * trials * steps);
  parallel_for(algorithms.size() * trials, options.threads, [&](std::size_t unit) {
    const auto alg = algorithms[unit / trials];
    const auto trial = unit % trials;
    Centers approx = centers_init;
    for (std::size_t t = 1; t <= steps; ++t) {
      approx = options.force_full_batch
                   ? minibatch_step(data, approx, full).centers
                   : run_algorithm(alg, data, approx, b, step_seed(seed, b, trial, t), samplers.get(alg)).centers;
      result.rows[unit * steps + (t - 1)] = {t, alg, trial, max_center_error(result.exact_track[t - 1], approx)};
    }
  });
  return result;
}

InvarianceReport invariance_demo(double alpha, std::size_t n, double shift, const std::vector<std::size_t>& b_grid,
                                 std::size_t trials, Seed seed, std::size_t threads) {
  require_positive(trials, "trials");
  if (b_grid.empty()) throw ParameterError("invariance_demo: empty b grid");
  for (const auto b : b_grid) require_positive(b, "b");
  if (!std::isfinite(shift)) throw ParameterError("invariance_demo: shift must be finite");

  struct Instance {
    std::string name;
    DataSet data;
    Centers centers0;
    LloydResult exact;
    SamplerCache samplers;
  };
  auto [base_data, base_centers] = hard_instance(n, alpha);
  const auto shifted = RigidTransform::translation(Vector::Constant(1, shift));
  std::vector<Instance> instances;
  const auto algorithms = all_algorithms();
  for (int s = 0; s < 2; ++s) {
    auto data = s == 0 ? base_data : apply_rigid_transform(base_data, shifted);
    auto centers = s == 0 ? base_centers : apply_rigid_transform(base_centers, shifted);
    auto exact = lloyd_step(data, centers);
    SamplerCache cache(data, algorithms);
    instances.push_back({s == 0 ? "original" : "shifted", std::move(data), std::move(centers), std::move(exact),
                         std::move(cache)});
  }

  InvarianceReport report;
  report.alpha = alpha;
  report.n = n;
  report.shift = shift;
  const auto combos = instances.size() * algorithms.size();
  report.rows.resize(b_grid.size() * combos);
  parallel_for(report.rows.size(), threads, [&](std::size_t idx) {
    const auto bi = idx / combos;
    const auto& inst = instances[(idx % combos) / algorithms.size()];
    const auto alg = algorithms[idx % algorithms.size()];
    const auto b = b_grid[bi];
    const auto& labels = inst.exact.assignment.labels;
    std::size_t recovered = 0, hits = 0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
      const auto step = run_algorithm(alg, inst.data, inst.centers0, b, step_seed(seed, b, trial, 1),
                                      inst.samplers.get(alg));
      if (max_center_error(inst.exact.centers, step.centers) <= report.threshold) ++recovered;
      std::vector<bool> seen(2, false);
      for (const auto s : step.report.batch.indices) seen[labels[s]] = true;
      const bool hit = alg == Algorithm::uniform ? (seen[0] && seen[1]) : seen[0];
      if (hit) ++hits;
    }
    double closed = 0.0;
    const double bd = static_cast<double>(b);
    if (alg == Algorithm::uniform) {
      double mass0 = static_cast<double>(inst.exact.assignment.sizes[0]) / static_cast<double>(n);
      closed = 1.0 - std::pow(1.0 - mass0, bd) - std::pow(mass0, bd);
    } else {
      const auto* sampler = inst.samplers.get(alg);
      double q0 = 0.0;
      for (const auto i : inst.exact.assignment.members[0]) q0 += sampler->probability(i);
      closed = 1.0 - std::pow(1.0 - q0, bd);
    }
    const double tr = static_cast<double>(trials);
    report.rows[idx] = {b, inst.name, alg, trials, static_cast<double>(recovered) / tr,
                        static_cast<double>(hits) / tr, closed};
  });
  return report;
}

std::string_view to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::thm_main: return "thm_main";
    case BoundKind::cor_monotone: return "cor_monotone";
    case BoundKind::cor_damped: return "cor_damped";
    case BoundKind::quantum_main: return "quantum_main";
  }
  return "unknown";
}

BoundKind parse_bound_kind(std::string_view name) {
  std::string norm(name);
  std::replace(norm.begin(), norm.end(), '-', '_');
  for (const auto k : {BoundKind::thm_main, BoundKind::cor_monotone, BoundKind::cor_damped, BoundKind::quantum_main}) {
    if (norm == to_string(k)) return k;
  }
  throw ParameterError("unknown bound '" + std::string(name) + "'");
}

std::size_t prescribed_batch_size(BoundKind kind, const Diagnostics& diag, double eps, double delta) {
  if (!(eps > 0.0)) throw ParameterError("eps must be > 0");
  const double k = static_cast<double>(diag.k());
  double inner = 0.0;
  switch (kind) {
    case BoundKind::thm_main:
      if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
      inner = std::max(4.0 * diag.phi / (eps * eps * delta), 8.0 * std::log(k / delta));
      break;
    case BoundKind::cor_monotone:
      if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
      inner = std::max(4.0 / (eps * delta), 8.0 * std::log(k / delta));
      break;
    case BoundKind::cor_damped:
      inner = std::max(40.0 / eps, 8.0 * std::log(20.0 * k));
      break;
    case BoundKind::quantum_main:
      return 0;
  }
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(diag.k_C * inner)));
}

BoundCheckReport bound_check(const DataSet& data, const Centers& centers0, double eps, double delta,
                             std::size_t trials, Seed seed, BoundKind which, const BoundCheckOptions& options) {
  require_positive(trials, "trials");
  if (!(eps > 0.0)) throw ParameterError("bound_check: eps must be > 0");
  if (which != BoundKind::cor_damped && !(delta > 0.0 && delta < 1.0)) {
    throw ParameterError("bound_check: delta must lie in (0, 1)");
  }
  const auto diag = diagnostics(data, centers0);
  const auto exact = lloyd_step(data, centers0);

  BoundCheckReport rep;
  rep.which = which;
  rep.eps = eps;
  rep.delta = which == BoundKind::cor_damped ? 0.1 : delta;
  rep.trials = trials;
  rep.phi = diag.phi;
  rep.k_C = diag.k_C;
  rep.initial_cost = diag.cost;
  rep.allowed_rate = rep.delta;
  rep.b = prescribed_batch_size(which, diag, eps, delta);
  rep.values.resize(trials);

  DampedSpec damping = options.damping.value_or(DampedSpec::constant(centers0.k(), 0.5));
  std::vector<std::uint64_t> ledger_totals(trials, 0);
  std::optional<QueryLedger> first_ledger;

  switch (which) {
    case BoundKind::thm_main:
      rep.statistic = "weighted_err";
      rep.bound = eps * eps;
      break;
    case BoundKind::cor_monotone:
      rep.statistic = "cost";
      rep.bound = (1.0 + eps) * diag.phi;
      break;
    case BoundKind::cor_damped: {
      damping.validate(centers0.k());
      rep.statistic = "cost";
      const double a_min = damping.min(), a_max = damping.max();
      rep.bound = std::pow((1.0 - a_min) + a_max * std::sqrt(1.0 + eps), 2) * diag.phi;
      rep.corrected_bound =
          std::pow((1.0 - a_min) * std::sqrt(diag.cost) + a_max * std::sqrt((1.0 + eps) * diag.phi), 2);
      break;
    }
    case BoundKind::quantum_main:
      options.quantum.validate();
      rep.statistic = "max_err";
      rep.bound = eps;
      break;
  }

  parallel_for(trials, options.threads, [&](std::size_t trial) {
    const Seed s = derive_seed(seed, trial);
    switch (which) {
      case BoundKind::thm_main: {
        const auto step = minibatch_step(data, centers0, rep.b, s);
        rep.values[trial] = center_error(exact.centers, step.centers, exact.assignment.sizes, data.n()).weighted_err;
        break;
      }
      case BoundKind::cor_monotone:
        rep.values[trial] = cost(data, minibatch_step(data, centers0, rep.b, s).centers);
        break;
      case BoundKind::cor_damped:
        rep.values[trial] = cost(data, damped_minibatch_step(data, centers0, rep.b, damping, s).centers);
        break;
      case BoundKind::quantum_main: {
        const auto step = quantum_kmeans_step(data, centers0, eps, delta, options.quantum, s);
        rep.values[trial] = max_center_error(exact.centers, step.centers);
        ledger_totals[trial] = step.ledger.total();
        if (trial == 0) first_ledger = step.ledger;
        break;
      }
    }
  });

  for (const auto v : rep.values) rep.failures += v > rep.bound ? 1 : 0;
  if (rep.corrected_bound) {
    std::size_t f = 0;
    for (const auto v : rep.values) f += v > *rep.corrected_bound ? 1 : 0;
    rep.corrected_failures = f;
  }
  if (which == BoundKind::quantum_main) {
    long double sum = 0.0L;
    for (const auto t : ledger_totals) sum += static_cast<long double>(t);
    rep.mean_ledger_total = static_cast<double>(sum / static_cast<long double>(trials));
    rep.predicted_queries = predicted_query_bound(diag, eps, data.d(), centers0.k());
    rep.first_ledger = first_ledger;
  }
  const double tr = static_cast<double>(trials);
  rep.failure_rate = static_cast<double>(rep.failures) / tr;
  rep.sigma = std::sqrt(rep.allowed_rate * (1.0 - rep.allowed_rate) / tr);
  rep.threshold = rep.allowed_rate + 3.0 * rep.sigma;
  rep.pass = rep.failure_rate <= rep.threshold;
  return rep;
}

}  // namespace kmstep
