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

#include "kmstep/quantum_emulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "kmstep/errors.hpp"

namespace kmstep {

std::string_view to_string(DeltaPrimePolicy policy) {
  return policy == DeltaPrimePolicy::worst_case ? "worst_case" : "uniform_random";
}

std::string_view to_string(GarbagePolicy policy) {
  return policy == GarbagePolicy::off_cluster_uniform ? "off_cluster_uniform" : "global_uniform";
}

DeltaPrimePolicy parse_delta_prime_policy(std::string_view name) {
  if (name == "worst_case" || name == "worst-case") return DeltaPrimePolicy::worst_case;
  if (name == "uniform_random" || name == "uniform-random") return DeltaPrimePolicy::uniform_random;
  throw ParameterError("unknown delta-prime policy '" + std::string(name) + "'");
}

GarbagePolicy parse_garbage_policy(std::string_view name) {
  if (name == "off_cluster_uniform" || name == "off-cluster-uniform") {
    return GarbagePolicy::off_cluster_uniform;
  }
  if (name == "global_uniform" || name == "global-uniform") return GarbagePolicy::global_uniform;
  throw ParameterError("unknown garbage policy '" + std::string(name) + "'");
}

void EmulationConfig::validate() const {
  if (!(failure_blowup >= 1.0)) throw ParameterError("failure_blowup must be >= 1");
  if (!(constants.mean_est > 0.0) || !(constants.boost > 0.0)) {
    throw ParameterError("query constants must be > 0");
  }
  if (!(noise_scale >= 0.0 && noise_scale <= 1.0)) throw ParameterError("noise_scale must lie in [0, 1]");
  if (delta_override && !(*delta_override >= 0.0 && *delta_override < 1.0)) {
    throw ParameterError("delta_override must lie in [0, 1)");
  }
  if (!(delta_floor > 0.0 && delta_floor < 1.0)) throw ParameterError("delta_floor must lie in (0, 1)");
}

EmulationConfig EmulationConfig::noiseless() {
  EmulationConfig config;
  config.failure_blowup = 1.0;
  config.noise_scale = 0.0;
  config.delta_override = 0.0;
  return config;
}

void QueryLedger::merge(const QueryLedger& other) noexcept {
  cluster_assignment_queries += other.cluster_assignment_queries;
  boosting_queries += other.boosting_queries;
  rv_access_queries += other.rv_access_queries;
  mean_estimation_oracle_calls += other.mean_estimation_oracle_calls;
}

ClusterDistribution cluster_distribution(const Assignment& assignment, std::size_t j) {
  if (j >= assignment.k()) throw ParameterError("cluster_distribution: cluster index out of range");
  const auto size = assignment.sizes[j];
  if (size == 0) throw DiagnosticError("cluster_distribution: cluster " + std::to_string(j) + " is empty", j);
  ClusterDistribution dist{std::vector<double>(assignment.n(), 0.0), j};
  const double mass = 1.0 / static_cast<double>(size);
  for (const auto i : assignment.members[j]) dist.probs[i] = mass;
  return dist;
}

ClusterDistribution perturbed_distribution(const ClusterDistribution& p, double delta,
                                           const EmulationConfig& config, Seed seed) {
  if (!(delta >= 0.0 && delta < 1.0)) throw ParameterError("perturbed_distribution: delta must lie in [0, 1)");
  const auto n = p.probs.size();
  if (n == 0) throw ParameterError("perturbed_distribution: empty distribution");
  Rng rng(seed);
  const double dp = config.delta_prime_policy == DeltaPrimePolicy::worst_case ? delta : delta * rng.uniform();

  std::size_t off = 0;
  for (const auto v : p.probs) off += v == 0.0 ? 1 : 0;
  const bool global = config.garbage_policy == GarbagePolicy::global_uniform || off == 0;
  const double g_mass = 1.0 / static_cast<double>(global ? n : off);

  ClusterDistribution out{std::vector<double>(n), p.cluster};
  double max_dev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = (global || p.probs[i] == 0.0) ? g_mass : 0.0;
    out.probs[i] = (1.0 - dp) * p.probs[i] + dp * g;
    max_dev = std::max(max_dev, std::abs(out.probs[i] - p.probs[i]));
  }
  if (max_dev > 4.0 * std::sqrt(delta) + 1e-15) {
    throw std::logic_error("perturbed_distribution: deviation exceeds 4 sqrt(delta)");
  }
  return out;
}

ClusterPrecision epsilon_j_delta(const Diagnostics& diag, std::size_t j, double eps, double delta_fail,
                                 std::size_t d, std::size_t k, double delta_floor) {
  if (!(eps > 0.0)) throw ParameterError("epsilon_j_delta: eps must be > 0");
  if (!(delta_fail > 0.0 && delta_fail < 1.0)) throw ParameterError("epsilon_j_delta: delta must lie in (0, 1)");
  if (d == 0 || k == 0) throw ParameterError("epsilon_j_delta: d and k must be >= 1");
  if (j >= diag.k()) throw ParameterError("epsilon_j_delta: cluster index out of range");
  double n = 0.0;
  for (const auto s : diag.cluster_sizes) n += static_cast<double>(s);
  const double dd = static_cast<double>(d);
  const double cap = std::log(static_cast<double>(k) * dd / delta_fail) / std::sqrt(2.0 * dd);
  const double phi_j = diag.phi_j[j];
  const double l_j = diag.per_cluster_cost[j];

  ClusterPrecision out;
  out.eps_j = phi_j > 0.0 ? std::min(eps / (3.0 * std::sqrt(diag.k_C * phi_j)), cap) : cap;
  if (phi_j <= 0.0 || l_j <= 0.0) {
    out.delta_j = delta_floor;
    out.degenerate = true;
    return out;
  }
  const double ratio = phi_j / l_j;
  out.delta_j = std::min(1.0, out.eps_j * out.eps_j) / (16.0 * n * n * diag.k_C * diag.k_C) * ratio * ratio;
  return out;
}

MeanEstimate quantum_mean_estimate(const Assignment& assignment, const DataSet& data,
                                   const Centers& centers0, std::size_t j,
                                   const ClusterDistribution& p_tilde, double eps_j,
                                   double delta_fail, double delta, Seed seed, QueryLedger& ledger,
                                   const EmulationConfig& config, bool add_noise) {
  if (!(eps_j > 0.0)) throw ParameterError("quantum_mean_estimate: eps_j must be > 0");
  if (!(delta_fail >= 0.0 && delta_fail < 1.0)) {
    throw ParameterError("quantum_mean_estimate: failure probability must lie in [0, 1)");
  }
  require_same_dim(data, centers0, "quantum_mean_estimate");
  if (p_tilde.probs.size() != data.n() || assignment.n() != data.n()) {
    throw DimensionError("quantum_mean_estimate: distribution size != n");
  }
  const auto d = static_cast<Eigen::Index>(data.d());
  const Vector c0 = centers0.center(j).transpose();

  Vector mu = Vector::Zero(d);
  double second = 0.0;
  for (const auto i : assignment.members[j]) {
    const double w = p_tilde.probs[i];
    if (w == 0.0) continue;
    const Vector x = data.point(i).transpose() - c0;
    mu += w * x;
    second += w * x.squaredNorm();
  }
  MeanEstimate est;
  est.mu_tilde = mu;
  est.trace = std::max(0.0, second - mu.squaredNorm());
  est.mu_hat = mu;

  Rng rng(seed);
  est.failed = rng.uniform() < delta_fail;
  const double u = rng.uniform();
  Vector dir(d);
  for (Eigen::Index c = 0; c < d; ++c) dir(c) = rng.normal();
  const double bound = eps_j * std::sqrt(est.trace);
  double radius = config.noise_scale * u * bound;
  if (est.failed) radius *= config.failure_blowup;
  if (add_noise && radius > 0.0 && dir.norm() > 0.0) est.mu_hat += radius * dir.normalized();
  if (!est.failed && (est.mu_hat - est.mu_tilde).norm() > bound * (1.0 + 1e-12) + 1e-300) {
    throw std::logic_error("quantum_mean_estimate: success draw violates the accuracy contract");
  }

  const auto k = static_cast<std::uint64_t>(centers0.k());
  const auto calls = static_cast<std::uint64_t>(
      std::ceil(config.constants.mean_est * std::sqrt(static_cast<double>(d)) / eps_j));
  const double eff_delta = std::max(delta, config.delta_floor);
  const double ratio = static_cast<double>(data.n()) / static_cast<double>(assignment.sizes[j]);
  const auto uses = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(std::ceil(config.constants.boost * std::sqrt(ratio) * std::log(1.0 / eff_delta))));
  ledger.mean_estimation_oracle_calls += calls;
  ledger.boosting_queries += calls * uses * (k + 1);
  ledger.cluster_assignment_queries += calls * (k + 1);
  ledger.rv_access_queries += calls * 2;
  return est;
}

QuantumStepResult quantum_kmeans_step(const DataSet& data, const Centers& centers0, double eps,
                                      double delta_fail, const EmulationConfig& config, Seed seed) {
  config.validate();
  if (!(eps > 0.0)) throw ParameterError("quantum_kmeans_step: eps must be > 0");
  if (!(delta_fail > 0.0 && delta_fail < 1.0)) throw ParameterError("quantum_kmeans_step: delta must lie in (0, 1)");
  const auto diag = diagnostics(data, centers0);
  const auto assignment = assign(data, centers0);
  const auto k = centers0.k();
  const auto d = data.d();

  QuantumStepResult out{centers0, {}, std::vector<bool>(k), std::vector<bool>(k),
                        std::vector<double>(k), std::vector<double>(k), 0.0};
  double delta = 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    const auto prec = epsilon_j_delta(diag, j, eps, delta_fail, d, k, config.delta_floor);
    out.eps_j[j] = prec.eps_j;
    out.delta_j[j] = prec.delta_j;
    out.degenerate[j] = prec.degenerate;
    delta = std::min(delta, prec.delta_j);
  }
  out.delta = config.delta_override.value_or(delta);

  const auto exact = cluster_means(data, assignment, centers0);
  Matrix next = centers0.matrix();
  for (std::size_t j = 0; j < k; ++j) {
    const auto p = cluster_distribution(assignment, j);
    const auto p_tilde = perturbed_distribution(p, out.delta, config, derive_seed(seed, j, 0));
    const auto est = quantum_mean_estimate(assignment, data, centers0, j, p_tilde, out.eps_j[j],
                                           delta_fail / static_cast<double>(k), out.delta,
                                           derive_seed(seed, j, 1), out.ledger, config,
                                           !out.degenerate[j]);
    out.failed[j] = est.failed;
    if (!out.degenerate[j] && out.delta <= out.delta_j[j] &&
        est.trace > 4.0 * diag.k_C * diag.phi_j[j] * (1.0 + 1e-9)) {
      throw DiagnosticError("quantum_kmeans_step: perturbed variance exceeds 4 k_C phi_j in cluster " +
                                std::to_string(j), j);
    }
    const auto row = static_cast<Eigen::Index>(j);
    if (p_tilde.probs == p.probs) {
      next.row(row) = exact.center(j) + (est.mu_hat - est.mu_tilde).transpose();
    } else {
      next.row(row) += est.mu_hat.transpose();
    }
  }
  out.centers = Centers(std::move(next));
  return out;
}

double predicted_query_bound(const Diagnostics& diag, double eps, std::size_t d, std::size_t k) {
  if (!(eps > 0.0)) throw ParameterError("predicted_query_bound: eps must be > 0");
  const double kk = static_cast<double>(k);
  const double dd = static_cast<double>(d);
  return std::pow(kk, 1.5) * diag.k_C * std::sqrt(dd) *
         (std::sqrt(diag.phi) / eps + std::sqrt(dd * kk / diag.k_C));
}

}  // namespace kmstep
