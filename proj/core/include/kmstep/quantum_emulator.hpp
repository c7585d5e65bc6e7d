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

#ifndef KMSTEP_QUANTUM_EMULATOR_HPP_
#define KMSTEP_QUANTUM_EMULATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "kmstep/kmeans.hpp"
#include "kmstep/rng.hpp"
#include "kmstep/types.hpp"

namespace kmstep {

// A distribution over [0, n) attached to cluster `cluster`.
struct ClusterDistribution {
  std::vector<double> probs;
  std::size_t cluster = 0;
};

enum class DeltaPrimePolicy { worst_case, uniform_random };
enum class GarbagePolicy { off_cluster_uniform, global_uniform };

std::string_view to_string(DeltaPrimePolicy policy);
std::string_view to_string(GarbagePolicy policy);
DeltaPrimePolicy parse_delta_prime_policy(std::string_view name);
GarbagePolicy parse_garbage_policy(std::string_view name);

// Multipliers for the query-count formulas.
struct QueryConstants {
  double mean_est = 1.0;
  double boost = 1.0;
};

struct EmulationConfig {
  DeltaPrimePolicy delta_prime_policy = DeltaPrimePolicy::worst_case;
  GarbagePolicy garbage_policy = GarbagePolicy::off_cluster_uniform;
  double failure_blowup = 10.0;
  QueryConstants constants;
  // Scales the noise radius; 0 suppresses noise.
  double noise_scale = 1.0;
  // Replaces the computed Delta when set (0 disables the perturbation).
  std::optional<double> delta_override;
  // Delta_j used for degenerate clusters.
  double delta_floor = 1e-18;

  void validate() const;
  // No perturbation, no noise, no failure blowup.
  static EmulationConfig noiseless();
};

struct QueryLedger {
  std::uint64_t cluster_assignment_queries = 0;
  std::uint64_t boosting_queries = 0;
  std::uint64_t rv_access_queries = 0;
  std::uint64_t mean_estimation_oracle_calls = 0;  // not a QRAM query; excluded from total

  std::uint64_t total() const noexcept {
    return cluster_assignment_queries + boosting_queries + rv_access_queries;
  }
  void merge(const QueryLedger& other) noexcept;
  friend bool operator==(const QueryLedger&, const QueryLedger&) = default;
};

// Uniform over the members of cluster j. Throws DiagnosticError if empty.
ClusterDistribution cluster_distribution(const Assignment& assignment, std::size_t j);

// (1 - D') p + D' g with D' = delta (worst_case) or Uniform[0, delta].
// g is uniform off the support of p (global when p has full support) or
// uniform on [0, n). Throws std::logic_error if max |p - p~| > 4 sqrt(delta).
ClusterDistribution perturbed_distribution(const ClusterDistribution& p, double delta,
                                           const EmulationConfig& config, Seed seed);

struct ClusterPrecision {
  double eps_j = 0.0;
  double delta_j = 0.0;
  bool degenerate = false;  // phi_j = 0 or L_j = 0
};

// L_j is taken from diag.per_cluster_cost.
ClusterPrecision epsilon_j_delta(const Diagnostics& diag, std::size_t j, double eps, double delta_fail,
                                 std::size_t d, std::size_t k, double delta_floor = 1e-18);

struct MeanEstimate {
  Vector mu_hat;
  Vector mu_tilde;
  double trace = 0.0;  // tr of the covariance of X_j under p~
  bool failed = false;
};

// Emulated mean estimation of X_j(i) = v_i - c_j^0 (i in C_j), 0 otherwise,
// under p_tilde. Charges the oracle calls and their QRAM queries to `ledger`.
// `delta` is the step-wide Delta (enters the boosting cost).
MeanEstimate quantum_mean_estimate(const Assignment& assignment, const DataSet& data,
                                   const Centers& centers0, std::size_t j,
                                   const ClusterDistribution& p_tilde, double eps_j,
                                   double delta_fail, double delta, Seed seed, QueryLedger& ledger,
                                   const EmulationConfig& config, bool add_noise = true);

struct QuantumStepResult {
  Centers centers;
  QueryLedger ledger;
  std::vector<bool> degenerate;
  std::vector<bool> failed;  // failure injection fired for cluster j
  std::vector<double> eps_j;
  std::vector<double> delta_j;
  double delta = 0.0;  // the Delta actually used
};

// One emulated quantum uniform k-means iteration. delta_fail is the overall
// failure budget; each cluster fails with probability delta_fail / k.
QuantumStepResult quantum_kmeans_step(const DataSet& data, const Centers& centers0, double eps,
                                      double delta_fail, const EmulationConfig& config, Seed seed);

// k^{3/2} k_C sqrt(d) (sqrt(phi)/eps + sqrt(d k / k_C)) with unit constants.
double predicted_query_bound(const Diagnostics& diag, double eps, std::size_t d, std::size_t k);

}  // namespace kmstep

#endif  // KMSTEP_QUANTUM_EMULATOR_HPP_
