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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "kmstep/dataset.hpp"
#include "kmstep/errors.hpp"
#include "kmstep/kmeans.hpp"
#include "kmstep/quantum_emulator.hpp"
#include "support/oracles.hpp"

namespace kmstep {
namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

TEST(ClusterDistributionOp, HardInstanceAndSingleton) {
  const auto [data, c0] = hard_instance(4, 3.0);
  const auto a = assign(data, c0);
  const auto p = cluster_distribution(a, 0);
  EXPECT_EQ(p.probs, (std::vector<double>{0.5, 0.5, 0.0, 0.0}));
  EXPECT_EQ(sum(p.probs), 1.0);

  const auto single = Assignment::from_labels({0, 0, 1}, 2);
  EXPECT_EQ(cluster_distribution(single, 1).probs, (std::vector<double>{0.0, 0.0, 1.0}));
  const auto empty = Assignment::from_labels({0, 0}, 2);
  EXPECT_THROW(cluster_distribution(empty, 1), DiagnosticError);
}

TEST(PerturbedDistributionOp, VanishingDelta) {
  const auto a = Assignment::from_labels({0, 1, 0, 1, 1}, 2);
  const auto p = cluster_distribution(a, 1);
  const auto q = perturbed_distribution(p, 1e-30, EmulationConfig{}, 1);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(q.probs[i], p.probs[i], 1e-15);
}

TEST(PerturbedDistributionOp, WorstCaseOffClusterClosedForm) {
  const auto [data, c0] = hard_instance(4, 3.0);
  const auto a = assign(data, c0);
  const auto p = cluster_distribution(a, 0);
  const auto q = perturbed_distribution(p, 0.01, EmulationConfig{}, 1);
  EXPECT_DOUBLE_EQ(q.probs[2], 0.01 / 2);
  EXPECT_DOUBLE_EQ(q.probs[3], 0.01 / 2);
  EXPECT_DOUBLE_EQ(q.probs[0], 0.99 * 0.5);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_LE(std::abs(q.probs[i] - p.probs[i]), 4 * std::sqrt(0.01));
}

TEST(PerturbedDistributionOp, RandomInputsKeepMassAndBound) {
  for (Seed s = 0; s < 200; ++s) {
    Rng r(s);
    const std::size_t n = 1 + r.index(30);
    const std::size_t k = 1 + r.index(4);
    std::vector<std::size_t> labels(n);
    for (auto& l : labels) l = r.index(k);
    labels[0] = 0;
    const auto a = Assignment::from_labels(labels, k);
    const auto p = cluster_distribution(a, 0);
    EmulationConfig cfg;
    cfg.delta_prime_policy = s % 2 ? DeltaPrimePolicy::uniform_random : DeltaPrimePolicy::worst_case;
    cfg.garbage_policy = s % 3 ? GarbagePolicy::off_cluster_uniform : GarbagePolicy::global_uniform;
    const double delta = r.uniform(0.0, 0.9);
    const auto q = perturbed_distribution(p, delta, cfg, s);
    EXPECT_NEAR(sum(q.probs), 1.0, 1e-12);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_GE(q.probs[i], 0.0);
      EXPECT_LE(std::abs(q.probs[i] - p.probs[i]), 4 * std::sqrt(delta));
    }
  }
}

TEST(PerturbedDistributionOp, FullSupportFallsBackToGlobal) {
  const auto a = Assignment::from_labels({0, 0, 0}, 1);
  const auto q = perturbed_distribution(cluster_distribution(a, 0), 0.3, EmulationConfig{}, 1);
  for (const double v : q.probs) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
}

Diagnostics two_cluster_diag() {
  Diagnostics d;
  d.phi_j = {1.0, 0.5};
  d.phi = 1.5;
  d.per_cluster_cost = {2.0, 0.5};
  d.cost = 2.5;
  d.cluster_sizes = {50, 50};
  d.k_C = 2.0;
  return d;
}

TEST(EpsilonJDelta, DirectEvaluation) {
  const auto diag = two_cluster_diag();
  const auto p = epsilon_j_delta(diag, 0, 0.3, 0.1, 2, 2);
  const double cap = std::log(2.0 * 2.0 / 0.1) / std::sqrt(4.0);
  ASSERT_LT(0.3 / (3 * std::sqrt(2.0)), cap);
  EXPECT_NEAR(p.eps_j, 0.3 / (3 * std::sqrt(2.0)), 1e-15);
  EXPECT_FALSE(p.degenerate);
  const double expected = std::min(1.0, p.eps_j * p.eps_j) / (16.0 * 100 * 100 * 4) * (1.0 / 2.0) * (1.0 / 2.0);
  EXPECT_NEAR(p.delta_j, expected, 1e-15 * expected);

  const auto q = epsilon_j_delta(diag, 1, 0.3, 0.1, 2, 2);
  const double eps1 = 0.3 / (3 * std::sqrt(2.0 * 0.5));
  const double delta1 = std::min(1.0, eps1 * eps1) / (16.0 * 100 * 100 * 4);
  EXPECT_NEAR(q.delta_j, delta1, 1e-15 * delta1);
  EXPECT_DOUBLE_EQ(std::min(p.delta_j, q.delta_j), p.delta_j);
}

TEST(EpsilonJDelta, CapAndDegenerate) {
  auto diag = two_cluster_diag();
  const double cap = std::log(2.0 * 3.0 / 0.2) / std::sqrt(6.0);
  EXPECT_LE(epsilon_j_delta(diag, 0, 1e6, 0.2, 3, 2).eps_j, cap);
  diag.phi_j[1] = 0.0;
  const auto p = epsilon_j_delta(diag, 1, 0.3, 0.2, 3, 2);
  EXPECT_TRUE(p.degenerate);
  EXPECT_DOUBLE_EQ(p.eps_j, cap);
  EXPECT_EQ(p.delta_j, 1e-18);
  EXPECT_THROW(epsilon_j_delta(diag, 0, 0.0, 0.2, 3, 2), ParameterError);
}

TEST(QuantumMeanEstimate, ExactMeanAndTraceUnderExactDistribution) {
  for (Seed s = 0; s < 50; ++s) {
    Rng r(s);
    const auto inst = testing::random_instance(r, 60, 3, 3);
    const auto a = assign(inst.data, inst.centers);
    const auto diag = diagnostics(inst.data, inst.centers);
    const auto lloyd = lloyd_step(inst.data, inst.centers);
    for (std::size_t j = 0; j < 3; ++j) {
      QueryLedger ledger;
      const auto est = quantum_mean_estimate(a, inst.data, inst.centers, j, cluster_distribution(a, j), 0.1, 0.0,
                                             1e-6, s, ledger, EmulationConfig{});
      const Vector shift = (lloyd.centers.center(j) - inst.centers.center(j)).transpose();
      EXPECT_LE((est.mu_tilde - shift).cwiseAbs().maxCoeff(), 1e-10);
      const double expected_tr = 60.0 / static_cast<double>(a.sizes[j]) * diag.phi_j[j];
      EXPECT_LE(testing::rel_diff(est.trace, expected_tr), 1e-10);
      EXPECT_LE((est.mu_hat - est.mu_tilde).norm(), 0.1 * std::sqrt(est.trace) * (1 + 1e-12));
      EXPECT_GT(ledger.mean_estimation_oracle_calls, 0u);
    }
  }
}

TEST(QuantumMeanEstimate, ZeroVarianceGivesExactMean) {
  Matrix m(4, 1);
  m << 2, 2, 7, 7;
  const DataSet data(m);
  Matrix c(2, 1);
  c << 1.5, 7.0;
  const Centers c0(c);
  const auto a = assign(data, c0);
  QueryLedger ledger;
  const auto est = quantum_mean_estimate(a, data, c0, 0, cluster_distribution(a, 0), 0.2, 0.0, 1e-6, 1, ledger,
                                         EmulationConfig{});
  EXPECT_EQ(est.trace, 0.0);
  EXPECT_EQ(est.mu_hat, est.mu_tilde);
  EXPECT_DOUBLE_EQ(est.mu_hat(0), 0.5);
  EXPECT_THROW(quantum_mean_estimate(a, data, c0, 0, cluster_distribution(a, 0), 0.0, 0.0, 1e-6, 1, ledger,
                                     EmulationConfig{}),
               ParameterError);
}

TEST(QuantumMeanEstimate, HardInstanceFarClusterStays) {
  const auto [data, c0] = hard_instance(10, 4.0);
  const auto a = assign(data, c0);
  QueryLedger ledger;
  const auto est = quantum_mean_estimate(a, data, c0, 1, cluster_distribution(a, 1), 0.1, 0.0, 1e-6, 1, ledger,
                                         EmulationConfig{});
  EXPECT_EQ(est.mu_tilde(0), 0.0);
  EXPECT_EQ(c0.matrix()(1, 0) + est.mu_hat(0), 4.0);
}

TEST(QuantumMeanEstimate, LedgerChargesPerCall) {
  const auto [data, c0] = hard_instance(10, 4.0);
  const auto a = assign(data, c0);
  QueryLedger ledger;
  EmulationConfig cfg;
  quantum_mean_estimate(a, data, c0, 0, cluster_distribution(a, 0), 0.25, 0.0, std::exp(-3.0), 1, ledger, cfg);
  const std::uint64_t calls = 4;                                          // ceil(sqrt(1) / 0.25)
  const auto uses = static_cast<std::uint64_t>(std::ceil(std::sqrt(2.0) * 3.0));  // sqrt(n/|C|) ln(1/Delta)
  EXPECT_EQ(ledger.mean_estimation_oracle_calls, calls);
  EXPECT_EQ(ledger.cluster_assignment_queries, calls * 3);
  EXPECT_EQ(ledger.rv_access_queries, calls * 2);
  EXPECT_EQ(ledger.boosting_queries, calls * uses * 3);
  EXPECT_EQ(ledger.total(), ledger.cluster_assignment_queries + ledger.boosting_queries + ledger.rv_access_queries);
}

TEST(QuantumStep, NoiselessEqualsLloyd) {
  for (Seed s = 0; s < 30; ++s) {
    Rng r(s + 77);
    const auto inst = testing::random_instance(r, 100, 2, 3);
    const auto lloyd = lloyd_step(inst.data, inst.centers);
    const auto q = quantum_kmeans_step(inst.data, inst.centers, 0.1, 0.1, EmulationConfig::noiseless(), s);
    const double scale = 1.0 + lloyd.centers.matrix().cwiseAbs().maxCoeff();
    EXPECT_LE((q.centers.matrix() - lloyd.centers.matrix()).cwiseAbs().maxCoeff(), 1e-12 * scale);
    EXPECT_EQ(q.delta, 0.0);
  }
}

TEST(QuantumStep, DefaultConfigContracts) {
  const auto preset = planar_mixture_preset(0.5, 2000, 3);
  const auto diag = diagnostics(preset.data, preset.initial_centers);
  for (Seed s = 0; s < 20; ++s) {
    const auto q = quantum_kmeans_step(preset.data, preset.initial_centers, 0.1, 0.2, EmulationConfig{}, s);
    EXPECT_GT(q.delta, 0.0);
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_LE(q.eps_j[j], std::log(4.0 * 2.0 / 0.2) / std::sqrt(4.0));
      EXPECT_LE(q.delta, q.delta_j[j]);
      EXPECT_FALSE(q.degenerate[j]);
    }
    EXPECT_GT(q.ledger.total(), 0u);
    EXPECT_GT(predicted_query_bound(diag, 0.1, 2, 4), 0.0);
  }
  const auto a = quantum_kmeans_step(preset.data, preset.initial_centers, 0.1, 0.2, EmulationConfig{}, 5);
  const auto b = quantum_kmeans_step(preset.data, preset.initial_centers, 0.1, 0.2, EmulationConfig{}, 5);
  EXPECT_TRUE(a.centers == b.centers);
  EXPECT_EQ(a.ledger, b.ledger);
}

TEST(QuantumStep, DegenerateClusterFlagged) {
  const auto [data, c0] = hard_instance(10, 4.0);
  Matrix c(2, 1);
  c << -1.0, 4.0;
  const auto q = quantum_kmeans_step(data, Centers(c), 0.1, 0.1, EmulationConfig{}, 1);
  EXPECT_TRUE(q.degenerate[0]);
  EXPECT_TRUE(q.degenerate[1]);
  EXPECT_EQ(q.delta, 1e-18);
  EXPECT_EQ(q.centers.matrix()(0, 0), -1.0);
}

TEST(QueryLedgerOps, MergeIsAdditive) {
  QueryLedger a{1, 2, 3, 4}, b{10, 20, 30, 40};
  a.merge(b);
  EXPECT_EQ(a, (QueryLedger{11, 22, 33, 44}));
  EXPECT_EQ(a.total(), 66u);
}

TEST(PredictedBound, Values) {
  Diagnostics d;
  d.phi = 1.0;
  d.k_C = 1.0;
  EXPECT_DOUBLE_EQ(predicted_query_bound(d, 0.1, 4, 1), 24.0);
  double prev = predicted_query_bound(d, 0.01, 4, 3);
  for (const double eps : {0.1, 1.0, 10.0, 1e6}) {
    const double cur = predicted_query_bound(d, eps, 4, 3);
    EXPECT_LE(cur, prev);
    prev = cur;
  }
  Diagnostics d2 = d;
  d2.phi = 2.0;
  const double tail = std::pow(3.0, 1.5) * 2.0 * std::sqrt(4.0 * 3.0);
  EXPECT_NEAR(predicted_query_bound(d2, 0.5, 4, 3) - tail, std::sqrt(2.0) * (predicted_query_bound(d, 0.5, 4, 3) - tail),
              1e-9);
  EXPECT_THROW(predicted_query_bound(d, 0.0, 4, 1), ParameterError);
}

TEST(EmulationConfigOps, Validation) {
  EmulationConfig c;
  EXPECT_NO_THROW(c.validate());
  c.failure_blowup = 0.5;
  EXPECT_THROW(c.validate(), ParameterError);
  c = {};
  c.constants.boost = 0.0;
  EXPECT_THROW(c.validate(), ParameterError);
  EXPECT_EQ(parse_delta_prime_policy("uniform-random"), DeltaPrimePolicy::uniform_random);
  EXPECT_EQ(parse_garbage_policy("global_uniform"), GarbagePolicy::global_uniform);
  EXPECT_THROW(parse_garbage_policy("x"), ParameterError);
}

}  // namespace
}  // namespace kmstep
