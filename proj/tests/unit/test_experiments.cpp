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

#include <atomic>
#include <cmath>
#include <set>
#include <tuple>

#include "kmstep/dataset.hpp"
#include "kmstep/errors.hpp"
#include "kmstep/experiments.hpp"
#include "support/oracles.hpp"

namespace kmstep {
namespace {

TEST(Quantile, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(quantile({3, 1, 2}, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4, 5}, 0.05), 1.2);
  EXPECT_THROW(quantile({}, 0.5), ParameterError);
}

TEST(LogLogSlope, PowerLaw) {
  std::vector<double> x, y;
  for (int i = 1; i <= 6; ++i) {
    x.push_back(std::pow(2.0, i));
    y.push_back(3.0 * std::pow(x.back(), -0.5));
  }
  EXPECT_NEAR(loglog_slope(x, y), -0.5, 1e-12);
  EXPECT_THROW(loglog_slope({1.0}, {1.0}), ParameterError);
}

TEST(ParallelFor, CoversEveryIndexAndPropagatesErrors) {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 5) throw ParameterError("boom");
               }),
               ParameterError);
}

TEST(Algorithms, TagsRoundTrip) {
  for (const auto a : all_algorithms()) EXPECT_EQ(parse_algorithm(to_string(a)), a);
  EXPECT_EQ(parse_algorithm("dlt-row-norm"), Algorithm::dlt_row_norm);
  EXPECT_THROW(parse_algorithm("kmeans++"), ParameterError);
  EXPECT_EQ(samples_per_step(Algorithm::uniform, 8), 8u);
  EXPECT_EQ(samples_per_step(Algorithm::dlt_row_norm, 8), 16u);
}

TEST(BatchSweep, RowsUniqueOrderedAndDeterministic) {
  const auto p = planar_mixture_preset(0.3, 200, 2);
  const std::vector<std::size_t> bs{16, 64};
  const auto res = batch_sweep(p.data, p.initial_centers, bs, all_algorithms(), 5, 9, 2);
  ASSERT_EQ(res.rows.size(), 2u * 3u * 5u);
  std::set<std::tuple<std::size_t, int, std::size_t>> keys;
  for (const auto& r : res.rows) {
    keys.insert({r.b, static_cast<int>(r.algorithm), r.trial});
    EXPECT_EQ(r.samples, samples_per_step(r.algorithm, r.b));
  }
  EXPECT_EQ(keys.size(), res.rows.size());
  const auto again = batch_sweep(p.data, p.initial_centers, bs, all_algorithms(), 5, 9, 1);
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    EXPECT_EQ(res.rows[i].max_err, again.rows[i].max_err);
    EXPECT_EQ(res.rows[i].cost, again.rows[i].cost);
  }
  EXPECT_EQ(res.summaries().size(), 6u);
  EXPECT_THROW(batch_sweep(p.data, p.initial_centers, {0}, all_algorithms(), 5, 9), ParameterError);
}

TEST(Multistep, FullBatchTracksExactly) {
  const auto p = planar_mixture_preset(0.5, 100, 4);
  MultiStepOptions opts;
  opts.force_full_batch = true;
  const auto res = multistep_run(p.data, p.initial_centers, 5, 400, {Algorithm::uniform}, 2, 1, opts);
  ASSERT_EQ(res.rows.size(), 10u);
  for (const auto& r : res.rows) EXPECT_EQ(r.max_err, 0.0);
  EXPECT_THROW(multistep_run(p.data, p.initial_centers, 5, 400, {Algorithm::dlt_row_norm}, 2, 1, opts),
               ParameterError);
}

TEST(Multistep, SingleStepMatchesSweepRow) {
  const auto p = planar_mixture_preset(0.5, 100, 4);
  const auto ms = multistep_run(p.data, p.initial_centers, 1, 32, all_algorithms(), 3, 21);
  const auto sw = batch_sweep(p.data, p.initial_centers, {32}, all_algorithms(), 3, 21);
  ASSERT_EQ(ms.rows.size(), sw.rows.size());
  for (std::size_t i = 0; i < ms.rows.size(); ++i) {
    EXPECT_EQ(ms.rows[i].max_err, sw.rows[i].max_err);
    EXPECT_EQ(ms.rows[i].trial, sw.rows[i].trial);
  }
}

TEST(Multistep, ErrorsStayBounded) {
  const auto p = planar_mixture_preset(0.5, 200, 4);
  const auto res = multistep_run(p.data, p.initial_centers, 6, 64, all_algorithms(), 4, 2);
  const double diameter = 20.0;
  for (const auto& r : res.rows) {
    EXPECT_TRUE(std::isfinite(r.max_err));
    EXPECT_LT(r.max_err, diameter);
  }
  EXPECT_EQ(res.summaries().size(), 18u);
}

TEST(Invariance, UniformHitRateAndShiftEquivariance) {
  const auto rep = invariance_demo(10.0, 1000, 1.0, {2, 4}, 4000, 3);
  for (const auto& r : rep.rows) {
    EXPECT_LE(std::abs(r.hit_rate - r.closed_form_hit), 3.0 * testing::binomial_se(r.closed_form_hit, r.trials) + 1e-12)
        << r.b << r.instance << to_string(r.algorithm);
    if (r.algorithm == Algorithm::uniform) {
      EXPECT_NEAR(r.closed_form_hit, 1.0 - 2.0 * std::pow(0.5, static_cast<double>(r.b)), 1e-15);
    }
  }
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    if (r.algorithm != Algorithm::uniform || r.instance != "original") continue;
    for (const auto& s : rep.rows) {
      if (s.algorithm == Algorithm::uniform && s.instance == "shifted" && s.b == r.b) {
        EXPECT_EQ(s.recovery_rate, r.recovery_rate);
      }
    }
  }
}

TEST(BoundCheck, PrescribedBatchSizes) {
  Diagnostics d;
  d.phi = 0.5;
  d.k_C = 4.0;
  d.phi_j = {0.1, 0.1, 0.1, 0.2};
  EXPECT_EQ(prescribed_batch_size(BoundKind::thm_main, d, 0.1, 0.2), static_cast<std::size_t>(std::ceil(4 * 4 * 0.5 / (0.01 * 0.2))));
  EXPECT_EQ(prescribed_batch_size(BoundKind::cor_monotone, d, 0.5, 0.2), static_cast<std::size_t>(std::ceil(4 * 4 / (0.5 * 0.2))));
  EXPECT_EQ(prescribed_batch_size(BoundKind::cor_damped, d, 10.0, 0.2), static_cast<std::size_t>(std::ceil(4 * 8 * std::log(80.0))));
  EXPECT_EQ(prescribed_batch_size(BoundKind::quantum_main, d, 0.1, 0.2), 0u);
}

TEST(BoundCheck, NoiselessQuantumNeverFails) {
  const auto p = planar_mixture_preset(0.5, 200, 4);
  BoundCheckOptions opts;
  opts.quantum = EmulationConfig::noiseless();
  const auto rep = bound_check(p.data, p.initial_centers, 0.1, 0.2, 20, 1, BoundKind::quantum_main, opts);
  EXPECT_EQ(rep.failures, 0u);
  EXPECT_TRUE(rep.pass);
  ASSERT_TRUE(rep.mean_ledger_total.has_value());
}

TEST(BoundCheck, SmallMainRun) {
  const auto p = planar_mixture_preset(0.3, 500, 4);
  const auto rep = bound_check(p.data, p.initial_centers, 0.2, 0.2, 50, 1, BoundKind::thm_main);
  EXPECT_EQ(rep.values.size(), 50u);
  EXPECT_TRUE(rep.pass);
  EXPECT_NEAR(rep.sigma, std::sqrt(0.2 * 0.8 / 50), 1e-15);
  EXPECT_THROW(bound_check(p.data, p.initial_centers, 0.0, 0.2, 5, 1, BoundKind::thm_main), ParameterError);
  EXPECT_EQ(parse_bound_kind("cor-damped"), BoundKind::cor_damped);
}

}  // namespace
}  // namespace kmstep
