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
#include <limits>
#include <sstream>

#include "kmstep/dataset.hpp"
#include "kmstep/errors.hpp"
#include "kmstep/serialization.hpp"

namespace kmstep {
namespace {

TEST(DiagnosticsJson, ExactKeys) {
  const auto [data, c0] = hard_instance(10, 3.0);
  const auto j = to_json(diagnostics(data, c0));
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  EXPECT_EQ(keys, (std::vector<std::string>{"cost", "eta", "eta_bar", "eta_hat", "k_C", "per_cluster_cost", "phi",
                                            "phi_j"}));
  EXPECT_EQ(j["k_C"].get<double>(), 2.0);
}

TEST(StepReportJson, NanBecomesNullAndLongBatchesElided) {
  StepReport r;
  r.empty_clusters = {1};
  r.lambda_hats = {1.5, std::numeric_limits<double>::quiet_NaN()};
  r.batch.indices = {0, 3};
  auto j = to_json(r);
  EXPECT_TRUE(j["lambda_hats"][1].is_null());
  EXPECT_EQ(j["batch"]["indices"].size(), 2u);
  r.batch.indices.assign(kMaxSerializedBatch + 1, 0);
  j = to_json(r);
  EXPECT_TRUE(j["batch"]["indices"].is_null());
  EXPECT_EQ(j["batch"]["size"].get<std::size_t>(), kMaxSerializedBatch + 1);
}

TEST(LedgerJson, AllFieldsAndTotal) {
  const auto j = to_json(QueryLedger{1, 2, 3, 7});
  EXPECT_EQ(j["total"].get<std::uint64_t>(), 6u);
  EXPECT_EQ(j["mean_estimation_oracle_calls"].get<std::uint64_t>(), 7u);
}

TEST(EmulationConfigJson, RoundTripAndUnknownKey) {
  EmulationConfig c;
  c.delta_prime_policy = DeltaPrimePolicy::uniform_random;
  c.garbage_policy = GarbagePolicy::global_uniform;
  c.failure_blowup = 3.0;
  c.constants.boost = 2.0;
  c.delta_override = 0.0;
  const auto back = emulation_config_from_json(to_json(c));
  EXPECT_EQ(back.delta_prime_policy, c.delta_prime_policy);
  EXPECT_EQ(back.garbage_policy, c.garbage_policy);
  EXPECT_EQ(back.failure_blowup, 3.0);
  EXPECT_EQ(back.constants.boost, 2.0);
  ASSERT_TRUE(back.delta_override.has_value());
  EXPECT_THROW(emulation_config_from_json(Json{{"nope", 1}}), ParameterError);
  EXPECT_THROW(emulation_config_from_json(Json{{"failure_blowup", "x"}}), ParameterError);
  EXPECT_THROW(emulation_config_from_json(Json{{"failure_blowup", 0.5}}), ParameterError);
}

TEST(ExperimentCsv, HeadersAndRowCounts) {
  SweepResult s;
  s.rows.push_back({16, Algorithm::uniform, 0, 0.5, 0.25, 1.0, 16});
  std::ostringstream out;
  write_sweep_csv(out, s);
  EXPECT_EQ(out.str(), "b,algorithm,trial,max_err,weighted_err,cost,samples\n16,uniform,0,0.5,0.25,1,16\n");
}

}  // namespace
}  // namespace kmstep
