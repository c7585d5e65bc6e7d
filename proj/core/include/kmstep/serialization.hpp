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

#ifndef KMSTEP_SERIALIZATION_HPP_
#define KMSTEP_SERIALIZATION_HPP_

#include <cstddef>
#include <iosfwd>

#include <nlohmann/json.hpp>

#include "kmstep/experiments.hpp"
#include "kmstep/kmeans.hpp"
#include "kmstep/quantum_emulator.hpp"
#include "kmstep/samplers.hpp"

namespace kmstep {

using Json = nlohmann::json;

// Batches longer than this are written as their length only.
inline constexpr std::size_t kMaxSerializedBatch = 10000;

// Flat object: phi, phi_j, k_C, eta, eta_bar, eta_hat, cost, per_cluster_cost.
Json to_json(const Diagnostics& diag);
// NaN lambda_hats are written as null.
Json to_json(const StepReport& report);
Json to_json(const QueryLedger& ledger);
Json to_json(const EmulationConfig& config);
Json to_json(const QuantumStepResult& result);
Json to_json(const SweepResult& result);  // summaries and per-algorithm slopes
Json to_json(const MultiStepResult& result);
Json to_json(const InvarianceReport& report);
Json to_json(const BoundCheckReport& report);

// Reads the fields present in `j` over the defaults; unknown keys throw
// ParameterError.
EmulationConfig emulation_config_from_json(const Json& j, EmulationConfig base = {});

void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_multistep_csv(std::ostream& out, const MultiStepResult& result);
void write_invariance_csv(std::ostream& out, const InvarianceReport& report);
void write_bound_check_csv(std::ostream& out, const BoundCheckReport& report);

}  // namespace kmstep

#endif  // KMSTEP_SERIALIZATION_HPP_
