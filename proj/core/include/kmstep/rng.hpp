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

#ifndef KMSTEP_RNG_HPP_
#define KMSTEP_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <random>

namespace kmstep {

using Seed = std::uint64_t;

// Seeded random source with platform-independent output.
//
// The engine is std::mt19937_64, whose sequence is fixed by the standard. The
// standard distributions are implementation-defined, so the conversions to
// bounded integers, uniforms and normals are done here instead.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Unbiased (Lemire's multiply-and-reject).
  std::size_t index(std::size_t n);

  // Standard normal via Box-Muller (one draw per call).
  double normal();

 private:
  std::mt19937_64 engine_;
};

// Deterministically derive an independent child seed from (base, stream).
// Used to key trials so results do not depend on scheduling.
Seed derive_seed(Seed base, std::uint64_t stream);
Seed derive_seed(Seed base, std::uint64_t stream_a, std::uint64_t stream_b);

}  // namespace kmstep

#endif  // KMSTEP_RNG_HPP_
