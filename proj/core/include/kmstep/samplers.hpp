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

#ifndef KMSTEP_SAMPLERS_HPP_
#define KMSTEP_SAMPLERS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kmstep/kmeans.hpp"
#include "kmstep/rng.hpp"
#include "kmstep/types.hpp"

namespace kmstep {

enum class SamplingScheme { uniform, row_norm, row_norm_squared };

std::string_view to_string(SamplingScheme scheme);
SamplingScheme parse_sampling_scheme(std::string_view name);  // accepts '-' or '_'

// b indices drawn with replacement (a multiset), 0-based.
struct Batch {
  std::vector<std::size_t> indices;
  SamplingScheme scheme = SamplingScheme::uniform;

  std::size_t size() const noexcept { return indices.size(); }
};

// Draws i.i.d. indices from a fixed distribution over [0, n). Weighted schemes
// are proportional to ||v_i|| or ||v_i||^2; rows of zero norm are never drawn.
class IndexSampler {
 public:
  IndexSampler(const DataSet& data, SamplingScheme scheme);
  static IndexSampler uniform(std::size_t n);

  std::size_t n() const noexcept { return n_; }
  SamplingScheme scheme() const noexcept { return scheme_; }
  double probability(std::size_t i) const;
  std::vector<double> probabilities() const;

  std::size_t draw(Rng& rng) const;
  Batch draw(std::size_t b, Rng& rng) const;

 private:
  IndexSampler(std::size_t n, SamplingScheme scheme) : n_(n), scheme_(scheme) {}

  std::size_t n_;
  SamplingScheme scheme_;
  std::vector<double> weights_;     // empty for uniform
  std::vector<double> cumulative_;  // inclusive prefix sums of weights_
  double total_ = 0.0;
};

// b i.i.d. draws from the scheme's distribution; deterministic per seed.
// Throws ParameterError for weighted schemes on all-zero data.
Batch sample_indices(std::size_t n, std::size_t b, SamplingScheme scheme, const DataSet& data,
                     Seed seed);

struct StepReport {
  std::vector<std::size_t> empty_clusters;  // clusters that kept their initial center
  // b |C_j| / (n |batch_j|); NaN where batch_j is empty. Empty vector when
  // the caller did not supply the full partition.
  std::vector<double> lambda_hats;
  Batch batch;
  std::optional<Batch> size_batch;  // uniform cluster-size batch (two-batch steps only)
};

struct StepResult {
  Centers centers;
  StepReport report;
};

struct MinibatchOptions {
  // Full partition induced by centers0. Enables lambda_hats and avoids a
  // full pass when `exact_fallback` is requested.
  const Assignment* full_assignment = nullptr;
  // Replace a center whose batch cluster is empty by its exact Lloyd mean
  // (costs one full pass) instead of keeping c_j^0.
  bool exact_fallback = false;
};

// Mini-batch step on an explicit batch: c_j <- mean of batch points whose
// nearest initial center is j (repeats counted).
StepResult minibatch_step(const DataSet& data, const Centers& centers0, const Batch& batch,
                          const MinibatchOptions& options = {});
StepResult minibatch_step(const DataSet& data, const Centers& centers0, std::size_t b, Seed seed,
                          const MinibatchOptions& options = {});

struct DampedSpec {
  std::vector<double> alphas;  // one per cluster, each in [0, 1]

  static DampedSpec constant(std::size_t k, double alpha);
  void validate(std::size_t k) const;
  double min() const;
  double max() const;
};

// c_j <- (1 - alpha_j) c_j^0 + alpha_j * (undamped mini-batch center).
StepResult damped_minibatch_step(const DataSet& data, const Centers& centers0, const Batch& batch,
                                 const DampedSpec& damping, const MinibatchOptions& options = {});
StepResult damped_minibatch_step(const DataSet& data, const Centers& centers0, std::size_t b,
                                 const DampedSpec& damping, Seed seed,
                                 const MinibatchOptions& options = {});

// Two-batch importance-sampled step: cluster sizes from a uniform batch of
// size a, cluster sums from a norm-weighted batch of size b,
//   c_j = a / (n |A_j|) * sum_{i in B_j} v_i / (b p_i).
// Clusters missing from either batch keep c_j^0 and are reported.
StepResult dlt_step(const DataSet& data, const Centers& centers0, const Batch& size_batch,
                    const Batch& weighted_batch, const IndexSampler& weighted_sampler);
StepResult dlt_step(const DataSet& data, const Centers& centers0, std::size_t a, std::size_t b,
                    SamplingScheme scheme, Seed seed);
// Same, reusing a prebuilt weighted sampler (for repeated trials).
StepResult dlt_step(const DataSet& data, const Centers& centers0, std::size_t a, std::size_t b,
                    const IndexSampler& weighted_sampler, Seed seed);

// Sampled matrix-vector product: (1/b) sum_l A[:, s_l] x[s_l] / p[s_l].
// `a` is d x n. Throws ParameterError if probs do not sum to 1 within 1e-9 or a
// sampled index with x != 0 has zero probability.
Vector importance_estimator(const Eigen::MatrixXd& a, const Vector& x, std::span<const double> probs,
                            const Batch& batch);

enum class MedianMetric { euclidean, weighted };

std::string_view to_string(MedianMetric metric);
MedianMetric parse_median_metric(std::string_view name);

// Distance used by the median trick. `weighted` treats a candidate as k blocks
// of `block_dim` coordinates and weights block j's squared distance by
// weights[j] (typically |C_j| / n).
struct MedianDistance {
  MedianMetric metric = MedianMetric::euclidean;
  std::vector<double> weights;
  std::size_t block_dim = 0;

  double operator()(const Vector& x, const Vector& y) const;
};

// Index i* minimizing the lower median of {dist(X_i, X_j) : j in [t]}
// (self-distance included). Ties go to the lowest index.
std::size_t median_trick_index(std::span<const Vector> candidates,
                               const MedianDistance& distance = {});
Vector median_trick(std::span<const Vector> candidates, const MedianDistance& distance = {});

// Runs `repeats` independent mini-batch steps and returns the median-trick
// choice among their flattened outputs.
struct BoostResult {
  Centers centers;
  std::size_t chosen = 0;
  std::vector<Centers> candidates;
};
BoostResult median_boosted_minibatch(const DataSet& data, const Centers& centers0, std::size_t b,
                                     std::size_t repeats, Seed seed,
                                     const MedianDistance& distance = {});

}  // namespace kmstep

#endif  // KMSTEP_SAMPLERS_HPP_
