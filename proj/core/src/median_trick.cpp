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

#include <algorithm>
#include <cmath>
#include <string>

#include "kmstep/errors.hpp"
#include "kmstep/samplers.hpp"

namespace kmstep {

std::string_view to_string(MedianMetric metric) {
  switch (metric) {
    case MedianMetric::euclidean: return "euclidean";
    case MedianMetric::weighted: return "weighted";
  }
  return "unknown";
}

MedianMetric parse_median_metric(std::string_view name) {
  if (name == "euclidean") return MedianMetric::euclidean;
  if (name == "weighted") return MedianMetric::weighted;
  throw ParameterError("unknown median metric '" + std::string(name) + "'");
}

double MedianDistance::operator()(const Vector& x, const Vector& y) const {
  if (x.size() != y.size()) throw DimensionError("MedianDistance: candidate sizes differ");
  if (metric == MedianMetric::euclidean) return (x - y).norm();
  if (block_dim == 0 || weights.size() * block_dim != static_cast<std::size_t>(x.size())) {
    throw DimensionError("MedianDistance: weights x block_dim must equal the candidate size");
  }
  const auto bd = static_cast<Eigen::Index>(block_dim);
  double total = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    const auto off = static_cast<Eigen::Index>(j) * bd;
    total += weights[j] * (x.segment(off, bd) - y.segment(off, bd)).squaredNorm();
  }
  return std::sqrt(total);
}

std::size_t median_trick_index(std::span<const Vector> candidates, const MedianDistance& distance) {
  const auto t = candidates.size();
  if (t == 0) throw ParameterError("median_trick: need at least one candidate");
  for (const auto& c : candidates) {
    if (c.size() != candidates[0].size()) throw DimensionError("median_trick: candidate sizes differ");
  }
  std::vector<double> dist(t * t, 0.0);
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = i + 1; j < t; ++j) {
      dist[i * t + j] = dist[j * t + i] = distance(candidates[i], candidates[j]);
    }
  }
  const auto mid = (t - 1) / 2;
  std::vector<double> row(t);
  std::size_t best = 0;
  double best_median = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    std::copy_n(dist.begin() + static_cast<std::ptrdiff_t>(i * t), t, row.begin());
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(mid), row.end());
    const double median = row[mid];
    if (i == 0 || median < best_median) {
      best_median = median;
      best = i;
    }
  }
  return best;
}

Vector median_trick(std::span<const Vector> candidates, const MedianDistance& distance) {
  return candidates[median_trick_index(candidates, distance)];
}

BoostResult median_boosted_minibatch(const DataSet& data, const Centers& centers0, std::size_t b,
                                     std::size_t repeats, Seed seed,
                                     const MedianDistance& distance) {
  if (repeats == 0) throw ParameterError("median_boosted_minibatch: repeats must be >= 1");
  std::vector<Centers> candidates;
  std::vector<Vector> flat;
  candidates.reserve(repeats);
  flat.reserve(repeats);
  for (std::size_t r = 0; r < repeats; ++r) {
    candidates.push_back(minibatch_step(data, centers0, b, derive_seed(seed, r)).centers);
    flat.push_back(candidates.back().flatten());
  }
  MedianDistance dist = distance;
  if (dist.metric == MedianMetric::weighted && dist.block_dim == 0) dist.block_dim = centers0.d();
  const auto chosen = median_trick_index(flat, dist);
  return {candidates[chosen], chosen, std::move(candidates)};
}

}  // namespace kmstep
