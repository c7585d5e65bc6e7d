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

#include "kmstep/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kmstep/errors.hpp"

namespace kmstep {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_batch(const Batch& batch, std::size_t n, const char* op) {
  if (batch.indices.empty()) throw ParameterError(std::string(op) + ": batch size must be >= 1");
  for (const auto s : batch.indices) {
    if (s >= n) {
      throw ParameterError(std::string(op) + ": batch index " + std::to_string(s) +
                           " out of range for n=" + std::to_string(n));
    }
  }
}

std::string normalize_name(std::string_view name) {
  std::string out(name);
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

}  // namespace

std::string_view to_string(SamplingScheme scheme) {
  switch (scheme) {
    case SamplingScheme::uniform: return "uniform";
    case SamplingScheme::row_norm: return "row_norm";
    case SamplingScheme::row_norm_squared: return "row_norm_squared";
  }
  return "unknown";
}

SamplingScheme parse_sampling_scheme(std::string_view name) {
  const auto norm = normalize_name(name);
  if (norm == "uniform") return SamplingScheme::uniform;
  if (norm == "row_norm") return SamplingScheme::row_norm;
  if (norm == "row_norm_squared") return SamplingScheme::row_norm_squared;
  throw ParameterError("unknown sampling scheme '" + std::string(name) + "'");
}

IndexSampler::IndexSampler(const DataSet& data, SamplingScheme scheme)
    : n_(data.n()), scheme_(scheme) {
  if (scheme == SamplingScheme::uniform) return;
  weights_.resize(n_);
  cumulative_.resize(n_);
  long double running = 0.0L;
  for (std::size_t i = 0; i < n_; ++i) {
    const double sq = data.point(i).squaredNorm();
    weights_[i] = scheme == SamplingScheme::row_norm_squared ? sq : std::sqrt(sq);
    running += weights_[i];
    cumulative_[i] = static_cast<double>(running);
  }
  total_ = cumulative_.back();
  if (!(total_ > 0.0)) {
    throw ParameterError("IndexSampler: " + std::string(to_string(scheme)) +
                         " sampling needs at least one row of nonzero norm");
  }
}

IndexSampler IndexSampler::uniform(std::size_t n) {
  if (n == 0) throw ParameterError("IndexSampler: n must be >= 1");
  return IndexSampler(n, SamplingScheme::uniform);
}

double IndexSampler::probability(std::size_t i) const {
  if (i >= n_) throw ParameterError("IndexSampler::probability: index out of range");
  if (scheme_ == SamplingScheme::uniform) return 1.0 / static_cast<double>(n_);
  return weights_[i] / total_;
}

std::vector<double> IndexSampler::probabilities() const {
  std::vector<double> p(n_);
  for (std::size_t i = 0; i < n_; ++i) p[i] = probability(i);
  return p;
}

std::size_t IndexSampler::draw(Rng& rng) const {
  if (scheme_ == SamplingScheme::uniform) return rng.index(n_);
  const double target = rng.uniform() * total_;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) {
    // Rounding put the target on the total; take the last row with weight.
    auto last = static_cast<std::size_t>(n_ - 1);
    while (weights_[last] == 0.0) --last;
    return last;
  }
  return static_cast<std::size_t>(it - cumulative_.begin());
}

Batch IndexSampler::draw(std::size_t b, Rng& rng) const {
  Batch batch;
  batch.scheme = scheme_;
  batch.indices.resize(b);
  for (auto& s : batch.indices) s = draw(rng);
  return batch;
}

Batch sample_indices(std::size_t n, std::size_t b, SamplingScheme scheme, const DataSet& data,
                     Seed seed) {
  if (n == 0) throw ParameterError("sample_indices: n must be >= 1");
  if (b == 0) throw ParameterError("sample_indices: b must be >= 1");
  Rng rng(seed);
  if (scheme == SamplingScheme::uniform) return IndexSampler::uniform(n).draw(b, rng);
  if (n != data.n()) throw DimensionError("sample_indices: n does not match the data");
  return IndexSampler(data, scheme).draw(b, rng);
}

StepResult minibatch_step(const DataSet& data, const Centers& centers0, const Batch& batch,
                          const MinibatchOptions& options) {
  require_same_dim(data, centers0, "minibatch_step");
  check_batch(batch, data.n(), "minibatch_step");
  const auto k = centers0.k();
  const auto d = static_cast<Eigen::Index>(data.d());
  if (options.full_assignment != nullptr &&
      (options.full_assignment->k() != k || options.full_assignment->n() != data.n())) {
    throw DimensionError("minibatch_step: full assignment does not match data/centers");
  }

  std::vector<std::vector<long double>> sums(k, std::vector<long double>(static_cast<std::size_t>(d), 0.0L));
  std::vector<std::size_t> counts(k, 0);
  for (const auto s : batch.indices) {
    const auto point = data.point(s);
    const auto j = nearest_center(centers0, point);
    ++counts[j];
    for (Eigen::Index c = 0; c < d; ++c) sums[j][static_cast<std::size_t>(c)] += point(c);
  }

  Matrix out = centers0.matrix();
  StepReport report;
  std::optional<Centers> exact;
  for (std::size_t j = 0; j < k; ++j) {
    if (counts[j] > 0) {
      const auto count = static_cast<long double>(counts[j]);
      for (Eigen::Index c = 0; c < d; ++c) {
        out(static_cast<Eigen::Index>(j), c) = static_cast<double>(sums[j][static_cast<std::size_t>(c)] / count);
      }
      continue;
    }
    report.empty_clusters.push_back(j);
    if (options.exact_fallback) {
      if (!exact) {
        exact = options.full_assignment != nullptr
                    ? cluster_means(data, *options.full_assignment, centers0)
                    : lloyd_step(data, centers0).centers;
      }
      out.row(static_cast<Eigen::Index>(j)) = exact->center(j);
    }
  }

  if (options.full_assignment != nullptr) {
    const double b = static_cast<double>(batch.size());
    const double n = static_cast<double>(data.n());
    report.lambda_hats.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
      report.lambda_hats[j] =
          counts[j] == 0
              ? kNaN
              : b * static_cast<double>(options.full_assignment->sizes[j]) /
                    (n * static_cast<double>(counts[j]));
    }
  }
  report.batch = batch;
  return {Centers(std::move(out)), std::move(report)};
}

StepResult minibatch_step(const DataSet& data, const Centers& centers0, std::size_t b, Seed seed,
                          const MinibatchOptions& options) {
  return minibatch_step(data, centers0,
                        sample_indices(data.n(), b, SamplingScheme::uniform, data, seed), options);
}

DampedSpec DampedSpec::constant(std::size_t k, double alpha) {
  DampedSpec spec{std::vector<double>(k, alpha)};
  spec.validate(k);
  return spec;
}

void DampedSpec::validate(std::size_t k) const {
  if (alphas.size() != k) {
    throw ParameterError("DampedSpec: expected " + std::to_string(k) + " damping coefficients, got " +
                         std::to_string(alphas.size()));
  }
  for (const auto a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw ParameterError("DampedSpec: coefficients must lie in [0, 1]");
  }
}

double DampedSpec::min() const { return *std::min_element(alphas.begin(), alphas.end()); }
double DampedSpec::max() const { return *std::max_element(alphas.begin(), alphas.end()); }

StepResult damped_minibatch_step(const DataSet& data, const Centers& centers0, const Batch& batch,
                                 const DampedSpec& damping, const MinibatchOptions& options) {
  damping.validate(centers0.k());
  auto step = minibatch_step(data, centers0, batch, options);
  Matrix out = step.centers.matrix();
  for (std::size_t j = 0; j < centers0.k(); ++j) {
    const auto row = static_cast<Eigen::Index>(j);
    const double a = damping.alphas[j];
    out.row(row) = (1.0 - a) * centers0.matrix().row(row) + a * out.row(row);
  }
  return {Centers(std::move(out)), std::move(step.report)};
}

StepResult damped_minibatch_step(const DataSet& data, const Centers& centers0, std::size_t b,
                                 const DampedSpec& damping, Seed seed,
                                 const MinibatchOptions& options) {
  return damped_minibatch_step(data, centers0,
                               sample_indices(data.n(), b, SamplingScheme::uniform, data, seed),
                               damping, options);
}

StepResult dlt_step(const DataSet& data, const Centers& centers0, const Batch& size_batch,
                    const Batch& weighted_batch, const IndexSampler& weighted_sampler) {
  require_same_dim(data, centers0, "dlt_step");
  check_batch(size_batch, data.n(), "dlt_step");
  check_batch(weighted_batch, data.n(), "dlt_step");
  if (weighted_sampler.n() != data.n()) throw DimensionError("dlt_step: sampler size != n");
  const auto k = centers0.k();
  const auto d = static_cast<Eigen::Index>(data.d());

  std::vector<std::size_t> size_counts(k, 0);
  for (const auto s : size_batch.indices) ++size_counts[nearest_center(centers0, data.point(s))];

  std::vector<std::vector<long double>> sums(k, std::vector<long double>(static_cast<std::size_t>(d), 0.0L));
  std::vector<std::size_t> hit_counts(k, 0);
  for (const auto s : weighted_batch.indices) {
    const auto point = data.point(s);
    const auto j = nearest_center(centers0, point);
    ++hit_counts[j];
    const long double inv_p = 1.0L / static_cast<long double>(weighted_sampler.probability(s));
    for (Eigen::Index c = 0; c < d; ++c) sums[j][static_cast<std::size_t>(c)] += point(c) * inv_p;
  }

  const auto a = static_cast<long double>(size_batch.size());
  const auto b = static_cast<long double>(weighted_batch.size());
  const auto n = static_cast<long double>(data.n());
  Matrix out = centers0.matrix();
  StepReport report;
  for (std::size_t j = 0; j < k; ++j) {
    if (size_counts[j] == 0 || hit_counts[j] == 0) {
      report.empty_clusters.push_back(j);
      continue;
    }
    const long double scale = a / (n * static_cast<long double>(size_counts[j]) * b);
    for (Eigen::Index c = 0; c < d; ++c) {
      out(static_cast<Eigen::Index>(j), c) = static_cast<double>(scale * sums[j][static_cast<std::size_t>(c)]);
    }
  }
  report.batch = weighted_batch;
  report.size_batch = size_batch;
  return {Centers(std::move(out)), std::move(report)};
}

StepResult dlt_step(const DataSet& data, const Centers& centers0, std::size_t a, std::size_t b,
                    const IndexSampler& weighted_sampler, Seed seed) {
  if (a == 0 || b == 0) throw ParameterError("dlt_step: a and b must be >= 1");
  Rng rng(seed);
  auto size_batch = IndexSampler::uniform(data.n()).draw(a, rng);
  auto weighted_batch = weighted_sampler.draw(b, rng);
  return dlt_step(data, centers0, size_batch, weighted_batch, weighted_sampler);
}

StepResult dlt_step(const DataSet& data, const Centers& centers0, std::size_t a, std::size_t b,
                    SamplingScheme scheme, Seed seed) {
  if (scheme == SamplingScheme::uniform) {
    throw ParameterError("dlt_step: scheme must be row_norm or row_norm_squared");
  }
  return dlt_step(data, centers0, a, b, IndexSampler(data, scheme), seed);
}

Vector importance_estimator(const Eigen::MatrixXd& a, const Vector& x, std::span<const double> probs,
                            const Batch& batch) {
  const auto n = static_cast<std::size_t>(a.cols());
  if (static_cast<std::size_t>(x.size()) != n || probs.size() != n) {
    throw DimensionError("importance_estimator: A, x and probs disagree on n");
  }
  long double total = 0.0L;
  for (const auto p : probs) {
    if (!(p >= 0.0)) throw ParameterError("importance_estimator: probabilities must be >= 0");
    total += p;
  }
  if (std::abs(static_cast<double>(total) - 1.0) > 1e-9) {
    throw ParameterError("importance_estimator: probabilities must sum to 1 within 1e-9");
  }
  check_batch(batch, n, "importance_estimator");
  Vector y = Vector::Zero(a.rows());
  for (const auto s : batch.indices) {
    if (x(static_cast<Eigen::Index>(s)) == 0.0) continue;
    if (probs[s] == 0.0) {
      throw ParameterError("importance_estimator: sampled index " + std::to_string(s) +
                           " has zero probability but nonzero weight");
    }
    y += a.col(static_cast<Eigen::Index>(s)) * (x(static_cast<Eigen::Index>(s)) / probs[s]);
  }
  return y / static_cast<double>(batch.size());
}

}  // namespace kmstep
