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

#include "kmstep/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "kmstep/errors.hpp"

namespace kmstep {
namespace {

// Squared distance accumulated in extended precision.
template <typename A, typename B>
long double sq_dist_ld(const A& a, const B& b) {
  long double s = 0.0L;
  for (Eigen::Index c = 0; c < a.size(); ++c) {
    const long double diff = static_cast<long double>(a(c)) - static_cast<long double>(b(c));
    s += diff * diff;
  }
  return s;
}

void require_nonempty_k(const Centers& centers, const char* op) {
  if (centers.k() < 1) throw ParameterError(std::string(op) + ": need k >= 1");
}

bool leq_tol(double lhs, double rhs, double rel) {
  return lhs <= rhs + rel * std::max({std::abs(lhs), std::abs(rhs), 1e-300});
}

}  // namespace

Assignment Assignment::from_labels(std::vector<std::size_t> labels, std::size_t k) {
  Assignment a;
  a.members.assign(k, {});
  a.sizes.assign(k, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= k) throw ParameterError("Assignment: label out of range");
    a.members[labels[i]].push_back(i);
    ++a.sizes[labels[i]];
  }
  a.labels = std::move(labels);
  return a;
}

Assignment assign(const DataSet& data, const Centers& centers) {
  require_same_dim(data, centers, "assign");
  require_nonempty_k(centers, "assign");
  std::vector<std::size_t> labels(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) labels[i] = nearest_center(centers, data.point(i));
  return Assignment::from_labels(std::move(labels), centers.k());
}

Centers cluster_means(const DataSet& data, const Assignment& assignment, const Centers& fallback) {
  require_same_dim(data, fallback, "cluster_means");
  if (assignment.k() != fallback.k() || assignment.n() != data.n()) {
    throw DimensionError("cluster_means: assignment shape does not match data/centers");
  }
  const auto d = static_cast<Eigen::Index>(data.d());
  Matrix out = fallback.matrix();
  std::vector<long double> sum(static_cast<std::size_t>(d));
  for (std::size_t j = 0; j < assignment.k(); ++j) {
    if (assignment.sizes[j] == 0) continue;
    std::fill(sum.begin(), sum.end(), 0.0L);
    for (const auto i : assignment.members[j]) {
      for (Eigen::Index c = 0; c < d; ++c) sum[static_cast<std::size_t>(c)] += data.points()(static_cast<Eigen::Index>(i), c);
    }
    const auto size = static_cast<long double>(assignment.sizes[j]);
    for (Eigen::Index c = 0; c < d; ++c) {
      out(static_cast<Eigen::Index>(j), c) = static_cast<double>(sum[static_cast<std::size_t>(c)] / size);
    }
  }
  return Centers(std::move(out));
}

LloydResult lloyd_step(const DataSet& data, const Centers& centers0) {
  auto assignment = assign(data, centers0);
  auto centers = cluster_means(data, assignment, centers0);
  std::vector<std::size_t> empty;
  for (std::size_t j = 0; j < assignment.k(); ++j) {
    if (assignment.sizes[j] == 0) empty.push_back(j);
  }
  return {std::move(centers), std::move(assignment), std::move(empty)};
}

double cost(const DataSet& data, const Centers& centers) {
  require_same_dim(data, centers, "cost");
  require_nonempty_k(centers, "cost");
  long double total = 0.0L;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto point = data.point(i);
    total += sq_dist_ld(point, centers.center(nearest_center(centers, point)));
  }
  return static_cast<double>(total / static_cast<long double>(data.n()));
}

double partition_cost(const DataSet& data, const Assignment& partition, const Centers& centers) {
  require_same_dim(data, centers, "partition_cost");
  if (partition.n() != data.n() || partition.k() != centers.k()) {
    throw DimensionError("partition_cost: partition shape does not match data/centers");
  }
  long double total = 0.0L;
  for (std::size_t i = 0; i < data.n(); ++i) {
    total += sq_dist_ld(data.point(i), centers.center(partition.labels[i]));
  }
  return static_cast<double>(total / static_cast<long double>(data.n()));
}

double spectral_norm(const Matrix& m, double rel_tol, int max_iter) {
  const Eigen::MatrixXd gram = m.transpose() * m;
  if (gram.size() == 0 || gram.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  Rng rng(0x5eedULL);
  Eigen::VectorXd x(gram.rows());
  for (auto& v : x) v = rng.normal();
  x.normalize();
  double lambda = x.dot(gram * x);
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd y = gram * x;
    const double norm = y.norm();
    if (norm == 0.0) break;
    x = y / norm;
    const double next = x.dot(gram * x);
    const bool converged = std::abs(next - lambda) <= rel_tol * std::abs(next);
    lambda = next;
    if (converged) break;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

Diagnostics diagnostics(const DataSet& data, const Centers& centers0) {
  const auto assignment = assign(data, centers0);
  for (std::size_t j = 0; j < assignment.k(); ++j) {
    if (assignment.sizes[j] == 0) {
      throw DiagnosticError("diagnostics: induced cluster " + std::to_string(j) +
                                " is empty (k_C undefined)",
                            j);
    }
  }
  const auto means = cluster_means(data, assignment, centers0);
  const auto n = data.n();
  const auto k = centers0.k();
  const long double inv_n = 1.0L / static_cast<long double>(n);

  Diagnostics diag;
  diag.phi_j.assign(k, 0.0);
  diag.per_cluster_cost.assign(k, 0.0);
  diag.cluster_sizes = assignment.sizes;
  long double phi = 0.0L;
  long double total_cost = 0.0L;
  for (std::size_t j = 0; j < k; ++j) {
    long double within = 0.0L;
    long double initial = 0.0L;
    for (const auto i : assignment.members[j]) {
      within += sq_dist_ld(data.point(i), means.center(j));
      initial += sq_dist_ld(data.point(i), centers0.center(j));
    }
    diag.phi_j[j] = static_cast<double>(within * inv_n);
    diag.per_cluster_cost[j] = static_cast<double>(initial * inv_n);
    phi += within;
    total_cost += initial;
  }
  diag.phi = static_cast<double>(phi * inv_n);
  diag.cost = static_cast<double>(total_cost * inv_n);
  const auto smallest = *std::min_element(assignment.sizes.begin(), assignment.sizes.end());
  diag.k_C = static_cast<double>(n) / static_cast<double>(smallest);

  long double sq_sum = 0.0L;
  long double norm_sum = 0.0L;
  long double sq_max = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    long double sq = 0.0L;
    const auto row = data.point(i);
    for (Eigen::Index c = 0; c < row.size(); ++c) {
      sq += static_cast<long double>(row(c)) * static_cast<long double>(row(c));
    }
    sq_sum += sq;
    norm_sum += std::sqrt(sq);
    sq_max = std::max(sq_max, sq);
  }
  diag.eta = static_cast<double>(sq_max);
  diag.eta_bar = static_cast<double>(sq_sum * inv_n);
  const double mean_norm = static_cast<double>(norm_sum * inv_n);
  const double op_norm = spectral_norm(data.points());
  diag.eta_hat = mean_norm * mean_norm + op_norm * op_norm / static_cast<double>(n);

  const double d = static_cast<double>(data.d());
  const bool ordered = leq_tol(diag.phi, diag.eta_bar, 1e-9) &&
                       leq_tol(diag.eta_bar, diag.eta, 1e-9) &&
                       leq_tol(diag.phi, diag.cost, 1e-9) &&
                       leq_tol(diag.eta_hat, 2.0 * diag.eta_bar, 1e-9) &&
                       leq_tol(2.0 * diag.eta_bar, 2.0 * d * diag.eta_hat, 1e-6);
  if (!ordered) {
    throw std::logic_error("diagnostics: parameter ordering violated (numerical breakdown)");
  }
  return diag;
}

CenterError center_error(const Centers& reference, const Centers& approx,
                         const std::vector<std::size_t>& sizes, std::size_t n) {
  if (reference.k() != approx.k() || reference.d() != approx.d()) {
    throw DimensionError("center_error: center sets differ in shape");
  }
  if (sizes.size() != reference.k()) throw DimensionError("center_error: need one size per center");
  if (n == 0) throw ParameterError("center_error: n must be positive");
  CenterError err;
  long double weighted = 0.0L;
  for (std::size_t j = 0; j < reference.k(); ++j) {
    const long double sq = sq_dist_ld(reference.center(j), approx.center(j));
    err.max_err = std::max(err.max_err, static_cast<double>(std::sqrt(sq)));
    weighted += static_cast<long double>(sizes[j]) * sq;
  }
  err.weighted_err = static_cast<double>(weighted / static_cast<long double>(n));
  return err;
}

Centers kmeanspp_seed(const DataSet& data, std::size_t k, Seed seed) {
  if (k == 0) throw ParameterError("kmeanspp_seed: k must be >= 1");
  if (k > data.n()) throw ParameterError("kmeanspp_seed: k exceeds the number of points");
  Rng rng(seed);
  const auto d = static_cast<Eigen::Index>(data.d());
  Matrix chosen(static_cast<Eigen::Index>(k), d);
  chosen.row(0) = data.point(rng.index(data.n()));
  std::vector<double> best(data.n(), std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c <= k; ++c) {
    const auto last = chosen.row(static_cast<Eigen::Index>(c - 1));
    long double total = 0.0L;
    for (std::size_t i = 0; i < data.n(); ++i) {
      best[i] = std::min(best[i], (data.point(i) - last).squaredNorm());
      total += best[i];
    }
    if (c == k) break;
    std::size_t pick = rng.index(data.n());
    if (total > 0.0L) {
      const long double target = static_cast<long double>(rng.uniform()) * total;
      long double running = 0.0L;
      for (std::size_t i = 0; i < data.n(); ++i) {
        running += best[i];
        if (best[i] > 0.0 && target < running) {
          pick = i;
          break;
        }
      }
    }
    chosen.row(static_cast<Eigen::Index>(c)) = data.point(pick);
  }
  return Centers(std::move(chosen));
}

}  // namespace kmstep
