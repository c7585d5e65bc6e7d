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

#ifndef KMSTEP_KMEANS_HPP_
#define KMSTEP_KMEANS_HPP_

#include <cstddef>
#include <vector>

#include "kmstep/rng.hpp"
#include "kmstep/types.hpp"

namespace kmstep {

// Partition of [0, n) induced by a set of centers. Cluster indices are 0-based.
struct Assignment {
  std::vector<std::size_t> labels;                // n entries in [0, k)
  std::vector<std::vector<std::size_t>> members;  // k ascending index lists
  std::vector<std::size_t> sizes;                 // k entries, sum n

  std::size_t n() const noexcept { return labels.size(); }
  std::size_t k() const noexcept { return sizes.size(); }

  // Builds membership lists and sizes from labels.
  static Assignment from_labels(std::vector<std::size_t> labels, std::size_t k);
};

// Index of the nearest center; ties go to the lowest index.
template <typename Row>
std::size_t nearest_center(const Centers& centers, const Row& point) {
  std::size_t best = 0;
  double best_dist = (centers.center(0) - point).squaredNorm();
  for (std::size_t j = 1; j < centers.k(); ++j) {
    const double dist = (centers.center(j) - point).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = j;
    }
  }
  return best;
}

Assignment assign(const DataSet& data, const Centers& centers);

struct LloydResult {
  Centers centers;
  Assignment assignment;
  std::vector<std::size_t> empty_clusters;  // kept their initial center
};

// One exact k-means iteration.
LloydResult lloyd_step(const DataSet& data, const Centers& centers0);

// Cluster means of an existing partition; empty clusters copy `fallback`.
Centers cluster_means(const DataSet& data, const Assignment& assignment, const Centers& fallback);

// (1/n) sum_i min_j ||v_i - c_j||^2
double cost(const DataSet& data, const Centers& centers);

// (1/n) sum_j sum_{i in part_j} ||v_i - c_j||^2 for a fixed partition.
double partition_cost(const DataSet& data, const Assignment& partition, const Centers& centers);

// Data-dependent quantities of a (data, initial centers) pair.
struct Diagnostics {
  double phi = 0.0;                      // mean squared distance to induced-cluster means
  std::vector<double> phi_j;             // per-cluster share of phi
  double k_C = 0.0;                      // n / smallest induced cluster size
  double eta = 0.0;                      // max_i ||v_i||^2
  double eta_bar = 0.0;                  // mean_i ||v_i||^2
  double eta_hat = 0.0;                  // (mean_i ||v_i||)^2 + ||V||_2^2 / n
  double cost = 0.0;                     // cost of the initial centers
  std::vector<double> per_cluster_cost;  // per-cluster share of cost
  std::vector<std::size_t> cluster_sizes;

  std::size_t k() const noexcept { return phi_j.size(); }
};

// Throws DiagnosticError naming the cluster when an induced cluster is empty,
// and std::logic_error if phi <= eta_bar <= eta or eta_hat <= 2 eta_bar <=
// 2 d eta_hat fails beyond rounding.
Diagnostics diagnostics(const DataSet& data, const Centers& centers0);

// Largest singular value of `m` by power iteration on m^T m.
double spectral_norm(const Matrix& m, double rel_tol = 1e-8, int max_iter = 1000);

struct CenterError {
  double max_err = 0.0;       // max_j ||c_j - c'_j||
  double weighted_err = 0.0;  // (1/n) sum_j sizes_j ||c_j - c'_j||^2
};

CenterError center_error(const Centers& reference, const Centers& approx,
                         const std::vector<std::size_t>& sizes, std::size_t n);

// Basic k-means++ (D^2) seeding. Convenience only; no approximation guarantee
// is claimed for the seeds it returns.
Centers kmeanspp_seed(const DataSet& data, std::size_t k, Seed seed);

}  // namespace kmstep

#endif  // KMSTEP_KMEANS_HPP_
