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

#ifndef KMSTEP_TESTS_SUPPORT_ORACLES_HPP_
#define KMSTEP_TESTS_SUPPORT_ORACLES_HPP_

// Independent reference computations for tests. Nothing here calls the
// library routine it is used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "kmstep/rng.hpp"
#include "kmstep/types.hpp"

namespace kmstep::testing {

struct Instance {
  DataSet data;
  Centers centers;
};

// n points with Gaussian coordinates around k random anchors; the initial
// centers are k distinct data points, so no induced cluster is empty.
inline Instance random_instance(Rng& rng, std::size_t n, std::size_t d, std::size_t k, double spread = 3.0) {
  Matrix anchors(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < anchors.rows(); ++j) {
    for (Eigen::Index c = 0; c < anchors.cols(); ++c) anchors(j, c) = spread * rng.normal() + 1.5;
  }
  Matrix pts(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const auto j = static_cast<Eigen::Index>(rng.index(k));
    for (Eigen::Index c = 0; c < pts.cols(); ++c) pts(i, c) = anchors(j, c) + rng.normal();
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.index(n - i)]);
  Matrix c0(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < k; ++j) c0.row(static_cast<Eigen::Index>(j)) = pts.row(static_cast<Eigen::Index>(idx[j]));
  return {DataSet(pts), Centers(c0)};
}

inline double sq_dist(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
  double s = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    const double diff = a(i, c) - b(j, c);
    s += diff * diff;
  }
  return s;
}

inline std::vector<std::size_t> brute_labels(const DataSet& data, const Centers& centers) {
  std::vector<std::size_t> labels(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < centers.k(); ++j) {
      const double dist = sq_dist(data.points(), static_cast<Eigen::Index>(i), centers.matrix(),
                                  static_cast<Eigen::Index>(j));
      if (dist < best) {
        best = dist;
        labels[i] = j;
      }
    }
  }
  return labels;
}

// Per-cluster means of a labeling; clusters without members copy `fallback`.
inline Matrix brute_means(const DataSet& data, const std::vector<std::size_t>& labels, const Centers& fallback) {
  Matrix sums = Matrix::Zero(fallback.matrix().rows(), fallback.matrix().cols());
  std::vector<double> counts(fallback.k(), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    sums.row(static_cast<Eigen::Index>(labels[i])) += data.point(i);
    counts[labels[i]] += 1.0;
  }
  for (std::size_t j = 0; j < fallback.k(); ++j) {
    const auto r = static_cast<Eigen::Index>(j);
    sums.row(r) = counts[j] > 0 ? Eigen::RowVectorXd(sums.row(r) / counts[j]) : Eigen::RowVectorXd(fallback.center(j));
  }
  return sums;
}

// (1/n) sum_i ||v_i - m_{label_i}||^2
inline double brute_partition_cost(const DataSet& data, const std::vector<std::size_t>& labels, const Matrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    s += sq_dist(data.points(), static_cast<Eigen::Index>(i), m, static_cast<Eigen::Index>(labels[i]));
  }
  return s / static_cast<double>(labels.size());
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

// Binomial standard error of an empirical frequency at success probability p.
inline double binomial_se(double p, std::size_t trials) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

// Calls f(outcome) for every b-tuple over [0, n), in lexicographic order.
template <typename F>
void for_each_tuple(std::size_t n, std::size_t b, F&& f) {
  std::vector<std::size_t> t(b, 0);
  while (true) {
    f(t);
    std::size_t pos = b;
    while (pos > 0) {
      --pos;
      if (++t[pos] < n) break;
      t[pos] = 0;
      if (pos == 0) return;
    }
    if (b == 0) return;
  }
}

}  // namespace kmstep::testing

#endif  // KMSTEP_TESTS_SUPPORT_ORACLES_HPP_
