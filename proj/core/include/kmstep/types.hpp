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

#ifndef KMSTEP_TYPES_HPP_
#define KMSTEP_TYPES_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace kmstep {

// Row-major so that a point (or a center) is a contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// n points in R^d stored as the rows of an n x d matrix.
//
// Invariants: n >= 1, d >= 1, every entry finite. Checked on construction.
class DataSet {
 public:
  explicit DataSet(Matrix points);

  std::size_t n() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  std::size_t d() const noexcept { return static_cast<std::size_t>(points_.cols()); }

  const Matrix& points() const noexcept { return points_; }
  auto point(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)); }

  friend bool operator==(const DataSet& a, const DataSet& b) {
    return a.points_.rows() == b.points_.rows() && a.points_.cols() == b.points_.cols() &&
           a.points_ == b.points_;
  }

 private:
  Matrix points_;
};

// An ordered list of k centers in R^d, stored as the rows of a k x d matrix.
class Centers {
 public:
  explicit Centers(Matrix centers);

  std::size_t k() const noexcept { return static_cast<std::size_t>(centers_.rows()); }
  std::size_t d() const noexcept { return static_cast<std::size_t>(centers_.cols()); }

  const Matrix& matrix() const noexcept { return centers_; }
  auto center(std::size_t j) const { return centers_.row(static_cast<Eigen::Index>(j)); }
  auto center(std::size_t j) { return centers_.row(static_cast<Eigen::Index>(j)); }

  // Concatenation c_1 | c_2 | ... | c_k as a single vector in R^{kd}.
  Vector flatten() const;
  static Centers unflatten(const Vector& flat, std::size_t k, std::size_t d);

  friend bool operator==(const Centers& a, const Centers& b) {
    return a.centers_.rows() == b.centers_.rows() && a.centers_.cols() == b.centers_.cols() &&
           a.centers_ == b.centers_;
  }

 private:
  Matrix centers_;
};

// Throws DimensionError unless data and centers live in the same R^d.
void require_same_dim(const DataSet& data, const Centers& centers, const char* op);

}  // namespace kmstep

#endif  // KMSTEP_TYPES_HPP_
