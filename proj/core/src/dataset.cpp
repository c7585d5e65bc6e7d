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

#include "kmstep/dataset.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/QR>

#include "kmstep/errors.hpp"

namespace kmstep {
namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

DataSet::DataSet(Matrix points) : points_(std::move(points)) {
  if (points_.rows() < 1 || points_.cols() < 1) {
    throw ParameterError("DataSet requires n >= 1 and d >= 1");
  }
  if (!all_finite(points_)) throw ParameterError("DataSet entries must be finite");
}

Centers::Centers(Matrix centers) : centers_(std::move(centers)) {
  if (centers_.rows() < 1 || centers_.cols() < 1) {
    throw ParameterError("Centers requires k >= 1 and d >= 1");
  }
  if (!all_finite(centers_)) throw ParameterError("Centers entries must be finite");
}

Vector Centers::flatten() const {
  return Eigen::Map<const Vector>(centers_.data(), centers_.size());
}

Centers Centers::unflatten(const Vector& flat, std::size_t k, std::size_t d) {
  if (static_cast<std::size_t>(flat.size()) != k * d) {
    throw DimensionError("Centers::unflatten: size " + std::to_string(flat.size()) +
                         " != k*d = " + std::to_string(k * d));
  }
  Matrix m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  std::copy(flat.data(), flat.data() + flat.size(), m.data());
  return Centers(std::move(m));
}

void require_same_dim(const DataSet& data, const Centers& centers, const char* op) {
  if (data.d() != centers.d()) {
    throw DimensionError(std::string(op) + ": data has d=" + std::to_string(data.d()) +
                         " but centers have d=" + std::to_string(centers.d()));
  }
}

void MixtureSpec::validate() const {
  if (means.empty()) throw ParameterError("MixtureSpec: need at least one mean");
  if (stds.size() != means.size()) {
    throw ParameterError("MixtureSpec: need one std per mean");
  }
  if (points_per_cluster == 0) throw ParameterError("MixtureSpec: points_per_cluster must be > 0");
  const auto d = means.front().size();
  if (d == 0) throw ParameterError("MixtureSpec: means must have d >= 1");
  for (std::size_t j = 0; j < means.size(); ++j) {
    if (means[j].size() != d) throw DimensionError("MixtureSpec: means differ in dimension");
    if (!(stds[j] > 0.0) || !std::isfinite(stds[j])) {
      throw ParameterError("MixtureSpec: std of component " + std::to_string(j) +
                           " must be finite and > 0");
    }
  }
}

std::pair<DataSet, Centers> generate_gaussian_mixture(const MixtureSpec& spec, Seed seed) {
  spec.validate();
  const auto k = spec.k();
  const auto d = static_cast<Eigen::Index>(spec.means.front().size());
  const auto m = spec.points_per_cluster;
  Matrix points(static_cast<Eigen::Index>(k * m), d);
  Matrix means(static_cast<Eigen::Index>(k), d);
  Rng rng(seed);
  for (std::size_t j = 0; j < k; ++j) {
    means.row(static_cast<Eigen::Index>(j)) = spec.means[j].transpose();
    for (std::size_t p = 0; p < m; ++p) {
      const auto row = static_cast<Eigen::Index>(j * m + p);
      for (Eigen::Index c = 0; c < d; ++c) {
        points(row, c) = spec.means[j](c) + spec.stds[j] * rng.normal();
      }
    }
  }
  return {DataSet(std::move(points)), Centers(std::move(means))};
}

void RigidTransform::validate() const {
  if (rotation.rows() != rotation.cols()) throw DimensionError("rotation must be square");
  if (shift.size() != rotation.rows()) throw DimensionError("shift length must equal rotation size");
  const Matrix gram = rotation.transpose() * rotation;
  const Matrix eye = Matrix::Identity(rotation.rows(), rotation.cols());
  if ((gram - eye).cwiseAbs().maxCoeff() > 1e-10) {
    throw ParameterError("rotation is not orthogonal within 1e-10");
  }
}

RigidTransform RigidTransform::identity(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return {Matrix::Identity(n, n), Vector::Zero(n)};
}

RigidTransform RigidTransform::rotation_2d(double radians) {
  Matrix r(2, 2);
  r << std::cos(radians), -std::sin(radians), std::sin(radians), std::cos(radians);
  return {r, Vector::Zero(2)};
}

RigidTransform RigidTransform::translation(const Vector& shift) {
  const auto n = shift.size();
  return {Matrix::Identity(n, n), shift};
}

RigidTransform random_rigid_transform(std::size_t d, double shift_scale, Seed seed) {
  if (d == 0) throw ParameterError("random_rigid_transform: d must be >= 1");
  const auto n = static_cast<Eigen::Index>(d);
  Rng rng(seed);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  Vector shift(n);
  for (Eigen::Index i = 0; i < n; ++i) shift(i) = shift_scale * rng.normal();
  RigidTransform t{Matrix(q), shift};
  t.validate();
  return t;
}

DataSet apply_rigid_transform(const DataSet& data, const RigidTransform& t) {
  t.validate();
  if (t.dim() != data.d()) {
    throw DimensionError("apply_rigid_transform: transform is " + std::to_string(t.dim()) +
                         "-dimensional, data has d=" + std::to_string(data.d()));
  }
  Matrix out = data.points() * t.rotation.transpose();
  out.rowwise() += t.shift.transpose();
  return DataSet(std::move(out));
}

Centers apply_rigid_transform(const Centers& centers, const RigidTransform& t) {
  t.validate();
  if (t.dim() != centers.d()) {
    throw DimensionError("apply_rigid_transform: transform is " + std::to_string(t.dim()) +
                         "-dimensional, centers have d=" + std::to_string(centers.d()));
  }
  Matrix out = centers.matrix() * t.rotation.transpose();
  out.rowwise() += t.shift.transpose();
  return Centers(std::move(out));
}

DataSet jl_project(const DataSet& data, std::size_t target_dim, Seed seed) {
  if (target_dim == 0) throw ParameterError("jl_project: target_dim must be >= 1");
  const auto d = static_cast<Eigen::Index>(data.d());
  const auto m = static_cast<Eigen::Index>(target_dim);
  Rng rng(seed);
  Matrix proj(d, m);
  const double scale = 1.0 / std::sqrt(static_cast<double>(target_dim));
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < m; ++j) proj(i, j) = scale * rng.normal();
  return DataSet(data.points() * proj);
}

std::pair<DataSet, Centers> hard_instance(std::size_t n, double alpha) {
  if (n == 0 || n % 2 != 0) {
    throw ParameterError("hard_instance: n must be even and positive, got " + std::to_string(n));
  }
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
    throw ParameterError("hard_instance: alpha must be finite and >= 1");
  }
  Matrix points(static_cast<Eigen::Index>(n), 1);
  const auto half = static_cast<Eigen::Index>(n / 2);
  points.topRows(half).setConstant(-1.0);
  points.bottomRows(half).setConstant(alpha);
  Matrix centers(2, 1);
  centers << 0.0, alpha;
  return {DataSet(std::move(points)), Centers(std::move(centers))};
}

PlanarPreset planar_mixture_preset(double std, std::size_t points_per_cluster, Seed seed,
                                   double init_offset) {
  MixtureSpec spec;
  spec.means = {Vector::Zero(2), Vector::Zero(2), Vector::Zero(2), Vector::Zero(2)};
  spec.means[1] << 4.0, 0.0;
  spec.means[2] << 0.0, 4.0;
  spec.means[3] << 4.0, 4.0;
  spec.stds.assign(4, std);
  spec.points_per_cluster = points_per_cluster;
  auto [data, means] = generate_gaussian_mixture(spec, seed);

  // Offsets point in four different directions so no two clusters move alike.
  Matrix init = means.matrix();
  for (Eigen::Index j = 0; j < 4; ++j) {
    const double angle = 0.25 * std::numbers::pi + 0.5 * std::numbers::pi * static_cast<double>(j) + 0.1;
    init(j, 0) += init_offset * std::cos(angle);
    init(j, 1) += init_offset * std::sin(angle);
  }
  return {std::move(data), std::move(means), Centers(std::move(init))};
}

DataSet digits_like_preset(Seed seed, std::size_t ambient_dim, std::size_t points_per_cluster) {
  constexpr std::size_t kClusters = 10;
  constexpr std::size_t kProjected = 30;
  MixtureSpec spec;
  Rng rng(derive_seed(seed, 1));
  for (std::size_t j = 0; j < kClusters; ++j) {
    Vector mean(static_cast<Eigen::Index>(ambient_dim));
    for (auto& x : mean) x = 3.0 * rng.normal();
    spec.means.push_back(std::move(mean));
    spec.stds.push_back(1.0 + 0.1 * static_cast<double>(j));
  }
  spec.points_per_cluster = points_per_cluster;
  auto raw = generate_gaussian_mixture(spec, derive_seed(seed, 2)).first;
  return jl_project(raw, kProjected, derive_seed(seed, 3));
}

}  // namespace kmstep
