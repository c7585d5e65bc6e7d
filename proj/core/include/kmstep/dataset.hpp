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

#ifndef KMSTEP_DATASET_HPP_
#define KMSTEP_DATASET_HPP_

#include <cstddef>
#include <utility>
#include <vector>

#include "kmstep/rng.hpp"
#include "kmstep/types.hpp"

namespace kmstep {

// Isotropic Gaussian mixture with a fixed number of points per component.
struct MixtureSpec {
  std::vector<Vector> means;     // k means, all of the same dimension
  std::vector<double> stds;      // per-component standard deviation, > 0
  std::size_t points_per_cluster = 0;

  std::size_t k() const noexcept { return means.size(); }
  void validate() const;
};

// Points are emitted component by component: rows [j*m, (j+1)*m) come from
// component j. Returns the data and the true means as Centers.
std::pair<DataSet, Centers> generate_gaussian_mixture(const MixtureSpec& spec, Seed seed);

// x -> rotation * x + shift, with rotation orthogonal.
struct RigidTransform {
  Matrix rotation;
  Vector shift;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(rotation.rows()); }
  void validate() const;  // throws ParameterError unless R^T R = I within 1e-10

  static RigidTransform identity(std::size_t d);
  static RigidTransform rotation_2d(double radians);
  static RigidTransform translation(const Vector& shift);
};

// Haar-like random rotation (QR of a Gaussian matrix, diagonal of R made
// positive) and a Gaussian shift scaled by `shift_scale`.
RigidTransform random_rigid_transform(std::size_t d, double shift_scale, Seed seed);

DataSet apply_rigid_transform(const DataSet& data, const RigidTransform& t);
Centers apply_rigid_transform(const Centers& centers, const RigidTransform& t);

// Gaussian Johnson-Lindenstrauss map: data * P with P a d x target_dim matrix
// of iid N(0, 1) entries scaled by 1/sqrt(target_dim).
DataSet jl_project(const DataSet& data, std::size_t target_dim, Seed seed);

// One-dimensional two-cluster instance: n/2 points at -1, n/2 at alpha, with
// initial centers (0, alpha). Requires even n >= 2 and alpha >= 1.
std::pair<DataSet, Centers> hard_instance(std::size_t n, double alpha);

// Four well separated planar components of equal size. The initial centers
// are the true means moved by a fixed offset of length `init_offset`, so that
// one exact step moves every center but no induced cluster is empty.
struct PlanarPreset {
  DataSet data;
  Centers true_means;
  Centers initial_centers;
};
PlanarPreset planar_mixture_preset(double std, std::size_t points_per_cluster, Seed seed,
                                   double init_offset = 0.3);

// Stand-in for a digit corpus at the same scale: k=10 components in
// `ambient_dim` dimensions, 7000 points each, then JL-projected to 30.
DataSet digits_like_preset(Seed seed, std::size_t ambient_dim = 64,
                           std::size_t points_per_cluster = 7000);

}  // namespace kmstep

#endif  // KMSTEP_DATASET_HPP_
