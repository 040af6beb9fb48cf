// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fermat/geometry.hpp"

namespace fermat {

/// Same layout as ParamVector: row i holds dL/dt_i.
template <typename Scalar>
using GradVector = ParamVector<Scalar>;

/// 2n x 2n, coordinates of t_1 first. Block tridiagonal and symmetric.
template <typename Scalar>
using HessMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Derivatives with respect to every scene parameter: each surface basis and
/// anchor, then the two endpoints.
template <typename Scalar>
struct SceneGradient {
  std::vector<BasisMatrix<Scalar>> basis;
  std::vector<Vec3<Scalar>> anchor;
  Vec3<Scalar> start = Vec3<Scalar>::Zero();
  Vec3<Scalar> end = Vec3<Scalar>::Zero();

  static SceneGradient zeros(std::size_t n);

  std::size_t size() const noexcept { return anchor.size(); }

  /// Flat layout: per surface 6 basis entries (column-major) then 3 anchor
  /// entries; start and end last. Length 9n + 6.
  FlatVector<Scalar> flatten() const;
  static SceneGradient unflatten(std::size_t n, const FlatVector<Scalar>& flat);

  SceneGradient& operator+=(const SceneGradient& other);
};

template <typename Scalar>
SceneGradient<Scalar> operator+(SceneGradient<Scalar> a, const SceneGradient<Scalar>& b) {
  a += b;
  return a;
}

/// Segments shorter than this make the unit directions undefined.
template <typename Scalar>
Scalar segment_epsilon(const BasicPathSpec<Scalar>& spec) {
  return Scalar(1e-12) * (Scalar(1) + spec.scale());
}

template <typename Scalar>
Scalar path_length(const BasicPathSpec<Scalar>& spec, const ParamVector<Scalar>& T);

template <typename Scalar>
GradVector<Scalar> gradient(const BasicPathSpec<Scalar>& spec, const ParamVector<Scalar>& T);

template <typename Scalar>
HessMatrix<Scalar> hessian(const BasicPathSpec<Scalar>& spec, const ParamVector<Scalar>& T);

/// u^T d(grad_T L)/d(theta), theta = every basis, anchor and both endpoints.
template <typename Scalar>
SceneGradient<Scalar> param_vjp(const BasicPathSpec<Scalar>& spec, const ParamVector<Scalar>& T,
                                const GradVector<Scalar>& u);

/// Partial derivative of the path length with respect to theta at fixed T.
template <typename Scalar>
SceneGradient<Scalar> length_param_gradient(const BasicPathSpec<Scalar>& spec,
                                            const ParamVector<Scalar>& T);

namespace detail {

/// Embedded points plus per-segment vectors, lengths and unit directions.
/// Construction throws DegenerateSegment when a segment collapses.
template <typename Scalar>
struct PathSegments {
  std::vector<Vec3<Scalar>> points;     // n + 2
  std::vector<Vec3<Scalar>> direction;  // n + 1, unit
  std::vector<Scalar> length;           // n + 1

  PathSegments(const BasicPathSpec<Scalar>& spec, const ParamVector<Scalar>& T);

  /// dL/dx_{i+1} for surface i, i.e. the difference of adjacent unit directions.
  Vec3<Scalar> point_gradient(std::size_t i) const { return direction[i] - direction[i + 1]; }

  /// (I - u u^T) / |s| for segment j.
  Eigen::Matrix<Scalar, 3, 3> curvature(std::size_t j) const;
};

}  // namespace detail

}  // namespace fermat
