// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "fermat/error.hpp"

namespace fermat {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

/// Columns are the in-surface direction vectors, in scene units per parameter unit.
template <typename Scalar>
using BasisMatrix = Eigen::Matrix<Scalar, 3, 2>;

/// One row per interaction. Row-major, so the flat view `t_1, t_2, ...` is
/// the coordinate ordering used by Hessians and linear solves.
template <typename Scalar>
using ParamVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 2, Eigen::RowMajor>;

template <typename Scalar>
using FlatVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Vec3d = Vec3<double>;

enum class SurfaceKind { Plane, Edge };

inline constexpr double kPlaneDegeneracy = 1e-9;
inline constexpr double kMinColumnNorm = 1e-12;
inline constexpr double kMinEndpointSeparation = 1e-9;
inline constexpr std::size_t kDefaultMaxInteractions = 32;

/// A planar reflector or a straight edge, stored as `x = basis * t + anchor`.
///
/// Edges keep a 3x2 basis whose second column is exactly zero, so every
/// interaction has two parametric coordinates and the second one of an edge
/// never moves the point.
template <typename Scalar>
class BasicSurface {
 public:
  using Basis = BasisMatrix<Scalar>;
  using Point = Vec3<Scalar>;

  /// Validates the invariants of `kind` and throws DegenerateBasis on failure.
  static BasicSurface from_parts(SurfaceKind kind, const Basis& basis, const Point& anchor);

  SurfaceKind kind() const noexcept { return kind_; }
  const Basis& basis() const noexcept { return basis_; }
  const Point& anchor() const noexcept { return anchor_; }

  Point point_at(const Eigen::Matrix<Scalar, 1, 2>& t) const {
    return basis_ * t.transpose() + anchor_;
  }

  /// Least-squares parameters of the point of the affine span closest to `p`.
  /// Inert coordinates come back as zero.
  Eigen::Matrix<Scalar, 1, 2> project(const Point& p) const;

  template <typename Other>
  BasicSurface<Other> cast() const {
    return BasicSurface<Other>(kind_, basis_.template cast<Other>(), anchor_.template cast<Other>());
  }

 private:
  template <typename>
  friend class BasicSurface;

  BasicSurface(SurfaceKind kind, const Basis& basis, const Point& anchor)
      : basis_(basis), anchor_(anchor), kind_(kind) {}

  Basis basis_;
  Point anchor_;
  SurfaceKind kind_;
};

/// Start point, end point, and the ordered surfaces a candidate path visits.
template <typename Scalar>
class BasicPathSpec {
 public:
  using Point = Vec3<Scalar>;
  using SurfaceType = BasicSurface<Scalar>;

  BasicPathSpec(const Point& start, const Point& end, std::vector<SurfaceType> surfaces,
                std::size_t max_interactions = kDefaultMaxInteractions);

  const Point& start() const noexcept { return start_; }
  const Point& end() const noexcept { return end_; }
  const std::vector<SurfaceType>& surfaces() const noexcept { return surfaces_; }
  const SurfaceType& surface(std::size_t i) const { return surfaces_[i]; }
  std::size_t size() const noexcept { return surfaces_.size(); }

  /// Distance between the endpoints.
  Scalar scale() const { return (end_ - start_).norm(); }

  template <typename Other>
  BasicPathSpec<Other> cast() const {
    std::vector<BasicSurface<Other>> surfaces;
    surfaces.reserve(surfaces_.size());
    for (const auto& s : surfaces_) surfaces.push_back(s.template cast<Other>());
    return BasicPathSpec<Other>(start_.template cast<Other>(), end_.template cast<Other>(),
                                std::move(surfaces),
                                typename BasicPathSpec<Other>::unchecked_tag{});
  }

 private:
  template <typename>
  friend class BasicPathSpec;
  struct unchecked_tag {};

  BasicPathSpec(const Point& start, const Point& end, std::vector<SurfaceType> surfaces,
                unchecked_tag)
      : start_(start), end_(end), surfaces_(std::move(surfaces)) {}

  Point start_;
  Point end_;
  std::vector<SurfaceType> surfaces_;
};

using Surface = BasicSurface<double>;
using PathSpec = BasicPathSpec<double>;

template <typename Scalar>
BasicSurface<Scalar> make_plane(const Vec3<Scalar>& anchor, const Vec3<Scalar>& u,
                                const Vec3<Scalar>& v);

template <typename Scalar>
BasicSurface<Scalar> make_edge(const Vec3<Scalar>& anchor, const Vec3<Scalar>& direction);

inline Surface make_plane(const Vec3d& anchor, const Vec3d& u, const Vec3d& v) {
  return make_plane<double>(anchor, u, v);
}
inline Surface make_edge(const Vec3d& anchor, const Vec3d& direction) {
  return make_edge<double>(anchor, direction);
}

/// Throws ShapeMismatch unless `T` has one row per surface.
template <typename Scalar>
void check_shape(const BasicPathSpec<Scalar>& spec, const ParamVector<Scalar>& T);

/// Returns `[start, A_1 t_1 + b_1, ..., A_n t_n + b_n, end]`.
template <typename Scalar>
std::vector<Vec3<Scalar>> embed(const BasicPathSpec<Scalar>& spec, const ParamVector<Scalar>& T);

/// Interaction points only (rows 1..n of embed) as an n x 3 list.
template <typename Scalar>
std::vector<Vec3<Scalar>> interaction_points(const BasicPathSpec<Scalar>& spec,
                                             const ParamVector<Scalar>& T);

/// Flat mask over the 2n coordinates; false where the basis column is zero.
template <typename Scalar>
std::vector<bool> active_mask(const BasicPathSpec<Scalar>& spec);

/// Per-surface projection of `points` into parameter space.
template <typename Scalar>
ParamVector<Scalar> params_of(const BasicPathSpec<Scalar>& spec,
                              const std::vector<Vec3<Scalar>>& points);

template <typename Scalar>
inline Eigen::Map<FlatVector<Scalar>> flat(ParamVector<Scalar>& T) {
  return {T.data(), T.size()};
}
template <typename Scalar>
inline Eigen::Map<const FlatVector<Scalar>> flat(const ParamVector<Scalar>& T) {
  return {T.data(), T.size()};
}

/// Mean Euclidean distance between corresponding points.
double mean_point_distance(const std::vector<Vec3d>& a, const std::vector<Vec3d>& b);

template <typename Scalar>
std::vector<Vec3d> to_double(const std::vector<Vec3<Scalar>>& points) {
  std::vector<Vec3d> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.template cast<double>());
  return out;
}

}  // namespace fermat
