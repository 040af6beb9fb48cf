// SPDX-License-Identifier: Apache-2.0
#include "fermat/geometry.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace fermat {

namespace {

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace

template <typename Scalar>
BasicSurface<Scalar> BasicSurface<Scalar>::from_parts(SurfaceKind kind, const Basis& basis,
                                                      const Point& anchor) {
  if (!all_finite(basis) || !all_finite(anchor)) {
    throw Error(ErrorCode::InvalidArgument, "surface entries must be finite");
  }
  const double u_norm = static_cast<double>(basis.col(0).norm());
  const double v_norm = static_cast<double>(basis.col(1).norm());
  if (u_norm <= kMinColumnNorm) {
    throw Error(ErrorCode::DegenerateBasis, "first basis column is (near) zero");
  }
  if (kind == SurfaceKind::Plane) {
    if (v_norm <= kMinColumnNorm) {
      throw Error(ErrorCode::DegenerateBasis, "second basis column of a plane is (near) zero");
    }
    const Vec3<double> u = basis.col(0).template cast<double>();
    const Vec3<double> v = basis.col(1).template cast<double>();
    if (u.cross(v).norm() <= kPlaneDegeneracy * u_norm * v_norm) {
      throw Error(ErrorCode::DegenerateBasis, "plane basis columns are parallel");
    }
  } else if (!(basis.col(1).array() == Scalar(0)).all()) {
    throw Error(ErrorCode::DegenerateBasis, "edge basis must have an exactly zero second column");
  }
  return BasicSurface(kind, basis, anchor);
}

template <typename Scalar>
Eigen::Matrix<Scalar, 1, 2> BasicSurface<Scalar>::project(const Point& p) const {
  const Point r = p - anchor_;
  Eigen::Matrix<Scalar, 1, 2> t = Eigen::Matrix<Scalar, 1, 2>::Zero();
  if (kind_ == SurfaceKind::Edge) {
    const auto a = basis_.col(0);
    t(0) = a.dot(r) / a.squaredNorm();
  } else {
    const Eigen::Matrix<Scalar, 2, 2> gram = basis_.transpose() * basis_;
    t = gram.ldlt().solve(basis_.transpose() * r).transpose();
  }
  return t;
}

template <typename Scalar>
BasicPathSpec<Scalar>::BasicPathSpec(const Point& start, const Point& end,
                                     std::vector<SurfaceType> surfaces,
                                     std::size_t max_interactions)
    : start_(start), end_(end), surfaces_(std::move(surfaces)) {
  if (!start_.allFinite() || !end_.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "endpoints must be finite");
  }
  if (static_cast<double>((end_ - start_).norm()) <= kMinEndpointSeparation) {
    throw Error(ErrorCode::InvalidArgument, "start and end coincide");
  }
  if (surfaces_.size() > max_interactions) {
    throw Error(ErrorCode::InvalidArgument,
                "path has " + std::to_string(surfaces_.size()) + " interactions, limit is " +
                    std::to_string(max_interactions));
  }
}

template <typename Scalar>
BasicSurface<Scalar> make_plane(const Vec3<Scalar>& anchor, const Vec3<Scalar>& u,
                                const Vec3<Scalar>& v) {
  BasisMatrix<Scalar> basis;
  basis << u, v;
  return BasicSurface<Scalar>::from_parts(SurfaceKind::Plane, basis, anchor);
}

template <typename Scalar>
BasicSurface<Scalar> make_edge(const Vec3<Scalar>& anchor, const Vec3<Scalar>& direction) {
  BasisMatrix<Scalar> basis;
  basis << direction, Vec3<Scalar>::Zero();
  return BasicSurface<Scalar>::from_parts(SurfaceKind::Edge, basis, anchor);
}

template <typename Scalar>
void check_shape(const BasicPathSpec<Scalar>& spec, const ParamVector<Scalar>& T) {
  if (static_cast<std::size_t>(T.rows()) != spec.size()) {
    throw Error(ErrorCode::ShapeMismatch, "parameter rows (" + std::to_string(T.rows()) +
                                              ") do not match interactions (" +
                                              std::to_string(spec.size()) + ")");
  }
}

template <typename Scalar>
std::vector<Vec3<Scalar>> embed(const BasicPathSpec<Scalar>& spec, const ParamVector<Scalar>& T) {
  check_shape(spec, T);
  std::vector<Vec3<Scalar>> points;
  points.reserve(spec.size() + 2);
  points.push_back(spec.start());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    points.push_back(spec.surface(i).point_at(T.row(static_cast<Eigen::Index>(i))));
  }
  points.push_back(spec.end());
  return points;
}

template <typename Scalar>
std::vector<Vec3<Scalar>> interaction_points(const BasicPathSpec<Scalar>& spec,
                                             const ParamVector<Scalar>& T) {
  auto points = embed(spec, T);
  points.pop_back();
  points.erase(points.begin());
  return points;
}

template <typename Scalar>
std::vector<bool> active_mask(const BasicPathSpec<Scalar>& spec) {
  std::vector<bool> mask(2 * spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    for (int j = 0; j < 2; ++j) {
      mask[2 * i + j] = !(spec.surface(i).basis().col(j).array() == Scalar(0)).all();
    }
  }
  return mask;
}

template <typename Scalar>
ParamVector<Scalar> params_of(const BasicPathSpec<Scalar>& spec,
                              const std::vector<Vec3<Scalar>>& points) {
  if (points.size() != spec.size()) {
    throw Error(ErrorCode::ShapeMismatch, "one point per interaction expected");
  }
  ParamVector<Scalar> T(static_cast<Eigen::Index>(spec.size()), 2);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    T.row(static_cast<Eigen::Index>(i)) = spec.surface(i).project(points[i]);
  }
  return T;
}

double mean_point_distance(const std::vector<Vec3d>& a, const std::vector<Vec3d>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::ShapeMismatch, "point lists differ in length");
  if (a.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += (a[i] - b[i]).norm();
  return total / static_cast<double>(a.size());
}

#define FERMAT_INSTANTIATE(S)                                                                   \
  template class BasicSurface<S>;                                                               \
  template class BasicPathSpec<S>;                                                              \
  template BasicSurface<S> make_plane<S>(const Vec3<S>&, const Vec3<S>&, const Vec3<S>&);       \
  template BasicSurface<S> make_edge<S>(const Vec3<S>&, const Vec3<S>&);                        \
  template void check_shape<S>(const BasicPathSpec<S>&, const ParamVector<S>&);                 \
  template std::vector<Vec3<S>> embed<S>(const BasicPathSpec<S>&, const ParamVector<S>&);       \
  template std::vector<Vec3<S>> interaction_points<S>(const BasicPathSpec<S>&,                  \
                                                      const ParamVector<S>&);                   \
  template std::vector<bool> active_mask<S>(const BasicPathSpec<S>&);                           \
  template ParamVector<S> params_of<S>(const BasicPathSpec<S>&, const std::vector<Vec3<S>>&);

FERMAT_INSTANTIATE(float)
FERMAT_INSTANTIATE(double)

#undef FERMAT_INSTANTIATE

}  // namespace fermat
