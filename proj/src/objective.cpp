// SPDX-License-Identifier: Apache-2.0
#include "fermat/objective.hpp"

#include <string>

namespace fermat {

using Eigen::Index;

template <typename Scalar>
SceneGradient<Scalar> SceneGradient<Scalar>::zeros(std::size_t n) {
  SceneGradient g;
  g.basis.assign(n, BasisMatrix<Scalar>::Zero());
  g.anchor.assign(n, Vec3<Scalar>::Zero());
  return g;
}

template <typename Scalar>
FlatVector<Scalar> SceneGradient<Scalar>::flatten() const {
  const std::size_t n = size();
  FlatVector<Scalar> out(static_cast<Index>(9 * n + 6));
  for (std::size_t i = 0; i < n; ++i) {
    out.template segment<6>(static_cast<Index>(9 * i)) =
        Eigen::Map<const Eigen::Matrix<Scalar, 6, 1>>(basis[i].data());
    out.template segment<3>(static_cast<Index>(9 * i + 6)) = anchor[i];
  }
  out.template segment<3>(static_cast<Index>(9 * n)) = start;
  out.template segment<3>(static_cast<Index>(9 * n + 3)) = end;
  return out;
}

template <typename Scalar>
SceneGradient<Scalar> SceneGradient<Scalar>::unflatten(std::size_t n,
                                                       const FlatVector<Scalar>& flat) {
  if (flat.size() != static_cast<Index>(9 * n + 6)) {
    throw Error(ErrorCode::ShapeMismatch, "flat scene gradient has the wrong length");
  }
  SceneGradient g = zeros(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Map<Eigen::Matrix<Scalar, 6, 1>>(g.basis[i].data()) =
        flat.template segment<6>(static_cast<Index>(9 * i));
    g.anchor[i] = flat.template segment<3>(static_cast<Index>(9 * i + 6));
  }
  g.start = flat.template segment<3>(static_cast<Index>(9 * n));
  g.end = flat.template segment<3>(static_cast<Index>(9 * n + 3));
  return g;
}

template <typename Scalar>
SceneGradient<Scalar>& SceneGradient<Scalar>::operator+=(const SceneGradient& other) {
  if (other.size() != size()) throw Error(ErrorCode::ShapeMismatch, "scene gradient sizes differ");
  for (std::size_t i = 0; i < size(); ++i) {
    basis[i] += other.basis[i];
    anchor[i] += other.anchor[i];
  }
  start += other.start;
  end += other.end;
  return *this;
}

namespace detail {

template <typename Scalar>
PathSegments<Scalar>::PathSegments(const BasicPathSpec<Scalar>& spec,
                                   const ParamVector<Scalar>& T)
    : points(embed(spec, T)) {
  const std::size_t segments = points.size() - 1;
  direction.resize(segments);
  length.resize(segments);
  const Scalar eps = segment_epsilon(spec);
  for (std::size_t j = 0; j < segments; ++j) {
    const Vec3<Scalar> s = points[j + 1] - points[j];
    const Scalar norm = s.norm();
    if (!(norm > eps)) {
      throw Error(ErrorCode::DegenerateSegment,
                  "segment " + std::to_string(j) + " has length " + std::to_string(norm));
    }
    length[j] = norm;
    direction[j] = s / norm;
  }
}

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> PathSegments<Scalar>::curvature(std::size_t j) const {
  return (Eigen::Matrix<Scalar, 3, 3>::Identity() - direction[j] * direction[j].transpose()) /
         length[j];
}

}  // namespace detail

template <typename Scalar>
Scalar path_length(const BasicPathSpec<Scalar>& spec, const ParamVector<Scalar>& T) {
  const auto points = embed(spec, T);
  Scalar total = 0;
  for (std::size_t j = 0; j + 1 < points.size(); ++j) total += (points[j + 1] - points[j]).norm();
  return total;
}

template <typename Scalar>
GradVector<Scalar> gradient(const BasicPathSpec<Scalar>& spec, const ParamVector<Scalar>& T) {
  const detail::PathSegments<Scalar> seg(spec, T);
  GradVector<Scalar> g(T.rows(), 2);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    g.row(static_cast<Index>(i)) =
        (spec.surface(i).basis().transpose() * seg.point_gradient(i)).transpose();
  }
  return g;
}

template <typename Scalar>
HessMatrix<Scalar> hessian(const BasicPathSpec<Scalar>& spec, const ParamVector<Scalar>& T) {
  const detail::PathSegments<Scalar> seg(spec, T);
  const std::size_t n = spec.size();
  HessMatrix<Scalar> H = HessMatrix<Scalar>::Zero(static_cast<Index>(2 * n),
                                                  static_cast<Index>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& A = spec.surface(i).basis();
    const Eigen::Matrix<Scalar, 3, 3> after = seg.curvature(i + 1);
    Eigen::Matrix<Scalar, 2, 2> diag = A.transpose() * (seg.curvature(i) + after) * A;
    diag(1, 0) = diag(0, 1);
    const Index r = static_cast<Index>(2 * i);
    H.template block<2, 2>(r, r) = diag;
    if (i + 1 < n) {
      const Eigen::Matrix<Scalar, 2, 2> off = -A.transpose() * after * spec.surface(i + 1).basis();
      H.template block<2, 2>(r, r + 2) = off;
      H.template block<2, 2>(r + 2, r) = off.transpose();
    }
  }
  return H;
}

template <typename Scalar>
SceneGradient<Scalar> param_vjp(const BasicPathSpec<Scalar>& spec, const ParamVector<Scalar>& T,
                                const GradVector<Scalar>& u) {
  check_shape(spec, u);
  const detail::PathSegments<Scalar> seg(spec, T);
  const std::size_t n = spec.size();

  // w: point-space image of u; z: the point-space Hessian applied to w.
  std::vector<Vec3<Scalar>> w(n + 2, Vec3<Scalar>::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    w[i + 1] = spec.surface(i).basis() * u.row(static_cast<Index>(i)).transpose();
  }
  std::vector<Vec3<Scalar>> z(n + 2, Vec3<Scalar>::Zero());
  for (std::size_t j = 0; j <= n; ++j) {
    const Vec3<Scalar> d = seg.curvature(j) * (w[j + 1] - w[j]);
    z[j + 1] += d;
    z[j] -= d;
  }

  auto out = SceneGradient<Scalar>::zeros(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Index>(i);
    out.basis[i] = seg.point_gradient(i) * u.row(row) + z[i + 1] * T.row(row);
    out.anchor[i] = z[i + 1];
  }
  out.start = z.front();
  out.end = z.back();
  return out;
}

template <typename Scalar>
SceneGradient<Scalar> length_param_gradient(const BasicPathSpec<Scalar>& spec,
                                            const ParamVector<Scalar>& T) {
  const detail::PathSegments<Scalar> seg(spec, T);
  const std::size_t n = spec.size();
  auto out = SceneGradient<Scalar>::zeros(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3<Scalar> g = seg.point_gradient(i);
    out.basis[i] = g * T.row(static_cast<Index>(i));
    out.anchor[i] = g;
  }
  out.start = -seg.direction.front();
  out.end = seg.direction.back();
  return out;
}

#define FERMAT_INSTANTIATE(S)                                                                   \
  template struct SceneGradient<S>;                                                             \
  template struct detail::PathSegments<S>;                                                      \
  template S path_length<S>(const BasicPathSpec<S>&, const ParamVector<S>&);                    \
  template GradVector<S> gradient<S>(const BasicPathSpec<S>&, const ParamVector<S>&);           \
  template HessMatrix<S> hessian<S>(const BasicPathSpec<S>&, const ParamVector<S>&);            \
  template SceneGradient<S> param_vjp<S>(const BasicPathSpec<S>&, const ParamVector<S>&,        \
                                         const GradVector<S>&);                                 \
  template SceneGradient<S> length_param_gradient<S>(const BasicPathSpec<S>&,                   \
                                                     const ParamVector<S>&);

FERMAT_INSTANTIATE(float)
FERMAT_INSTANTIATE(double)

#undef FERMAT_INSTANTIATE

}  // namespace fermat
