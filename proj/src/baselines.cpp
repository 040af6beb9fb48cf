// SPDX-License-Identifier: Apache-2.0
#include "fermat/baselines.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace fermat {

using Eigen::Index;

template <typename Scalar>
std::vector<Vec3<Scalar>> image_method(const BasicPathSpec<Scalar>& spec, ImageStats* stats) {
  const std::size_t n = spec.size();
  std::vector<Vec3<Scalar>> normals(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = spec.surface(i);
    if (s.kind() != SurfaceKind::Plane) {
      throw Error(ErrorCode::NotAllPlanes, "surface " + std::to_string(i) + " is not a plane");
    }
    normals[i] = s.basis().col(0).cross(s.basis().col(1)).normalized();
  }

  ImageStats local;
  std::vector<Vec3<Scalar>> images(n + 1);
  images[0] = spec.start();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3<Scalar>& nrm = normals[i];
    const Vec3<Scalar>& p = images[i];
    images[i + 1] = p - Scalar(2) * (p - spec.surface(i).anchor()).dot(nrm) * nrm;
    ++local.mirrors;
  }

  std::vector<Vec3<Scalar>> points(n);
  Vec3<Scalar> target = spec.end();
  for (std::size_t k = n; k-- > 0;) {
    const Vec3<Scalar>& origin = images[k + 1];
    const Vec3<Scalar> d = target - origin;
    const Scalar denom = d.dot(normals[k]);
    if (!(std::abs(denom) > Scalar(1e-12) * d.norm())) {
      throw Error(ErrorCode::NoIntersection,
                  "image ray is parallel to plane " + std::to_string(k));
    }
    const Scalar s = (spec.surface(k).anchor() - origin).dot(normals[k]) / denom;
    points[k] = origin + s * d;
    target = points[k];
    ++local.intersections;
  }
  if (stats) *stats = local;
  return points;
}

template <typename Scalar>
SolveReport<Scalar> gradient_descent(const BasicPathSpec<Scalar>& spec,
                                     const ParamVector<Scalar>& T0, const GdOptions& opts) {
  if (opts.iterations < 1) throw Error(ErrorCode::InvalidArgument, "iterations must be >= 1");
  check_shape(spec, T0);
  ParamVector<Scalar> T = T0;
  GradVector<Scalar> G = gradient(spec, T);
  const Scalar eta =
      static_cast<Scalar>(opts.step_scale) * spec.scale() / (Scalar(1) + flat(G).norm());

  SolveReport<Scalar> report;
  for (int it = 0; it < opts.iterations; ++it) {
    T -= eta * G;
    G = gradient(spec, T);
    ++report.iterations_run;
    if (opts.record_trace) {
      report.trace.push_back({it + 1, path_length(spec, T), flat(G).norm(), eta, true, false});
    }
  }
  report.final_length = path_length(spec, T);
  report.final_grad_norm = flat(G).norm();
  report.solution = std::move(T);
  return report;
}

template <typename Scalar>
SolveReport<Scalar> newton_solve(const BasicPathSpec<Scalar>& spec,
                                 const ParamVector<Scalar>& T0, const NewtonOptions& opts) {
  if (opts.iterations < 1) throw Error(ErrorCode::InvalidArgument, "iterations must be >= 1");
  check_shape(spec, T0);
  using Vector = FlatVector<Scalar>;
  using Matrix = HessMatrix<Scalar>;

  const auto mask = active_mask(spec);
  std::vector<Index> active;
  for (std::size_t j = 0; j < mask.size(); ++j) {
    if (mask[j]) active.push_back(static_cast<Index>(j));
  }
  const Index m = static_cast<Index>(active.size());
  const Scalar slack = Scalar(4) * std::numeric_limits<Scalar>::epsilon();

  ParamVector<Scalar> T = T0;
  Scalar length = path_length(spec, T);
  GradVector<Scalar> G = gradient(spec, T);
  SolveReport<Scalar> report;

  for (int it = 0; it < opts.iterations && m > 0; ++it) {
    if (opts.grad_tolerance > 0.0 &&
        static_cast<double>(flat(G).norm()) <
            opts.grad_tolerance * (1.0 + static_cast<double>(length))) {
      break;
    }
    const Matrix H = hessian(spec, T);
    Matrix Ha(m, m);
    Vector ga(m);
    for (Index r = 0; r < m; ++r) {
      ga(r) = flat(G)(active[r]);
      for (Index c = 0; c < m; ++c) Ha(r, c) = H(active[r], active[c]);
    }
    const Scalar lambda = Scalar(1e-10) * Ha.trace() / static_cast<Scalar>(m);
    Ha.diagonal().array() += lambda;
    Eigen::LDLT<Matrix> ldlt(Ha);
    Vector step = ldlt.solve(-ga);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !step.allFinite() ||
        !(lambda > 0)) {
      // Past the first step this only happens at a collapsing segment; the
      // last iterate is kept.
      if (it == 0) {
        throw Error(ErrorCode::SingularHessian, "regularized Newton system could not be solved");
      }
      break;
    }

    Scalar scale = 1;
    ParamVector<Scalar> trial = T;
    Scalar trial_length = 0;
    GradVector<Scalar> trial_grad;
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h) {
      trial = T;
      for (Index r = 0; r < m; ++r) flat(trial)(active[r]) += scale * step(r);
      trial_length = path_length(spec, trial);
      if (trial_length <= length * (Scalar(1) + slack)) {
        // A step that collapses a segment leaves no gradient; treat it as too long.
        try {
          trial_grad = gradient(spec, trial);
          accepted = true;
          break;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::DegenerateSegment) throw;
        }
      }
      scale /= 2;
    }
    if (accepted) {
      T = std::move(trial);
      length = trial_length;
      G = std::move(trial_grad);
    }
    ++report.iterations_run;
    if (opts.record_trace) {
      report.trace.push_back({it + 1, length, flat(G).norm(), scale, accepted, !accepted});
    }
  }
  report.final_length = path_length(spec, T);
  report.final_grad_norm = flat(G).norm();
  report.solution = std::move(T);
  return report;
}

namespace {

bool meets(double grad_norm, double length, double tol) {
  return grad_norm < tol * (1.0 + length);
}

}  // namespace

ReferenceResult try_reference_solve(const PathSpec& spec, const ParamVector<double>& T0,
                                    const ReferenceOptions& opts) {
  SolveOptions bfgs;
  bfgs.iterations = opts.bfgs_iterations;
  bfgs.fixed_point_iters = opts.fixed_point_iters;
  bfgs.grad_tolerance = opts.grad_tolerance;
  auto report = bfgs_solve(spec, T0, bfgs);

  ReferenceResult out;
  out.solution = std::move(report.solution);
  out.length = report.final_length;
  out.grad_norm = report.final_grad_norm;
  if (opts.polish_iterations > 0 && !meets(out.grad_norm, out.length, opts.grad_tolerance)) {
    NewtonOptions polish;
    polish.iterations = opts.polish_iterations;
    polish.grad_tolerance = opts.grad_tolerance;
    try {
      auto newton = newton_solve(spec, out.solution, polish);
      if (newton.final_grad_norm < out.grad_norm) {
        out.solution = std::move(newton.solution);
        out.length = newton.final_length;
        out.grad_norm = newton.final_grad_norm;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularHessian) throw;
    }
  }
  out.converged = meets(out.grad_norm, out.length, opts.grad_tolerance);
  return out;
}

ReferenceResult try_reference_solve(const PathSpec& spec, const ReferenceOptions& opts) {
  return try_reference_solve(spec, init_params(spec), opts);
}

ParamVector<double> reference_solve(const PathSpec& spec, const ParamVector<double>& T0,
                                    const ReferenceOptions& opts) {
  auto result = try_reference_solve(spec, T0, opts);
  if (!result.converged) {
    throw Error(ErrorCode::NoConvergence,
                "gradient norm " + std::to_string(result.grad_norm) + " above target");
  }
  return std::move(result.solution);
}

ParamVector<double> reference_solve(const PathSpec& spec, const ReferenceOptions& opts) {
  return reference_solve(spec, init_params(spec), opts);
}

#define FERMAT_INSTANTIATE(S)                                                                   \
  template std::vector<Vec3<S>> image_method<S>(const BasicPathSpec<S>&, ImageStats*);          \
  template SolveReport<S> gradient_descent<S>(const BasicPathSpec<S>&, const ParamVector<S>&,   \
                                              const GdOptions&);                                \
  template SolveReport<S> newton_solve<S>(const BasicPathSpec<S>&, const ParamVector<S>&,       \
                                          const NewtonOptions&);

FERMAT_INSTANTIATE(float)
FERMAT_INSTANTIATE(double)

#undef FERMAT_INSTANTIATE

}  // namespace fermat
