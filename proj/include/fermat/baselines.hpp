// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "fermat/geometry.hpp"
#include "fermat/solver.hpp"

namespace fermat {

/// Operation counts of one image-method call; both equal n.
struct ImageStats {
  std::size_t mirrors = 0;
  std::size_t intersections = 0;
};

/// Exact specular path through planes only: mirror the start across each
/// plane in order, then intersect back from the end.
template <typename Scalar>
std::vector<Vec3<Scalar>> image_method(const BasicPathSpec<Scalar>& spec,
                                       ImageStats* stats = nullptr);

struct GdOptions {
  int iterations = 100;
  /// eta = step_scale * |end - start| / (1 + |g_0|).
  double step_scale = 0.1;
  bool record_trace = false;
};

template <typename Scalar>
SolveReport<Scalar> gradient_descent(const BasicPathSpec<Scalar>& spec,
                                     const ParamVector<Scalar>& T0, const GdOptions& opts);

struct NewtonOptions {
  int iterations = 100;
  int max_halvings = 20;
  /// Stop once |g| < grad_tolerance * (1 + L); zero runs every iteration.
  double grad_tolerance = 0.0;
  bool record_trace = false;
};

/// Damped Newton on the active coordinates only; inert edge coordinates are
/// held at their initial value. Stand-in for a modified Newton search.
/// Steps are halved until L does not increase and no segment collapses. A
/// system that cannot be factored ends the run at the current iterate, or
/// throws SingularHessian on the first iteration.
template <typename Scalar>
SolveReport<Scalar> newton_solve(const BasicPathSpec<Scalar>& spec,
                                 const ParamVector<Scalar>& T0, const NewtonOptions& opts);

struct ReferenceOptions {
  int bfgs_iterations = 1000;
  int fixed_point_iters = 64;
  /// Zero skips the Newton polish.
  int polish_iterations = 50;
  /// Convergence target |g| < grad_tolerance * (1 + L).
  double grad_tolerance = 1e-12;
};

struct ReferenceResult {
  ParamVector<double> solution;
  double length = 0;
  double grad_norm = 0;
  bool converged = false;
};

/// High-precision ground truth; never throws on non-convergence.
ReferenceResult try_reference_solve(const PathSpec& spec, const ReferenceOptions& opts = {});
ReferenceResult try_reference_solve(const PathSpec& spec, const ParamVector<double>& T0,
                                    const ReferenceOptions& opts = {});

/// Same, but throws NoConvergence when the gradient target is missed.
ParamVector<double> reference_solve(const PathSpec& spec, const ReferenceOptions& opts = {});
ParamVector<double> reference_solve(const PathSpec& spec, const ParamVector<double>& T0,
                                    const ReferenceOptions& opts = {});

}  // namespace fermat
