// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fermat/geometry.hpp"
#include "fermat/objective.hpp"
#include "fermat/scenes.hpp"

namespace fermat {

/// Scene parameters in SceneGradient::flatten order.
FlatVector<double> scene_params(const PathSpec& spec);
/// Rebuilds a spec with the kinds of `like` from a scene_params vector.
PathSpec with_scene_params(const PathSpec& like, const FlatVector<double>& theta);
/// False for the zero second basis column of each edge: perturbing it would
/// turn the edge into a plane.
std::vector<bool> free_scene_params(const PathSpec& spec);

/// v^T dT*/dtheta by central differences: every free parameter is moved by
/// +-h and the path re-solved with the reference solver from Tstar. Fixed
/// parameters get zero. Throws NoConvergence when a re-solve misses its
/// gradient target.
SceneGradient<double> fd_solution_vjp(const PathSpec& spec, const ParamVector<double>& Tstar,
                                      const GradVector<double>& v, double h = 1e-5);

struct GradCheckOptions {
  double fd_step = 1e-5;
  /// Pass threshold on |implicit - fd| / |fd| over free parameters.
  double tolerance = 1e-3;
  /// Pass threshold on |dL*/dtheta - partial| / (1 + |partial|).
  double envelope_tolerance = 1e-6;
  SceneParams scene{};
};

struct GradCheckCase {
  double rel_error = 0;
  double envelope_error = 0;
};

struct GradCheckReport {
  std::vector<GradCheckCase> cases;
  double max_rel_error = 0;
  double max_envelope_error = 0;
  bool pass = false;
};

/// Implicit-differentiation check on `count` generated scenes with a seeded
/// random cotangent per scene. count = 0 throws InvalidArgument. A scene
/// whose oracle cannot be evaluated counts as an infinite error.
GradCheckReport grad_check(std::uint64_t seed, std::size_t n, SceneKinds kinds, std::size_t count,
                           const GradCheckOptions& opts = {});

}  // namespace fermat
