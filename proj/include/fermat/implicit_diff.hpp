// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fermat/geometry.hpp"
#include "fermat/objective.hpp"

namespace fermat {

struct ImplicitOptions {
  /// Tstar must satisfy |grad L| < stationarity_tolerance * (1 + L).
  double stationarity_tolerance = 1e-5;
  /// Disabling the gate gives the implicit formula at a non-stationary
  /// iterate, which is only an approximation of dT*/dtheta.
  bool check_stationarity = true;
};

/// Solves H u = -v on the active coordinates of Tstar (H is symmetric).
/// Inert coordinates of u are zero. Falls back to a Tikhonov shift of
/// 1e-12 * trace when the active block is not positive definite.
template <typename Scalar>
GradVector<Scalar> solve_stationary_system(const BasicPathSpec<Scalar>& spec,
                                           const ParamVector<Scalar>& Tstar,
                                           const GradVector<Scalar>& v,
                                           const ImplicitOptions& opts = {});

/// v^T dT*/dtheta.
template <typename Scalar>
SceneGradient<Scalar> vjp_solution(const BasicPathSpec<Scalar>& spec,
                                   const ParamVector<Scalar>& Tstar, const GradVector<Scalar>& v,
                                   const ImplicitOptions& opts = {});

/// Total derivative of theta -> L(T*(theta); theta): the partial term plus
/// the solution term driven by grad_T L. At a stationary point the second
/// term vanishes; debug builds assert that.
template <typename Scalar>
SceneGradient<Scalar> grad_length_wrt_params(const BasicPathSpec<Scalar>& spec,
                                             const ParamVector<Scalar>& Tstar,
                                             const ImplicitOptions& opts = {});

/// grad_length_wrt_params over a batch, one thread-private job per path.
template <typename Scalar>
std::vector<SceneGradient<Scalar>> batch_grad_length(std::span<const BasicPathSpec<Scalar>> specs,
                                                     std::span<const ParamVector<Scalar>> Tstars,
                                                     const ImplicitOptions& opts = {},
                                                     std::size_t threads = 0);

}  // namespace fermat
