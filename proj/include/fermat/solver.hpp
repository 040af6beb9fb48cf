// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fermat/geometry.hpp"
#include "fermat/objective.hpp"

namespace fermat {

enum class Precision { Single, Double };

/// Starting value of the fixed-point step-size iteration in each BFGS step.
enum class StepInit {
  Zero,  ///< alpha^0 = 0
  /// alpha^0 = 1 (the full quasi-Newton step) when that step does not
  /// increase L, else the previous accepted step size when that one does
  /// not, else 0.
  Warm,
};

struct SolveOptions {
  int iterations = 100;
  /// Fixed-point updates of the step size per BFGS iteration.
  int fixed_point_iters = 1;
  Precision precision = Precision::Double;
  StepInit step_init = StepInit::Warm;
  bool record_trace = false;
  /// Scalar-mode early exit when |g| < grad_tolerance * (1 + L). Zero disables
  /// it; batch_solve always rejects a nonzero value.
  double grad_tolerance = 0.0;

  void validate() const;
};

template <typename Scalar>
struct TraceEntry {
  int iteration = 0;
  Scalar length = 0;
  Scalar grad_norm = 0;
  Scalar alpha = 0;
  /// False when the last fixed-point update moved alpha further than the one
  /// before it.
  bool contracting = true;
  bool update_skipped = false;
};

template <typename Scalar>
struct SolveReport {
  ParamVector<Scalar> solution;
  Scalar final_length = 0;
  Scalar final_grad_norm = 0;
  int iterations_run = 0;
  std::vector<TraceEntry<Scalar>> trace;

  template <typename Other>
  SolveReport<Other> cast() const;
};

/// Projects the midpoint of the endpoints onto each surface's affine span.
template <typename Scalar>
ParamVector<Scalar> init_params(const BasicPathSpec<Scalar>& spec);

struct FixedPointResult {
  double alpha = 0;
  /// |alpha^k - alpha^{k-1}| and the change before it (NaN when k < 2).
  double last_change = 0;
  double previous_change = 0;

  bool contracting() const { return !(last_change > previous_change); }
};

/// Step size along P after `k` fixed-point updates starting from alpha0.
/// Each update minimizes the quadratic majorizer of L(T + alpha P) built at
/// the current alpha, so L never increases along the sequence.
template <typename Scalar>
Scalar line_search_alpha(const BasicPathSpec<Scalar>& spec, const ParamVector<Scalar>& T,
                         const ParamVector<Scalar>& P, Scalar alpha0, int k);

template <typename Scalar>
FixedPointResult line_search_detail(const BasicPathSpec<Scalar>& spec,
                                    const ParamVector<Scalar>& T, const ParamVector<Scalar>& P,
                                    Scalar alpha0, int k);

/// Runs exactly opts.iterations BFGS updates (unless grad_tolerance is set)
/// in the precision of Scalar; opts.precision is ignored here.
template <typename Scalar>
SolveReport<Scalar> bfgs_solve(const BasicPathSpec<Scalar>& spec, const ParamVector<Scalar>& T0,
                               const SolveOptions& opts);

/// bfgs_solve over many paths with identical n. `threads` = 0 uses every
/// hardware thread; results do not depend on it.
template <typename Scalar>
std::vector<SolveReport<Scalar>> batch_solve(std::span<const BasicPathSpec<Scalar>> specs,
                                             std::span<const ParamVector<Scalar>> T0s,
                                             const SolveOptions& opts, std::size_t threads = 0);

/// Double-precision scene, solved in opts.precision, reported in double.
SolveReport<double> solve(const PathSpec& spec, const ParamVector<double>& T0,
                          const SolveOptions& opts);

std::vector<SolveReport<double>> solve_batch(std::span<const PathSpec> specs,
                                             std::span<const ParamVector<double>> T0s,
                                             const SolveOptions& opts, std::size_t threads = 0);

/// Throws NonUniformBatch unless every spec has the same interaction count.
template <typename Scalar>
void check_uniform(std::span<const BasicPathSpec<Scalar>> specs);

}  // namespace fermat
