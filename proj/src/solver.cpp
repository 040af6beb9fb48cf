// SPDX-License-Identifier: Apache-2.0
#include "fermat/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fermat/parallel.hpp"

namespace fermat {

using Eigen::Index;

void SolveOptions::validate() const {
  if (iterations < 1) throw Error(ErrorCode::InvalidArgument, "iterations must be >= 1");
  if (fixed_point_iters < 1) {
    throw Error(ErrorCode::InvalidArgument, "fixed_point_iters must be >= 1");
  }
  if (!(grad_tolerance >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "grad_tolerance must be >= 0");
  }
}

template <typename Scalar>
template <typename Other>
SolveReport<Other> SolveReport<Scalar>::cast() const {
  SolveReport<Other> out;
  out.solution = solution.template cast<Other>();
  out.final_length = static_cast<Other>(final_length);
  out.final_grad_norm = static_cast<Other>(final_grad_norm);
  out.iterations_run = iterations_run;
  out.trace.reserve(trace.size());
  for (const auto& e : trace) {
    out.trace.push_back({e.iteration, static_cast<Other>(e.length), static_cast<Other>(e.grad_norm),
                         static_cast<Other>(e.alpha), e.contracting, e.update_skipped});
  }
  return out;
}

template <typename Scalar>
ParamVector<Scalar> init_params(const BasicPathSpec<Scalar>& spec) {
  const Vec3<Scalar> mid = (spec.start() + spec.end()) / Scalar(2);
  ParamVector<Scalar> T(static_cast<Index>(spec.size()), 2);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    T.row(static_cast<Index>(i)) = spec.surface(i).project(mid);
  }
  return T;
}

template <typename Scalar>
FixedPointResult line_search_detail(const BasicPathSpec<Scalar>& spec,
                                    const ParamVector<Scalar>& T, const ParamVector<Scalar>& P,
                                    Scalar alpha0, int k) {
  check_shape(spec, P);
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "fixed-point iteration count must be >= 1");
  if (!P.allFinite()) throw Error(ErrorCode::InvalidArgument, "search direction is not finite");

  const std::size_t n = spec.size();
  const auto points = embed(spec, T);
  // Point-space displacement per unit step, zero at both endpoints.
  std::vector<Vec3<Scalar>> q(n + 2, Vec3<Scalar>::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    q[i + 1] = spec.surface(i).basis() * P.row(static_cast<Index>(i)).transpose();
  }
  std::vector<Vec3<Scalar>> dp(n + 1);
  std::vector<Vec3<Scalar>> dx(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    dp[j] = q[j + 1] - q[j];
    dx[j] = points[j + 1] - points[j];
  }

  const Scalar eps = segment_epsilon(spec);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  FixedPointResult result{static_cast<double>(alpha0), nan, nan};
  Scalar alpha = alpha0;
  for (int it = 0; it < k; ++it) {
    Scalar num = 0;
    Scalar den = 0;
    for (std::size_t j = 0; j <= n; ++j) {
      const Scalar norm = (dx[j] + alpha * dp[j]).norm();
      if (!(norm > eps)) {
        throw Error(ErrorCode::DegenerateSegment,
                    "segment " + std::to_string(j) + " collapses along the search direction");
      }
      num += dp[j].dot(dx[j]) / norm;
      den += dp[j].squaredNorm() / norm;
    }
    if (!(den > 0)) throw Error(ErrorCode::ZeroDirection, "search direction does not move the path");
    const Scalar next = -num / den;
    result.previous_change = result.last_change;
    result.last_change = std::abs(static_cast<double>(next - alpha));
    alpha = next;
  }
  result.alpha = static_cast<double>(alpha);
  return result;
}

template <typename Scalar>
Scalar line_search_alpha(const BasicPathSpec<Scalar>& spec, const ParamVector<Scalar>& T,
                         const ParamVector<Scalar>& P, Scalar alpha0, int k) {
  return static_cast<Scalar>(line_search_detail(spec, T, P, alpha0, k).alpha);
}

template <typename Scalar>
SolveReport<Scalar> bfgs_solve(const BasicPathSpec<Scalar>& spec, const ParamVector<Scalar>& T0,
                               const SolveOptions& opts) {
  opts.validate();
  check_shape(spec, T0);
  using Vector = FlatVector<Scalar>;
  using Matrix = HessMatrix<Scalar>;

  const Index dim = T0.size();
  ParamVector<Scalar> T = T0;
  GradVector<Scalar> G = gradient(spec, T);
  Matrix H = Matrix::Identity(dim, dim);
  ParamVector<Scalar> P(T.rows(), 2);
  Vector s(dim);
  Vector y(dim);
  Vector Hy(dim);

  SolveReport<Scalar> report;
  if (opts.record_trace) report.trace.reserve(static_cast<std::size_t>(opts.iterations));
  Scalar length = path_length(spec, T);

  // Below working round-off the skip test would admit noise pairs.
  const Scalar kCurvature =
      std::max(Scalar(1e-12), Scalar(16) * std::numeric_limits<Scalar>::epsilon());
  ParamVector<Scalar> trial(T.rows(), 2);
  Scalar prev_alpha = 0;
  for (int it = 0; it < opts.iterations; ++it) {
    if (opts.grad_tolerance > 0.0 &&
        static_cast<double>(flat(G).norm()) <
            opts.grad_tolerance * (1.0 + static_cast<double>(length))) {
      break;
    }
    flat(P).noalias() = -H * flat(G);
    // H only overflows from round-off pairs after convergence. A zeroed
    // direction then takes the zero-gradient path below: no step, no update.
    if (!flat(P).allFinite()) P.setZero();

    FixedPointResult fp{};
    try {
      Scalar alpha0 = 0;
      if (opts.step_init == StepInit::Warm) {
        // First candidate that does not increase L: the full step, then the
        // previous accepted step, then zero.
        trial = T + P;
        if (path_length(spec, trial) <= length) {
          alpha0 = 1;
        } else if (prev_alpha > 0) {
          trial = T + prev_alpha * P;
          if (path_length(spec, trial) <= length) alpha0 = prev_alpha;
        }
      }
      fp = line_search_detail(spec, T, P, alpha0, opts.fixed_point_iters);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroDirection) throw;
      fp = FixedPointResult{};
    }
    Scalar alpha = static_cast<Scalar>(fp.alpha);
    if (!std::isfinite(alpha)) alpha = 0;
    prev_alpha = alpha;

    s = alpha * flat(P);
    flat(T) += s;
    GradVector<Scalar> G_next = gradient(spec, T);
    y = flat(G_next) - flat(G);
    G = std::move(G_next);

    const Scalar sy = s.dot(y);
    const bool skip = !(sy > kCurvature * s.norm() * y.norm());
    if (!skip) {
      const Scalar rho = Scalar(1) / sy;
      Hy.noalias() = H * y;
      const Scalar yHy = y.dot(Hy);
      H.noalias() -= rho * (s * Hy.transpose() + Hy * s.transpose());
      H.noalias() += (rho * rho * yHy + rho) * (s * s.transpose());
    }

    ++report.iterations_run;
    length = path_length(spec, T);
    if (opts.record_trace) {
      report.trace.push_back({it + 1, length, flat(G).norm(), alpha, fp.contracting(), skip});
    }
  }

  report.solution = std::move(T);
  report.final_length = path_length(spec, report.solution);
  report.final_grad_norm = flat(G).norm();
  return report;
}

template <typename Scalar>
void check_uniform(std::span<const BasicPathSpec<Scalar>> specs) {
  if (specs.empty()) return;
  const std::size_t n = specs.front().size();
  for (std::size_t i = 1; i < specs.size(); ++i) {
    if (specs[i].size() != n) {
      throw Error(ErrorCode::NonUniformBatch, "path " + std::to_string(i) + " has " +
                                                  std::to_string(specs[i].size()) +
                                                  " interactions, expected " + std::to_string(n));
    }
  }
}

template <typename Scalar>
std::vector<SolveReport<Scalar>> batch_solve(std::span<const BasicPathSpec<Scalar>> specs,
                                             std::span<const ParamVector<Scalar>> T0s,
                                             const SolveOptions& opts, std::size_t threads) {
  opts.validate();
  if (opts.grad_tolerance != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "batch solves run a fixed number of iterations");
  }
  if (specs.size() != T0s.size()) {
    throw Error(ErrorCode::ShapeMismatch, "one initial guess per path expected");
  }
  check_uniform(specs);
  std::vector<SolveReport<Scalar>> out(specs.size());
  detail::parallel_for(specs.size(), threads,
                       [&](std::size_t i) { out[i] = bfgs_solve(specs[i], T0s[i], opts); });
  return out;
}

SolveReport<double> solve(const PathSpec& spec, const ParamVector<double>& T0,
                          const SolveOptions& opts) {
  if (opts.precision == Precision::Double) return bfgs_solve(spec, T0, opts);
  return bfgs_solve(spec.cast<float>(), ParamVector<float>(T0.cast<float>()), opts)
      .cast<double>();
}

std::vector<SolveReport<double>> solve_batch(std::span<const PathSpec> specs,
                                             std::span<const ParamVector<double>> T0s,
                                             const SolveOptions& opts, std::size_t threads) {
  if (opts.precision == Precision::Double) return batch_solve(specs, T0s, opts, threads);
  std::vector<BasicPathSpec<float>> fspecs;
  std::vector<ParamVector<float>> fT0s;
  fspecs.reserve(specs.size());
  fT0s.reserve(T0s.size());
  for (const auto& s : specs) fspecs.push_back(s.cast<float>());
  for (const auto& t : T0s) fT0s.emplace_back(t.cast<float>());
  auto reports = batch_solve<float>(fspecs, fT0s, opts, threads);
  std::vector<SolveReport<double>> out;
  out.reserve(reports.size());
  for (const auto& r : reports) out.push_back(r.cast<double>());
  return out;
}

#define FERMAT_INSTANTIATE(S)                                                                   \
  template struct SolveReport<S>;                                                               \
  template ParamVector<S> init_params<S>(const BasicPathSpec<S>&);                              \
  template FixedPointResult line_search_detail<S>(const BasicPathSpec<S>&, const ParamVector<S>&, \
                                                  const ParamVector<S>&, S, int);               \
  template S line_search_alpha<S>(const BasicPathSpec<S>&, const ParamVector<S>&,               \
                                  const ParamVector<S>&, S, int);                               \
  template SolveReport<S> bfgs_solve<S>(const BasicPathSpec<S>&, const ParamVector<S>&,         \
                                        const SolveOptions&);                                   \
  template void check_uniform<S>(std::span<const BasicPathSpec<S>>);                            \
  template std::vector<SolveReport<S>> batch_solve<S>(std::span<const BasicPathSpec<S>>,        \
                                                      std::span<const ParamVector<S>>,          \
                                                      const SolveOptions&, std::size_t);

FERMAT_INSTANTIATE(float)
FERMAT_INSTANTIATE(double)
template SolveReport<double> SolveReport<float>::cast<double>() const;
template SolveReport<float> SolveReport<double>::cast<float>() const;

#undef FERMAT_INSTANTIATE

}  // namespace fermat
