// SPDX-License-Identifier: Apache-2.0
#include "fermat/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fermat/baselines.hpp"
#include "fermat/error.hpp"
#include "fermat/implicit_diff.hpp"

namespace fermat {

namespace {

constexpr std::size_t kPerSurface = 9;

}  // namespace

FlatVector<double> scene_params(const PathSpec& spec) {
  SceneGradient<double> g = SceneGradient<double>::zeros(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    g.basis[k] = spec.surface(k).basis();
    g.anchor[k] = spec.surface(k).anchor();
  }
  g.start = spec.start();
  g.end = spec.end();
  return g.flatten();
}

PathSpec with_scene_params(const PathSpec& like, const FlatVector<double>& theta) {
  const auto g = SceneGradient<double>::unflatten(like.size(), theta);
  std::vector<Surface> surfaces;
  surfaces.reserve(like.size());
  for (std::size_t k = 0; k < like.size(); ++k) {
    surfaces.push_back(Surface::from_parts(like.surface(k).kind(), g.basis[k], g.anchor[k]));
  }
  return PathSpec(g.start, g.end, std::move(surfaces));
}

std::vector<bool> free_scene_params(const PathSpec& spec) {
  std::vector<bool> free(kPerSurface * spec.size() + 6, true);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    if (spec.surface(k).kind() != SurfaceKind::Edge) continue;
    for (std::size_t r = 3; r < 6; ++r) free[kPerSurface * k + r] = false;
  }
  return free;
}

SceneGradient<double> fd_solution_vjp(const PathSpec& spec, const ParamVector<double>& Tstar,
                                      const GradVector<double>& v, double h) {
  check_shape(spec, Tstar);
  check_shape(spec, v);
  const FlatVector<double> theta = scene_params(spec);
  const auto free = free_scene_params(spec);
  FlatVector<double> out = FlatVector<double>::Zero(theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    if (!free[static_cast<std::size_t>(j)]) continue;
    FlatVector<double> up = theta;
    FlatVector<double> down = theta;
    up(j) += h;
    down(j) -= h;
    const ParamVector<double> Tu = reference_solve(with_scene_params(spec, up), Tstar);
    const ParamVector<double> Td = reference_solve(with_scene_params(spec, down), Tstar);
    out(j) = flat(v).dot(flat(Tu) - flat(Td)) / (2 * h);
  }
  return SceneGradient<double>::unflatten(spec.size(), out);
}

GradCheckReport grad_check(std::uint64_t seed, std::size_t n, SceneKinds kinds, std::size_t count,
                           const GradCheckOptions& opts) {
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "grad-check needs count >= 1");
  const auto scenes = gen_scenes(seed, n, kinds, count, opts.scene);
  std::mt19937_64 rng(seed ^ 0x5eedc07a9e4d1ULL);
  std::normal_distribution<double> normal;

  GradCheckReport report;
  for (const auto& spec : scenes) {
    GradVector<double> v(static_cast<Eigen::Index>(n), 2);
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = normal(rng);

    GradCheckCase c;
    try {
      const ParamVector<double> Tstar = reference_solve(spec);
      const auto free = free_scene_params(spec);
      const FlatVector<double> a = vjp_solution(spec, Tstar, v).flatten();
      const FlatVector<double> b = fd_solution_vjp(spec, Tstar, v, opts.fd_step).flatten();
      double diff = 0;
      double ref = 0;
      for (Eigen::Index j = 0; j < a.size(); ++j) {
        if (!free[static_cast<std::size_t>(j)]) continue;
        diff += (a(j) - b(j)) * (a(j) - b(j));
        ref += b(j) * b(j);
      }
      c.rel_error = std::sqrt(diff) / std::max(std::sqrt(ref), 1e-12);

      const FlatVector<double> partial = length_param_gradient(spec, Tstar).flatten();
      const FlatVector<double> total = grad_length_wrt_params(spec, Tstar).flatten();
      c.envelope_error = (total - partial).norm() / (1 + partial.norm());
    } catch (const Error&) {
      c.rel_error = std::numeric_limits<double>::infinity();
      c.envelope_error = std::numeric_limits<double>::infinity();
    }
    report.max_rel_error = std::max(report.max_rel_error, c.rel_error);
    report.max_envelope_error = std::max(report.max_envelope_error, c.envelope_error);
    report.cases.push_back(c);
  }
  report.pass = report.max_rel_error <= opts.tolerance &&
                report.max_envelope_error <= opts.envelope_tolerance;
  return report;
}

}  // namespace fermat
