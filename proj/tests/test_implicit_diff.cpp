// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fermat/baselines.hpp"
#include "fermat/error.hpp"
#include "fermat/implicit_diff.hpp"
#include "fermat/scenes.hpp"
#include "fermat/validation.hpp"
#include "oracles.hpp"

using namespace fermat;

namespace {

GradVector<double> random_cotangent(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  GradVector<double> v(static_cast<Eigen::Index>(n), 2);
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = g(rng);
  return v;
}

/// d/dtheta of v . T*(theta), re-solving at theta +- h for each free entry.
FlatVector<double> fd_vjp(const PathSpec& spec, const ParamVector<double>& Tstar,
                          const GradVector<double>& v, double h) {
  const FlatVector<double> theta = scene_params(spec);
  const auto free = free_scene_params(spec);
  FlatVector<double> out = FlatVector<double>::Zero(theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    if (!free[static_cast<std::size_t>(j)]) continue;
    FlatVector<double> up = theta;
    FlatVector<double> down = theta;
    up(j) += h;
    down(j) -= h;
    const auto Tu = reference_solve(with_scene_params(spec, up), Tstar);
    const auto Td = reference_solve(with_scene_params(spec, down), Tstar);
    out(j) = (flat(v).dot(flat(Tu)) - flat(v).dot(flat(Td))) / (2 * h);
  }
  return out;
}

}  // namespace

TEST(StationarySystem, ZeroCotangent) {
  const auto spec = gen_scenes(90, 3, SceneKinds::Mixed, 1)[0];
  const auto T = reference_solve(spec);
  const auto u = solve_stationary_system(spec, T, oracle::zeros(3));
  EXPECT_EQ(u, oracle::zeros(3));
}

TEST(StationarySystem, ResidualOnActiveBlock) {
  std::mt19937_64 rng(91);
  for (std::size_t n = 1; n <= 5; ++n) {
    for (const auto& spec : gen_scenes(92, n, SceneKinds::Mixed, 10)) {
      const auto T = reference_solve(spec);
      const auto v = random_cotangent(n, rng);
      const auto u = solve_stationary_system(spec, T, v);
      const auto mask = active_mask(spec);
      const Eigen::VectorXd r = hessian(spec, T) * flat(u) + flat(v);
      for (std::size_t j = 0; j < mask.size(); ++j) {
        if (mask[j]) {
          EXPECT_LT(std::abs(r(static_cast<Eigen::Index>(j))), 1e-8 * flat(v).norm());
        } else {
          EXPECT_EQ(flat(u)(static_cast<Eigen::Index>(j)), 0.0);
        }
      }
    }
  }
}

TEST(StationarySystem, SingleEdgeIsScalarDivision) {
  for (const auto& spec : gen_scenes(93, 1, SceneKinds::DiffractionsOnly, 10)) {
    const auto T = reference_solve(spec);
    GradVector<double> v(1, 2);
    v << 0.7, -3.0;
    const auto u = solve_stationary_system(spec, T, v);
    const double h = hessian(spec, T)(0, 0);
    EXPECT_NEAR(u(0, 0), -0.7 / h, 1e-12 * (1 + std::abs(u(0, 0))));
    EXPECT_EQ(u(0, 1), 0.0);
  }
}

TEST(StationarySystem, RejectsNonStationaryPoint) {
  const auto spec = gen_scenes(94, 2, SceneKinds::Mixed, 1)[0];
  ParamVector<double> T = init_params(spec);
  T(0, 0) += 1.0;
  try {
    solve_stationary_system(spec, T, oracle::ones(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotStationary);
  }
  ImplicitOptions loose;
  loose.check_stationarity = false;
  EXPECT_NO_THROW(solve_stationary_system(spec, T, oracle::ones(2), loose));
}

TEST(StationarySystem, ActiveBlockSymmetric) {
  for (const auto& spec : gen_scenes(95, 4, SceneKinds::Mixed, 10)) {
    const auto H = hessian(spec, reference_solve(spec));
    EXPECT_LT((H - H.transpose()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(VjpSolution, MatchesFiniteDifferenceResolve) {
  std::mt19937_64 rng(96);
  for (std::size_t n = 1; n <= 3; ++n) {
    for (const auto kinds : {SceneKinds::ReflectionsOnly, SceneKinds::DiffractionsOnly,
                             SceneKinds::Mixed}) {
      for (const auto& spec : gen_scenes(97, n, kinds, 3)) {
        const auto T = reference_solve(spec);
        const auto v = random_cotangent(n, rng);
        const FlatVector<double> a = vjp_solution(spec, T, v).flatten();
        const FlatVector<double> b = fd_vjp(spec, T, v, 1e-5);
        const auto free = free_scene_params(spec);
        FlatVector<double> diff = a - b;
        for (std::size_t j = 0; j < free.size(); ++j) {
          if (!free[j]) diff(static_cast<Eigen::Index>(j)) = 0;
        }
        EXPECT_LE(diff.norm(), 1e-5 * std::max(b.norm(), 1.0));
      }
    }
  }
}

TEST(VjpSolution, TranslationLeavesSolutionFixed) {
  std::mt19937_64 rng(98);
  for (const auto& spec : gen_scenes(99, 4, SceneKinds::Mixed, 10)) {
    const auto T = reference_solve(spec);
    const auto g = vjp_solution(spec, T, random_cotangent(4, rng));
    Vec3d total = g.start + g.end;
    for (const auto& a : g.anchor) total += a;
    EXPECT_LT(total.norm(), 1e-8);
  }
}

TEST(Envelope, VPathStart) {
  const PathSpec spec(Vec3d(0, -1, 1), Vec3d(0, 1, 1),
                      {make_plane(Vec3d::Zero(), Vec3d(1, 0, 0), Vec3d(0, 1, 0))});
  const auto g = grad_length_wrt_params(spec, oracle::zeros(1));
  const double r = std::sqrt(0.5);
  EXPECT_LE((g.start - Vec3d(0, -r, r)).norm(), 1e-15);
  EXPECT_LE((g.end - Vec3d(0, r, r)).norm(), 1e-15);
}

TEST(Envelope, TotalEqualsPartialAtMinimum) {
  for (std::size_t n = 1; n <= 5; ++n) {
    for (const auto& spec : gen_scenes(100, n, SceneKinds::Mixed, 10)) {
      const auto T = reference_solve(spec);
      const auto total = grad_length_wrt_params(spec, T).flatten();
      const auto partial = length_param_gradient(spec, T).flatten();
      EXPECT_LE((total - partial).norm(), 1e-9 * (1 + partial.norm()));
    }
  }
}

TEST(Envelope, MatchesResolvedLengthDifferences) {
  for (std::size_t n = 1; n <= 3; ++n) {
    for (const auto& spec : gen_scenes(101, n, SceneKinds::Mixed, 4)) {
      const auto T = reference_solve(spec);
      const FlatVector<double> theta = scene_params(spec);
      const auto free = free_scene_params(spec);
      const FlatVector<double> g = grad_length_wrt_params(spec, T).flatten();
      const double h = 1e-5;
      for (Eigen::Index j = 0; j < theta.size(); ++j) {
        if (!free[static_cast<std::size_t>(j)]) continue;
        FlatVector<double> up = theta;
        FlatVector<double> down = theta;
        up(j) += h;
        down(j) -= h;
        const auto su = with_scene_params(spec, up);
        const auto sd = with_scene_params(spec, down);
        const double fd = (oracle::length(su, reference_solve(su, T)) -
                           oracle::length(sd, reference_solve(sd, T))) /
                          (2 * h);
        EXPECT_NEAR(g(j), fd, 1e-6 * (1 + std::abs(fd)));
      }
    }
  }
}

TEST(BatchGradLength, MatchesPerPath) {
  const auto specs = gen_scenes(102, 3, SceneKinds::Mixed, 12);
  std::vector<ParamVector<double>> Ts;
  for (const auto& s : specs) Ts.push_back(reference_solve(s));
  const auto batch = batch_grad_length<double>(specs, Ts, {}, 3);
  ASSERT_EQ(batch.size(), specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    EXPECT_EQ(batch[i].flatten(), grad_length_wrt_params(specs[i], Ts[i]).flatten());
  }
  try {
    batch_grad_length<double>(specs, std::span<const ParamVector<double>>(Ts).first(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}
