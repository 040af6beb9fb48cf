// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fermat/baselines.hpp"
#include "fermat/error.hpp"
#include "fermat/scenes.hpp"
#include "oracles.hpp"

using namespace fermat;

namespace {

PathSpec v_path() {
  return PathSpec(Vec3d(0, -1, 1), Vec3d(0, 1, 1),
                  {make_plane(Vec3d::Zero(), Vec3d(1, 0, 0), Vec3d(0, 1, 0))});
}

PathSpec corner() {
  return PathSpec(Vec3d(1, 2, 0), Vec3d(2, 1, 0),
                  {make_plane(Vec3d::Zero(), Vec3d(0, 1, 0), Vec3d(0, 0, 1)),
                   make_plane(Vec3d::Zero(), Vec3d(1, 0, 0), Vec3d(0, 0, 1))});
}

}  // namespace

TEST(ImageMethod, VPath) {
  const auto pts = image_method(v_path());
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_LE(pts[0].norm(), 1e-15);
}

TEST(ImageMethod, CornerReflectorIsStationary) {
  const auto spec = corner();
  const auto pts = image_method(spec);
  ASSERT_EQ(pts.size(), 2u);
  // Mirroring (1,2) across x=0 then y=0 gives (-1,-2); the line to (2,1)
  // crosses x=0 at y=-1 and y=0 at x=1.
  EXPECT_LE((pts[0] - Vec3d(0, 1, 0)).norm(), 1e-15);
  EXPECT_LE((pts[1] - Vec3d(1, 0, 0)).norm(), 1e-15);
  const auto T = params_of(spec, pts);
  EXPECT_LE(flat(gradient(spec, T)).norm(), 1e-12);
}

TEST(ImageMethod, ParallelRayHasNoIntersection) {
  // The end sits at the height of the mirrored start, so the ray between them
  // runs parallel to the plane.
  const PathSpec spec(Vec3d(0, 0, 1), Vec3d(1, 0, -1),
                      {make_plane(Vec3d::Zero(), Vec3d(1, 0, 0), Vec3d(0, 1, 0))});
  try {
    image_method(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoIntersection);
  }
}

TEST(ImageMethod, RejectsEdges) {
  const auto spec = gen_scenes(70, 2, SceneKinds::Mixed, 1)[0];
  try {
    image_method(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAllPlanes);
  }
}

TEST(ImageMethod, StationaryAndOnPlanes) {
  for (std::size_t n = 1; n <= 5; ++n) {
    for (const auto& spec : gen_scenes(71, n, SceneKinds::ReflectionsOnly, 40)) {
      const auto pts = image_method(spec);
      for (std::size_t i = 0; i < n; ++i) {
        const auto& s = spec.surface(i);
        const Vec3d normal = s.basis().col(0).cross(s.basis().col(1)).normalized();
        EXPECT_LT(std::abs((pts[i] - s.anchor()).dot(normal)), 1e-10);
      }
      EXPECT_LT(flat(gradient(spec, params_of(spec, pts))).norm(), 1e-9);
    }
  }
}

TEST(ImageMethod, SingleBounceMatchesMirrorOracle) {
  for (const auto& spec : gen_scenes(72, 1, SceneKinds::ReflectionsOnly, 50)) {
    const Vec3d expected = oracle::single_bounce(spec.start(), spec.end(), spec.surface(0));
    EXPECT_LE((image_method(spec)[0] - expected).norm(), 1e-12);
  }
}

TEST(ImageMethod, LinearOperationCount) {
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto spec = gen_scenes(73, n, SceneKinds::ReflectionsOnly, 1)[0];
    ImageStats stats;
    image_method(spec, &stats);
    EXPECT_EQ(stats.mirrors, n);
    EXPECT_EQ(stats.intersections, n);
  }
}

TEST(GradientDescent, StallsWithinHundredIterations) {
  std::vector<double> errors;
  for (const auto& spec : gen_scenes(74, 3, SceneKinds::ReflectionsOnly, 100)) {
    const auto r = gradient_descent(spec, init_params(spec), GdOptions{});
    errors.push_back(mean_point_distance(interaction_points(spec, r.solution), image_method(spec)));
  }
  std::sort(errors.begin(), errors.end());
  EXPECT_GT(errors[errors.size() / 2], 1e-3);
}

TEST(GradientDescent, ZeroGradientIsFixedPoint) {
  const auto r = gradient_descent(v_path(), oracle::zeros(1), GdOptions{});
  EXPECT_EQ(r.solution, oracle::zeros(1));
}

TEST(GradientDescent, VanishingStepLeavesInput) {
  const auto spec = gen_scenes(75, 3, SceneKinds::Mixed, 1)[0];
  GdOptions o;
  o.step_scale = 0;
  const auto T0 = init_params(spec);
  EXPECT_EQ(gradient_descent(spec, T0, o).solution, T0);
}

TEST(Newton, SingleEdgeConvergesFast) {
  for (const auto& spec : gen_scenes(76, 1, SceneKinds::DiffractionsOnly, 30)) {
    NewtonOptions o;
    o.iterations = 10;
    const auto r = newton_solve(spec, init_params(spec), o);
    const auto ref = reference_solve(spec);
    EXPECT_LE(mean_point_distance(interaction_points(spec, r.solution),
                                  interaction_points(spec, ref)),
              1e-9);
  }
}

TEST(Newton, MaskedSolveOnEdges) {
  const auto spec = gen_scenes(77, 3, SceneKinds::DiffractionsOnly, 1)[0];
  const auto T0 = init_params(spec);
  EXPECT_EQ(Eigen::FullPivLU<Eigen::MatrixXd>(hessian(spec, T0)).rank(), 3);
  EXPECT_NO_THROW(newton_solve(spec, T0, NewtonOptions{}));
}

TEST(Newton, ConvergedRunsMatchImage) {
  std::size_t converged = 0;
  for (const auto& spec : gen_scenes(78, 2, SceneKinds::ReflectionsOnly, 50)) {
    const auto r = newton_solve(spec, init_params(spec), NewtonOptions{});
    if (r.final_grad_norm > 1e-10) continue;
    ++converged;
    EXPECT_LE(mean_point_distance(interaction_points(spec, r.solution), image_method(spec)), 1e-8);
  }
  EXPECT_GE(converged, 35u);
}

TEST(Newton, StallsOnlyWhereASegmentCollapses) {
  // Two bounce points meeting on the line where their planes cross form a
  // kink of L; the damped steps then shrink to nothing.
  for (std::size_t n = 2; n <= 4; ++n) {
    for (const auto& spec : gen_scenes(83, n, SceneKinds::ReflectionsOnly, 40)) {
      const auto r = newton_solve(spec, init_params(spec), NewtonOptions{});
      if (r.final_grad_norm < 1e-10) continue;
      const auto pts = embed(spec, r.solution);
      double shortest = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
        shortest = std::min(shortest, (pts[j + 1] - pts[j]).norm());
      }
      EXPECT_LT(shortest, 1e-3);
    }
  }
}

TEST(Newton, DiffractionsConverge) {
  for (std::size_t n = 1; n <= 5; ++n) {
    for (const auto& spec : gen_scenes(84, n, SceneKinds::DiffractionsOnly, 20)) {
      const auto r = newton_solve(spec, init_params(spec), NewtonOptions{});
      EXPECT_LT(r.final_grad_norm, 1e-10);
    }
  }
}

TEST(Newton, AgreesWithBfgs) {
  for (std::size_t n = 1; n <= 5; ++n) {
    for (const auto& spec : gen_scenes(79, n, SceneKinds::Mixed, 10)) {
      const auto a = newton_solve(spec, init_params(spec), NewtonOptions{});
      SolveOptions o;
      o.fixed_point_iters = 64;
      const auto b = bfgs_solve(spec, init_params(spec), o);
      if (a.final_grad_norm < 1e-10 && b.final_grad_norm < 1e-10) {
        EXPECT_LE(mean_point_distance(interaction_points(spec, a.solution),
                                      interaction_points(spec, b.solution)),
                  1e-8);
      }
    }
  }
}

TEST(Reference, SingleReflectionMatchesImage) {
  for (const auto& spec : gen_scenes(80, 1, SceneKinds::ReflectionsOnly, 30)) {
    EXPECT_LE(mean_point_distance(interaction_points(spec, reference_solve(spec)),
                                  image_method(spec)),
              1e-9);
  }
}

TEST(Reference, SymmetricEdge) {
  const PathSpec spec(Vec3d(-1, 0.5, 1), Vec3d(1, 0.5, 1), {make_edge(Vec3d::Zero(), Vec3d(0, 1, 0))});
  const auto T = reference_solve(spec);
  EXPECT_NEAR(T(0, 0), 0.5, 1e-12);
  const PathSpec centred(Vec3d(-1, 0, 1), Vec3d(1, 0, 1), {make_edge(Vec3d::Zero(), Vec3d(0, 1, 0))});
  EXPECT_NEAR(reference_solve(centred)(0, 0), 0.0, 1e-12);
}

TEST(Reference, Idempotent) {
  for (const auto& spec : gen_scenes(81, 3, SceneKinds::Mixed, 10)) {
    const auto T = reference_solve(spec);
    EXPECT_LE((reference_solve(spec, T) - T).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Reference, ReportsNonConvergence) {
  const auto spec = gen_scenes(82, 4, SceneKinds::Mixed, 1)[0];
  ReferenceOptions o;
  o.bfgs_iterations = 1;
  o.fixed_point_iters = 1;
  o.polish_iterations = 0;
  const auto r = try_reference_solve(spec, o);
  EXPECT_FALSE(r.converged);
  try {
    reference_solve(spec, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoConvergence);
  }
}
