// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "fermat/baselines.hpp"
#include "fermat/error.hpp"
#include "fermat/scene_io.hpp"
#include "fermat/validation.hpp"

#include "oracles.hpp"

using namespace fermat;

TEST(SceneParams, RoundTrip) {
  const auto spec = gen_scenes(20, 3, SceneKinds::Mixed, 1)[0];
  const auto theta = scene_params(spec);
  ASSERT_EQ(theta.size(), 9 * 3 + 6);
  EXPECT_EQ(format_scene(with_scene_params(spec, theta)), format_scene(spec));
  EXPECT_EQ(theta.segment<3>(6), spec.surface(0).anchor());
  EXPECT_EQ(theta.tail<3>(), spec.end());
}

TEST(SceneParams, FreeMaskSkipsEdgeSecondColumn) {
  const auto spec = gen_scenes(21, 2, SceneKinds::Mixed, 1)[0];
  const auto free = free_scene_params(spec);
  ASSERT_EQ(free.size(), 24u);
  for (std::size_t j = 0; j < free.size(); ++j) {
    const bool edge_column = j >= 12 && j < 15;
    EXPECT_EQ(free[j], !edge_column) << j;
  }
}

TEST(FdSolutionVjp, FixedEntriesAreZero) {
  const auto spec = gen_scenes(22, 2, SceneKinds::DiffractionsOnly, 1)[0];
  const auto T = reference_solve(spec);
  const auto g = fd_solution_vjp(spec, T, oracle::ones(2)).flatten();
  const auto free = free_scene_params(spec);
  for (std::size_t j = 0; j < free.size(); ++j) {
    if (!free[j]) {
      EXPECT_EQ(g(static_cast<Eigen::Index>(j)), 0.0);
    }
  }
}

TEST(GradCheck, SingleReflectionPasses) {
  const auto r = grad_check(1, 1, SceneKinds::ReflectionsOnly, 5);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.cases.size(), 5u);
  EXPECT_LT(r.max_rel_error, 1e-3);
}

TEST(GradCheck, MixedFourPasses) {
  const auto r = grad_check(2, 4, SceneKinds::Mixed, 4);
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.max_envelope_error, 1e-6);
}

TEST(GradCheck, ZeroCountRejected) {
  try {
    grad_check(0, 1, SceneKinds::Mixed, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(GradCheck, TightToleranceFails) {
  GradCheckOptions o;
  o.tolerance = 1e-15;
  EXPECT_FALSE(grad_check(3, 2, SceneKinds::Mixed, 2, o).pass);
}
