// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "fermat/baselines.hpp"
#include "fermat/error.hpp"
#include "fermat/scenes.hpp"
#include "fermat/scene_io.hpp"

using namespace fermat;

TEST(GenScenes, Deterministic) {
  const auto a = gen_scenes(5, 3, SceneKinds::Mixed, 20);
  const auto b = gen_scenes(5, 3, SceneKinds::Mixed, 20);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(format_scene(a[i]), format_scene(b[i]));
  EXPECT_NE(format_scene(a[0]), format_scene(gen_scenes(6, 3, SceneKinds::Mixed, 1)[0]));
}

TEST(GenScenes, KindsFollowRequest) {
  for (const auto& s : gen_scenes(1, 4, SceneKinds::ReflectionsOnly, 5)) {
    for (const auto& f : s.surfaces()) EXPECT_EQ(f.kind(), SurfaceKind::Plane);
  }
  for (const auto& s : gen_scenes(1, 4, SceneKinds::DiffractionsOnly, 5)) {
    for (const auto& f : s.surfaces()) EXPECT_EQ(f.kind(), SurfaceKind::Edge);
  }
  for (const auto& s : gen_scenes(1, 5, SceneKinds::Mixed, 5)) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_EQ(s.surface(i).kind(), i % 2 == 0 ? SurfaceKind::Plane : SurfaceKind::Edge);
    }
  }
}

TEST(GenScenes, GeometryRules) {
  const SceneParams p;
  for (std::size_t n = 1; n <= 5; ++n) {
    for (const auto kinds : {SceneKinds::ReflectionsOnly, SceneKinds::DiffractionsOnly,
                             SceneKinds::Mixed}) {
      for (const auto& s : gen_scenes(2, n, kinds, 20)) {
        EXPECT_GE((s.end() - s.start()).norm(), p.min_endpoint_separation);
        for (int c = 0; c < 3; ++c) {
          EXPECT_GE(s.start()(c), 0.0);
          EXPECT_LE(s.end()(c), p.box_side);
        }
        for (const auto& f : s.surfaces()) {
          EXPECT_GE((f.anchor() - s.start()).norm(), p.endpoint_exclusion);
          EXPECT_GE((f.anchor() - s.end()).norm(), p.endpoint_exclusion);
        }
        if (kinds == SceneKinds::ReflectionsOnly) {
          EXPECT_TRUE(is_valid_reflection_path(s));
        }
      }
    }
  }
}

TEST(GenScenes, ReferenceConvergesAlmostAlways) {
  std::size_t converged = 0;
  std::size_t total = 0;
  for (std::size_t n = 1; n <= 5; ++n) {
    for (const auto& s : gen_scenes(3, n, SceneKinds::ReflectionsOnly, 200)) {
      converged += try_reference_solve(s).converged ? 1 : 0;
      ++total;
    }
  }
  EXPECT_GE(converged, total * 99 / 100);
}

TEST(GenScenes, Errors) {
  EXPECT_THROW(gen_scenes(0, 0, SceneKinds::Mixed, 1), Error);
  EXPECT_TRUE(gen_scenes(0, 2, SceneKinds::Mixed, 0).empty());
  EXPECT_EQ(parse_scene_kinds("diffractions"), SceneKinds::DiffractionsOnly);
  EXPECT_EQ(to_string(SceneKinds::Mixed), "mixed");
  EXPECT_THROW(parse_scene_kinds("planes"), Error);
}
