// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fermat/geometry.hpp"

namespace fermat {

enum class SceneKinds { ReflectionsOnly, DiffractionsOnly, Mixed };

std::string_view to_string(SceneKinds kinds);
/// Accepts "reflections", "diffractions", "mixed".
SceneKinds parse_scene_kinds(std::string_view text);

struct SceneParams {
  /// Endpoints are uniform in [0, box_side]^3.
  double box_side = 10.0;
  /// Anchors sit within this lateral distance of the start-end segment.
  double lateral_jitter = 2.0;
  /// Anchors closer than this to either endpoint are redrawn.
  double endpoint_exclusion = 0.1;
  /// Endpoint pairs closer than this are redrawn.
  double min_endpoint_separation = 1.0;
  /// Reflection-only scenes are redrawn until every bounce has both
  /// neighbours on the same side of its plane, so the specular path is the
  /// length minimizer.
  bool require_valid_reflections = true;
  /// Scenes are redrawn unless every segment of the minimizing path (image
  /// method for reflections, reference solver otherwise) is at least this
  /// long. An unbounded edge pierces an unbounded plane, and the minimizer
  /// can collapse onto that crossing point.
  double min_segment_length = 0.1;
};

/// Deterministic in (seed, n, kinds, batch, params); Mixed alternates plane, edge, plane, ...
std::vector<PathSpec> gen_scenes(std::uint64_t seed, std::size_t n, SceneKinds kinds,
                                 std::size_t batch, const SceneParams& params = {});

/// True when the image-method path of an all-plane spec is a genuine
/// reflection path (each interaction point keeps its neighbours on one side).
bool is_valid_reflection_path(const PathSpec& spec);

/// True when the reference solver converges and no segment of its path is
/// shorter than `min_segment_length`.
bool has_regular_minimizer(const PathSpec& spec, double min_segment_length);

}  // namespace fermat
