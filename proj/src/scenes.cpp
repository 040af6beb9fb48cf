// SPDX-License-Identifier: Apache-2.0
#include "fermat/scenes.hpp"

#include <cmath>
#include <random>

#include "fermat/baselines.hpp"

namespace fermat {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class SceneSampler {
 public:
  SceneSampler(std::uint64_t seed, const SceneParams& params) : rng_(seed), params_(params) {}

  Vec3d in_box() {
    std::uniform_real_distribution<double> u(0.0, params_.box_side);
    return {u(rng_), u(rng_), u(rng_)};
  }

  Vec3d on_sphere() {
    std::normal_distribution<double> g;
    Vec3d v;
    do {
      v = {g(rng_), g(rng_), g(rng_)};
    } while (v.norm() < 1e-6);
    return v.normalized();
  }

  /// Uniform in the disc of radius `radius` orthogonal to `axis`.
  Vec3d lateral(const Vec3d& axis, double radius) {
    const Vec3d a = axis.normalized();
    Vec3d e1;
    do {
      e1 = on_sphere();
      e1 -= e1.dot(a) * a;
    } while (e1.norm() < 1e-3);
    e1.normalize();
    const Vec3d e2 = a.cross(e1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = radius * std::sqrt(u(rng_));
    const double phi = 2.0 * M_PI * u(rng_);
    return r * (std::cos(phi) * e1 + std::sin(phi) * e2);
  }

  Surface surface(SurfaceKind kind, const Vec3d& start, const Vec3d& end, std::size_t i,
                  std::size_t n) {
    const Vec3d axis = end - start;
    const Vec3d centre = start + axis * (static_cast<double>(i + 1) / static_cast<double>(n + 1));
    Vec3d anchor;
    do {
      anchor = centre + lateral(axis, params_.lateral_jitter);
    } while ((anchor - start).norm() < params_.endpoint_exclusion ||
             (anchor - end).norm() < params_.endpoint_exclusion);
    if (kind == SurfaceKind::Edge) return make_edge(anchor, on_sphere());
    const Vec3d u = on_sphere();
    Vec3d v;
    do {
      v = on_sphere();
      v -= v.dot(u) * u;
    } while (v.norm() < 1e-3);
    return make_plane(anchor, u, v.normalized());
  }

 private:
  std::mt19937_64 rng_;
  SceneParams params_;
};

SurfaceKind kind_at(SceneKinds kinds, std::size_t i) {
  switch (kinds) {
    case SceneKinds::ReflectionsOnly: return SurfaceKind::Plane;
    case SceneKinds::DiffractionsOnly: return SurfaceKind::Edge;
    case SceneKinds::Mixed: return i % 2 == 0 ? SurfaceKind::Plane : SurfaceKind::Edge;
  }
  return SurfaceKind::Plane;
}

}  // namespace

std::string_view to_string(SceneKinds kinds) {
  switch (kinds) {
    case SceneKinds::ReflectionsOnly: return "reflections";
    case SceneKinds::DiffractionsOnly: return "diffractions";
    case SceneKinds::Mixed: return "mixed";
  }
  return "unknown";
}

SceneKinds parse_scene_kinds(std::string_view text) {
  if (text == "reflections") return SceneKinds::ReflectionsOnly;
  if (text == "diffractions") return SceneKinds::DiffractionsOnly;
  if (text == "mixed") return SceneKinds::Mixed;
  throw Error(ErrorCode::InvalidArgument, "unknown scene kinds '" + std::string(text) + "'");
}

bool is_valid_reflection_path(const PathSpec& spec) {
  std::vector<Vec3d> points;
  try {
    points = image_method(spec);
  } catch (const Error&) {
    return false;
  }
  points.insert(points.begin(), spec.start());
  points.push_back(spec.end());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& basis = spec.surface(i).basis();
    const Vec3d normal = basis.col(0).cross(basis.col(1)).normalized();
    const double before = (points[i] - points[i + 1]).dot(normal);
    const double after = (points[i + 2] - points[i + 1]).dot(normal);
    // Grazing bounces are rejected along with crossings.
    const double margin = 1e-3 * spec.scale();
    if (!(before * after > 0.0) || std::abs(before) < margin || std::abs(after) < margin) {
      return false;
    }
  }
  return true;
}

namespace {

bool segments_at_least(const std::vector<Vec3d>& points, double min_segment_length) {
  for (std::size_t j = 0; j + 1 < points.size(); ++j) {
    if ((points[j + 1] - points[j]).norm() < min_segment_length) return false;
  }
  return true;
}

}  // namespace

bool has_regular_minimizer(const PathSpec& spec, double min_segment_length) {
  try {
    const auto ref = try_reference_solve(spec);
    return ref.converged && segments_at_least(embed(spec, ref.solution), min_segment_length);
  } catch (const Error&) {
    return false;
  }
}

std::vector<PathSpec> gen_scenes(std::uint64_t seed, std::size_t n, SceneKinds kinds,
                                 std::size_t batch, const SceneParams& params) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "scenes need at least one interaction");
  const std::uint64_t cell = splitmix64(splitmix64(seed) ^ splitmix64(
                                            (static_cast<std::uint64_t>(n) << 8) |
                                            static_cast<std::uint64_t>(kinds)));
  SceneSampler sampler(cell, params);
  const bool validate =
      params.require_valid_reflections && kinds == SceneKinds::ReflectionsOnly;

  std::vector<PathSpec> scenes;
  scenes.reserve(batch);
  while (scenes.size() < batch) {
    Vec3d start;
    Vec3d end;
    do {
      start = sampler.in_box();
      end = sampler.in_box();
    } while ((end - start).norm() < params.min_endpoint_separation);
    // Bounded retries per endpoint pair; a hopeless pair is simply redrawn.
    for (int attempt = 0; attempt < 1000; ++attempt) {
      std::vector<Surface> surfaces;
      surfaces.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        surfaces.push_back(sampler.surface(kind_at(kinds, i), start, end, i, n));
      }
      PathSpec spec(start, end, std::move(surfaces));
      bool ok = false;
      if (kinds == SceneKinds::ReflectionsOnly) {
        ok = !validate || is_valid_reflection_path(spec);
        if (ok) {
          auto points = image_method(spec);
          points.insert(points.begin(), spec.start());
          points.push_back(spec.end());
          ok = segments_at_least(points, params.min_segment_length);
        }
      } else {
        ok = has_regular_minimizer(spec, params.min_segment_length);
      }
      if (ok) {
        scenes.push_back(std::move(spec));
        break;
      }
    }
  }
  return scenes;
}

}  // namespace fermat
