// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "fermat/geometry.hpp"

namespace fermat {

/// JSON scene document:
///   {"start": [x, y, z], "end": [x, y, z],
///    "surfaces": [{"kind": "plane" | "edge", "anchor": [x, y, z],
///                  "basis": [[a, b], [c, d], [e, f]]}, ...]}
/// `basis` lists the three rows of the 3x2 matrix. Malformed documents throw
/// ParseError; well-formed but invalid geometry throws the geometry error.
PathSpec parse_scene(std::string_view text);

/// Round-trips exactly: doubles are written with full precision.
std::string format_scene(const PathSpec& spec);

PathSpec read_scene_file(const std::filesystem::path& path);
void write_scene_file(const std::filesystem::path& path, const PathSpec& spec);

}  // namespace fermat
