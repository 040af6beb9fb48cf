// SPDX-License-Identifier: Apache-2.0
#include "fermat/scene_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "fermat/error.hpp"

namespace fermat {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where + " is not an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where + " has no '" + key + "'");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where + " is not a number");
  return v.get<double>();
}

Vec3d vec3(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) fail(where + " must be an array of 3 numbers");
  return {number(v[0], where), number(v[1], where), number(v[2], where)};
}

BasisMatrix<double> basis(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) fail(where + " must have 3 rows");
  BasisMatrix<double> A;
  for (int r = 0; r < 3; ++r) {
    const json& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != 2) fail(where + " rows must have 2 numbers");
    A(r, 0) = number(row[0], where);
    A(r, 1) = number(row[1], where);
  }
  return A;
}

json to_json(const Vec3d& v) { return json::array({v(0), v(1), v(2)}); }

}  // namespace

PathSpec parse_scene(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  const Vec3d start = vec3(field(doc, "start", "scene"), "start");
  const Vec3d end = vec3(field(doc, "end", "scene"), "end");
  const json& list = field(doc, "surfaces", "scene");
  if (!list.is_array()) fail("surfaces must be an array");

  std::vector<Surface> surfaces;
  surfaces.reserve(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "surfaces[" + std::to_string(i) + "]";
    const json& kind = field(list[i], "kind", where);
    if (!kind.is_string()) fail(where + ".kind must be a string");
    const auto name = kind.get<std::string>();
    SurfaceKind k;
    if (name == "plane") {
      k = SurfaceKind::Plane;
    } else if (name == "edge") {
      k = SurfaceKind::Edge;
    } else {
      fail(where + ".kind must be \"plane\" or \"edge\", got \"" + name + "\"");
    }
    surfaces.push_back(Surface::from_parts(k, basis(field(list[i], "basis", where), where + ".basis"),
                                           vec3(field(list[i], "anchor", where), where + ".anchor")));
  }
  return PathSpec(start, end, std::move(surfaces));
}

std::string format_scene(const PathSpec& spec) {
  json doc;
  doc["start"] = to_json(spec.start());
  doc["end"] = to_json(spec.end());
  json list = json::array();
  for (const auto& s : spec.surfaces()) {
    const auto& A = s.basis();
    json rows = json::array();
    for (int r = 0; r < 3; ++r) rows.push_back(json::array({A(r, 0), A(r, 1)}));
    list.push_back({{"kind", s.kind() == SurfaceKind::Plane ? "plane" : "edge"},
                    {"anchor", to_json(s.anchor())},
                    {"basis", rows}});
  }
  doc["surfaces"] = list;
  return doc.dump(2) + "\n";
}

PathSpec read_scene_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str());
}

void write_scene_file(const std::filesystem::path& path, const PathSpec& spec) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << format_scene(spec);
  if (!out) throw Error(ErrorCode::InvalidArgument, "write failed for " + path.string());
}

}  // namespace fermat
