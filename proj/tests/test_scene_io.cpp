// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "fermat/error.hpp"
#include "fermat/scene_io.hpp"
#include "fermat/scenes.hpp"

using namespace fermat;

namespace {

ErrorCode parse_code(const std::string& text) {
  try {
    parse_scene(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "parsed: " << text;
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(SceneIo, RoundTripIsExact) {
  for (const auto& spec : gen_scenes(4, 5, SceneKinds::Mixed, 10)) {
    const PathSpec back = parse_scene(format_scene(spec));
    ASSERT_EQ(back.size(), spec.size());
    EXPECT_EQ(back.start(), spec.start());
    EXPECT_EQ(back.end(), spec.end());
    for (std::size_t i = 0; i < spec.size(); ++i) {
      EXPECT_EQ(back.surface(i).kind(), spec.surface(i).kind());
      EXPECT_EQ(back.surface(i).basis(), spec.surface(i).basis());
      EXPECT_EQ(back.surface(i).anchor(), spec.surface(i).anchor());
    }
  }
}

TEST(SceneIo, HandWrittenDocument) {
  const PathSpec s = parse_scene(R"({"start":[0,-1,1],"end":[0,1,1],
    "surfaces":[{"kind":"plane","anchor":[0,0,0],"basis":[[1,0],[0,1],[0,0]]},
                {"kind":"edge","anchor":[0,0,2],"basis":[[1,0],[0,0],[0,0]]}]})");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.surface(0).kind(), SurfaceKind::Plane);
  EXPECT_EQ(s.surface(1).kind(), SurfaceKind::Edge);
  EXPECT_EQ(s.surface(1).anchor(), Vec3d(0, 0, 2));
}

TEST(SceneIo, MalformedDocuments) {
  EXPECT_EQ(parse_code("{"), ErrorCode::ParseError);
  EXPECT_EQ(parse_code("[]"), ErrorCode::ParseError);
  EXPECT_EQ(parse_code(R"({"start":[0,0,0],"end":[1,0,0]})"), ErrorCode::ParseError);
  EXPECT_EQ(parse_code(R"({"start":[0,0],"end":[1,0,0],"surfaces":[]})"), ErrorCode::ParseError);
  EXPECT_EQ(parse_code(R"({"start":[0,0,"x"],"end":[1,0,0],"surfaces":[]})"),
            ErrorCode::ParseError);
  EXPECT_EQ(parse_code(R"({"start":[0,0,1],"end":[1,0,1],"surfaces":[
    {"kind":"mirror","anchor":[0,0,0],"basis":[[1,0],[0,1],[0,0]]}]})"),
            ErrorCode::ParseError);
  EXPECT_EQ(parse_code(R"({"start":[0,0,1],"end":[1,0,1],"surfaces":[
    {"kind":"plane","anchor":[0,0,0],"basis":[[1,0],[0,1]]}]})"),
            ErrorCode::ParseError);
}

TEST(SceneIo, InvalidGeometryKeepsItsCode) {
  EXPECT_EQ(parse_code(R"({"start":[0,0,1],"end":[1,0,1],"surfaces":[
    {"kind":"plane","anchor":[0,0,0],"basis":[[1,2],[0,0],[0,0]]}]})"),
            ErrorCode::DegenerateBasis);
  EXPECT_EQ(parse_code(R"({"start":[0,0,1],"end":[1,0,1],"surfaces":[
    {"kind":"edge","anchor":[0,0,0],"basis":[[1,0.5],[0,0],[0,0]]}]})"),
            ErrorCode::DegenerateBasis);
}

TEST(SceneIo, Files) {
  const auto dir = std::filesystem::temp_directory_path() / "fermat_scene_io_test";
  std::filesystem::create_directories(dir);
  const auto spec = gen_scenes(8, 2, SceneKinds::Mixed, 1)[0];
  write_scene_file(dir / "a.json", spec);
  EXPECT_EQ(format_scene(read_scene_file(dir / "a.json")), format_scene(spec));
  EXPECT_THROW(read_scene_file(dir / "missing.json"), Error);
  EXPECT_THROW(write_scene_file(dir / "no" / "such" / "dir.json", spec), Error);
  std::filesystem::remove_all(dir);
}
