#include <fstream>
#include <random>

#include "doctest.h"
#include "ganterp/error.hpp"
#include "ganterp/trajectory.hpp"
#include "test_support.hpp"
#include "trajectory_gen.hpp"

using namespace ganterp;
using namespace ganterp::testing;
using nlohmann::json;

namespace {

std::string field_of(const std::string& text) {
  try {
    trajectory_from_json(text);
  } catch (const TrajectoryError& e) {
    CHECK(e.code() == ErrorCode::kMalformedTrajectory);
    return e.field();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("trajectory: random documents round-trip exactly") {
  std::mt19937_64 rng(31);
  ScratchDir dir;
  for (int i = 0; i < 100; ++i) {
    const auto t = random_trajectory(rng);
    write_trajectory(t, dir / "t.json");
    CHECK(read_trajectory(dir / "t.json") == t);
    // Writing is a fixed point.
    CHECK(to_json(read_trajectory(dir / "t.json")) == read_file(dir / "t.json"));
  }
}

TEST_CASE("trajectory: layout puts one frame per line") {
  const auto text = to_json(base_trajectory());
  const auto doc = json::parse(text);
  CHECK(doc["format_version"] == 1);
  CHECK(doc["spec"]["image_size"] == json::array({8, 8}));
  CHECK(doc["frames"][1]["class_weights"].size() == 2);
  CHECK(std::count(text.begin(), text.end(), '\n') == 19);
}

TEST_CASE("trajectory: missing alpha_mode reads as cumulative") {
  auto doc = json::parse(to_json(base_trajectory()));
  doc.erase("alpha_mode");
  CHECK(trajectory_from_json(doc.dump()).alpha_mode == AlphaMode::kCumulative);
}

TEST_CASE("trajectory: legacy documents only pin the first frame") {
  auto t = base_trajectory();
  t.alpha_mode = AlphaMode::kLegacyLength;
  t.frames.back() = mix_keyframes(t.keyframes[0], t.keyframes[1], 0.6);
  CHECK(trajectory_from_json(to_json(t)) == t);
  t.alpha_mode = AlphaMode::kCumulative;
  CHECK_THROWS_AS(validate(t), TrajectoryError);
}

TEST_CASE("trajectory: every mutation names its field") {
  const auto base = json::parse(to_json(base_trajectory()));
  for (const auto& m : trajectory_mutations()) {
    CAPTURE(m.description);
    json doc = base;
    m.apply(doc);
    CHECK(field_of(doc.dump()) == m.field);
  }
}

TEST_CASE("trajectory: weight sum message reports the frame") {
  auto doc = json::parse(to_json(base_trajectory()));
  doc["frames"][2]["class_weights"] = {{"1", 0.4}, {"4", 0.5}};
  try {
    trajectory_from_json(doc.dump());
    FAIL("expected MalformedTrajectory");
  } catch (const TrajectoryError& e) {
    CHECK(e.field() == "frames[2].class_weights");
    CHECK(std::string(e.what()).find("frames[2].class_weights") != std::string::npos);
    CHECK(std::string(e.what()).find("0.9") != std::string::npos);
  }
}

TEST_CASE("trajectory: unreadable inputs") {
  ScratchDir dir;
  CHECK(field_of("") == "$");
  CHECK(field_of("[1, 2]") == "$");
  CHECK(field_of("{\"format_version\": 1") == "$");
  CHECK(field_of("{}") == "format_version");
  CHECK_THROWS_AS(read_trajectory(dir / "nope.json"), Error);

  std::ofstream(dir / "empty.json").close();
  try {
    read_trajectory(dir / "empty.json");
    FAIL("expected MalformedTrajectory");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMalformedTrajectory);
  }
}

TEST_CASE("trajectory: version mismatch is its own error") {
  for (int v : {0, 2, 99}) {
    auto doc = json::parse(to_json(base_trajectory()));
    doc["format_version"] = v;
    try {
      trajectory_from_json(doc.dump());
      FAIL("expected VersionMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kVersionMismatch);
    }
  }
}

TEST_CASE("trajectory: writer refuses invalid plans") {
  auto t = base_trajectory();
  t.frames[1].class_weights = {{4, 0.5}, {1, 0.5}};
  CHECK_THROWS_AS(to_json(t), TrajectoryError);
  t = base_trajectory();
  t.keyframes[1].slice_index = 2;
  CHECK_THROWS_AS(to_json(t), TrajectoryError);
  t = base_trajectory();
  t.frames.resize(1);
  CHECK_THROWS_AS(to_json(t), TrajectoryError);
}

TEST_CASE("trajectory: seeds survive the full 64-bit range") {
  auto t = base_trajectory();
  for (std::uint64_t seed : {0ull, 1ull, (1ull << 63) + 5, ~0ull}) {
    t.seed = seed;
    CHECK(trajectory_from_json(to_json(t)).seed == seed);
  }
}

TEST_CASE("sha256 of files") {
  ScratchDir dir;
  write_bytes(dir / "abc", {'a', 'b', 'c'});
  CHECK(sha256_file(dir / "abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  write_bytes(dir / "empty", {});
  CHECK(sha256_file(dir / "empty") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK_THROWS_AS(sha256_file(dir / "missing"), Error);
}
