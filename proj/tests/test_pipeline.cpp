#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "ganterp/error.hpp"
#include "ganterp/generator.hpp"
#include "ganterp/pipeline.hpp"
#include "ganterp/process.hpp"
#include "ganterp/trajectory.hpp"
#include "test_support.hpp"

using namespace ganterp;
using namespace ganterp::testing;

namespace {

RunConfig silence_config(const ScratchDir& dir) {
  write_silence_fixture(dir / "silence.wav");
  RunConfig cfg;
  cfg.audio_path = dir / "silence.wav";
  cfg.out_dir = dir / "out";
  cfg.seed = 7;
  cfg.generator.latent_dim = 16;
  cfg.generator.num_classes = 1000;
  cfg.generator.image_size = {24, 16};
  return cfg;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected ganterp::Error");
  return ErrorCode::kIoError;
}

void write_text(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

int cli(const std::vector<std::string>& args, std::string* output = nullptr) {
  std::vector<std::string> argv{GANTERP_CLI_PATH};
  argv.insert(argv.end(), args.begin(), args.end());
  const auto r = run_process(argv);
  if (output) *output = r.output;
  REQUIRE(r.started);
  return r.exit_status;
}

}  // namespace

TEST_CASE("pipeline: silence runs end to end") {
  ScratchDir dir;
  const auto cfg = silence_config(dir);
  const auto report = run_pipeline(cfg);
  CHECK(report.num_slices == 28);
  CHECK(report.num_inflections == 2);
  CHECK(report.frames_written == 28);
  CHECK(report.warnings.empty());
  CHECK_FALSE(report.video_path);

  const auto t = read_trajectory(report.trajectory_path);
  CHECK(t.frames.size() == 28);
  REQUIRE(t.keyframes.size() == 2);
  CHECK(t.keyframes[0].slice_index == 0);
  CHECK(t.keyframes[1].slice_index == 27);
  CHECK(t.seed == 7);
  CHECK(t.audio_sha256 == sha256_file(cfg.audio_path));

  // Zero TV everywhere: the interpolation is an index ramp.
  for (std::size_t i = 0; i < 28; ++i) {
    const double a = static_cast<double>(i) / 27.0;
    for (std::size_t j = 0; j < t.frames[i].z.size(); ++j) {
      const double expected = (1 - a) * t.keyframes[0].z[j] + a * t.keyframes[1].z[j];
      CHECK(t.frames[i].z[j] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  for (std::size_t i = 0; i < 28; ++i) {
    const auto img = read_png(report.frames_dir / frame_file_name(i));
    CHECK(img.width == 24);
    CHECK(img.height == 16);
  }
  CHECK_FALSE(fs::exists(report.frames_dir / frame_file_name(28)));
}

TEST_CASE("pipeline: reruns reproduce the trajectory bytes") {
  ScratchDir dir;
  auto cfg = silence_config(dir);
  run_pipeline(cfg);
  const auto first = read_file(cfg.out_dir / "trajectory.json");
  cfg.out_dir = dir / "again";
  cfg.parallelism = 4;
  run_pipeline(cfg);
  CHECK(read_file(cfg.out_dir / "trajectory.json") == first);
  cfg.seed = 8;
  cfg.out_dir = dir / "other";
  run_pipeline(cfg);
  CHECK(read_file(cfg.out_dir / "trajectory.json") != first);
}

TEST_CASE("pipeline: category pins") {
  ScratchDir dir;
  auto cfg = silence_config(dir);
  write_text(dir / "cats.txt", "# pins\n0 417\n\n5 3  # no such keyframe\n");
  cfg.categories_path = dir / "cats.txt";
  const auto report = run_pipeline(cfg);
  const auto t = read_trajectory(report.trajectory_path);
  CHECK(t.keyframes[0].category == 417);
  CHECK(t.frames[0].class_weights == ClassWeights{{417, 1.0}});
  REQUIRE(report.warnings.size() == 1);
  CHECK(report.warnings[0].find("keyframe 5") != std::string::npos);

  write_text(dir / "bad.txt", "0 99999\n");
  cfg.categories_path = dir / "bad.txt";
  CHECK(code_of([&] { run_pipeline(cfg); }) == ErrorCode::kInvalidCategory);
}

TEST_CASE("load_categories") {
  ScratchDir dir;
  write_text(dir / "empty.txt", "");
  CHECK(load_categories(dir / "empty.txt", 3, 1000) == CategoryPins(3));

  write_text(dir / "two.txt", "0 417\n2 33\n");
  CHECK(load_categories(dir / "two.txt", 3, 1000) == CategoryPins{417, std::nullopt, 33});

  write_text(dir / "range.txt", "0 99999\n");
  CHECK(code_of([&] { load_categories(dir / "range.txt", 3, 1000); }) == ErrorCode::kInvalidCategory);
  CHECK(code_of([&] { load_categories(dir / "two.txt", 2, 1000); }) == ErrorCode::kIndexOutOfRange);

  write_text(dir / "junk.txt", "0 dog\n");
  CHECK(code_of([&] { load_categories(dir / "junk.txt", 3, 1000); }) == ErrorCode::kInvalidArgument);
  write_text(dir / "dup.txt", "1 5\n1 6\n");
  CHECK(code_of([&] { load_categories(dir / "dup.txt", 3, 1000); }) == ErrorCode::kInvalidArgument);
  write_text(dir / "extra.txt", "1 5 6\n");
  CHECK(code_of([&] { load_categories(dir / "extra.txt", 3, 1000); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { load_categories(dir / "missing.txt", 3, 1000); }) == ErrorCode::kFileNotFound);
}

TEST_CASE("pipeline: errors carry their stage") {
  ScratchDir dir;
  auto cfg = silence_config(dir);
  cfg.audio_path = dir / "missing.wav";
  try {
    run_pipeline(cfg);
    FAIL("expected FileNotFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kFileNotFound);
    CHECK(e.stage() == "decode");
  }

  cfg = silence_config(dir);
  cfg.window_samples = 1000;
  CHECK(code_of([&] { run_pipeline(cfg); }) == ErrorCode::kInvalidArgument);

  write_pcm16_wav(dir / "short.wav", std::vector<std::int16_t>(1000, 0), 22050);
  cfg = silence_config(dir);
  cfg.audio_path = dir / "short.wav";
  try {
    run_pipeline(cfg);
    FAIL("expected AudioTooShort");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kAudioTooShort);
    CHECK(e.stage() == "spectrogram");
  }
}

TEST_CASE("pipeline: encoder invocation") {
  ScratchDir dir;
  auto cfg = silence_config(dir);
  cfg.encode = true;
  cfg.encoder_command = {"false"};
  try {
    run_pipeline(cfg);
    FAIL("expected EncoderFailed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEncoderFailed);
    CHECK(e.stage() == "encode");
  }
  // Frames are still on disk for a manual retry.
  CHECK(fs::exists(cfg.out_dir / "frames" / frame_file_name(27)));

  cfg.encoder_command = {"sh", "-c", "echo \"$1 $2\" > \"$3\"", "enc", "{fps}", "{frames}", "{output}"};
  const auto report = run_pipeline(cfg);
  REQUIRE(report.video_path);
  CHECK(read_file(*report.video_path) == "30 " + (cfg.out_dir / "frames").string() + "\n");
}

TEST_CASE("pipeline: external backend through the stub renderer") {
  ScratchDir dir;
  auto cfg = silence_config(dir);
  const auto mock = run_pipeline(cfg);
  cfg.out_dir = dir / "ext";
  cfg.backend = BackendSelector::parse(std::string("external:") + STUB_RENDERER_PATH);
  const auto ext = run_pipeline(cfg);
  REQUIRE(ext.frames_written == 28);
  for (std::size_t i = 0; i < 28; ++i) {
    CHECK(read_file(ext.frames_dir / frame_file_name(i)) == read_file(mock.frames_dir / frame_file_name(i)));
  }
}

TEST_CASE("backend selector parsing") {
  CHECK(BackendSelector::parse("mock").kind == BackendSelector::Kind::kMock);
  const auto ext = BackendSelector::parse("external:/opt/r.py");
  CHECK(ext.kind == BackendSelector::Kind::kExternal);
  CHECK(ext.executable == "/opt/r.py");
  CHECK_THROWS_AS(BackendSelector::parse("external:"), Error);
  CHECK_THROWS_AS(BackendSelector::parse("biggan"), Error);
}

TEST_CASE("analysis dump has one row per slice") {
  ScratchDir dir;
  auto cfg = silence_config(dir);
  cfg.dump_analysis = dir / "table.tsv";
  const auto result = analyze_audio(cfg);
  std::ifstream in(dir / "table.tsv");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) rows += !line.empty() && line[0] != '#';
  CHECK(rows == result.num_slices);
  CHECK(rows == 28);
}

TEST_CASE("cli: exit codes and outputs") {
  ScratchDir dir;
  write_silence_fixture(dir / "s.wav");
  const std::string wav = (dir / "s.wav").string();
  std::string out;

  CHECK(cli({"--help"}) == 0);
  CHECK(cli({}, &out) != 0);
  CHECK(cli({"run", "--audio", wav}) == 2);
  CHECK(cli({"run", "--bogus"}) == 2);

  CHECK(cli({"run", "--audio", wav, "--out", (dir / "o").string(), "--seed", "7", "--latent-dim", "8", "--width",
             "8", "--height", "8"},
            &out) == 0);
  CHECK(out.find("frames: 28") != std::string::npos);
  CHECK(fs::exists(dir / "o" / "trajectory.json"));

  CHECK(cli({"render", "--trajectory", (dir / "o" / "trajectory.json").string(), "--out", (dir / "r").string()},
            &out) == 0);
  for (std::size_t i = 0; i < 28; ++i) {
    CHECK(read_file(dir / "r" / frame_file_name(i)) == read_file(dir / "o" / "frames" / frame_file_name(i)));
  }

  CHECK(cli({"analyze", "--audio", wav}, &out) == 0);
  CHECK(out.find("27\t-\t1\t1") != std::string::npos);

  CHECK(cli({"run", "--audio", (dir / "nope.wav").string(), "--out", (dir / "x").string()}) ==
        exit_code(ErrorCode::kFileNotFound));
  write_text(dir / "cats.txt", "0 99999\n");
  CHECK(cli({"run", "--audio", wav, "--out", (dir / "x").string(), "--categories", (dir / "cats.txt").string()},
            &out) == exit_code(ErrorCode::kInvalidCategory));
  CHECK(out.find("99999") != std::string::npos);
  CHECK(cli({"run", "--audio", wav, "--out", (dir / "x").string(), "--backend", "external:/nonexistent/r"}) ==
        exit_code(ErrorCode::kBackendUnavailable));
  write_text(dir / "bad.json", "{");
  CHECK(cli({"render", "--trajectory", (dir / "bad.json").string(), "--out", (dir / "y").string()}) ==
        exit_code(ErrorCode::kMalformedTrajectory));
  CHECK(cli({"run", "--audio", wav, "--out", (dir / "x").string(), "--latent-dim", "4", "--width", "4", "--height",
             "4", "--encode", "--encoder-cmd", "false"}) == exit_code(ErrorCode::kEncoderFailed));
}

TEST_CASE("exit codes are distinct") {
  std::set<int> seen;
  for (int c = 0; c <= static_cast<int>(ErrorCode::kEncoderFailed); ++c) {
    const int code = exit_code(static_cast<ErrorCode>(c));
    CHECK(code > 2);
    CHECK(seen.insert(code).second);
  }
}
