// ganterp: audio-driven latent walks through a class-conditional generator.

#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "ganterp/analysis.hpp"
#include "ganterp/error.hpp"
#include "ganterp/pipeline.hpp"

namespace {

using ganterp::RunConfig;

void add_analysis_options(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("--audio", cfg.audio_path, "Input WAV file (PCM16 or float32, mono or stereo)")->required();
  cmd.add_option("--fps", cfg.fps, "Video frame rate; one spectrogram slice per frame")->capture_default_str();
  cmd.add_option("--window", cfg.window_samples, "STFT window length in samples (power of two)")
      ->capture_default_str();
  cmd.add_option("--rolling-length", cfg.rolling_length, "Rolling window length L in slices")
      ->capture_default_str();
  cmd.add_option("--delta", cfg.delta, "Inflection threshold on the TV scale")->capture_default_str();
  cmd.add_flag_callback("--no-normalize-tv", [&cfg] { cfg.normalize_tv = false; },
                        "Keep raw TV magnitudes instead of scaling to [0, 1]");
  cmd.add_flag("--legacy-alpha-division", cfg.legacy_alpha_division,
               "Divide cumulative TV by segment length instead of segment total");
}

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

int report_error(const ganterp::Error& e) {
  std::cerr << "ganterp: " << e.what() << '\n';
  return ganterp::exit_code(e.code());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate a latent-space video plan that follows an audio recording's spectral changes"};
  app.require_subcommand(1);

  RunConfig cfg;
  cfg.parallelism = std::max(1u, std::thread::hardware_concurrency());
  std::string backend = "mock";
  std::string encoder;
  std::string dump_path;
  double truncation = 0.0;
  std::filesystem::path trajectory_path;
  std::filesystem::path out_dir;

  auto* run = app.add_subcommand("run", "Analyse audio, plan the latent path, write the trajectory and frames");
  add_analysis_options(*run, cfg);
  run->add_option("--out", cfg.out_dir, "Output directory")->required();
  run->add_option("--seed", cfg.seed, "Seed for every random draw")->capture_default_str();
  run->add_option("--categories", cfg.categories_path, "File of \"<keyframe_index> <category_id>\" pins");
  run->add_option("--backend", backend, "mock | external:<renderer executable>")->capture_default_str();
  auto* trunc_opt = run->add_option("--truncation", truncation, "Truncation threshold in (0, 2]");
  run->add_option("--latent-dim", cfg.generator.latent_dim, "Generator latent dimension")->capture_default_str();
  run->add_option("--num-classes", cfg.generator.num_classes, "Generator category count")->capture_default_str();
  run->add_option("--width", cfg.generator.image_size.width, "Frame width")->capture_default_str();
  run->add_option("--height", cfg.generator.image_size.height, "Frame height")->capture_default_str();
  run->add_option("--parallelism", cfg.parallelism, "Render threads (mock backend)");
  run->add_flag("--encode", cfg.encode, "Mux frames and audio into out/video.mp4 with an external encoder");
  run->add_option("--encoder-cmd", encoder,
                  "Encoder command template; {fps} {frames} {audio} {output} are substituted");
  run->add_option("--dump-analysis", dump_path, "Write the per-slice analysis table to FILE");

  auto* analyze = app.add_subcommand("analyze", "Stop after the alpha track and print the analysis table");
  add_analysis_options(*analyze, cfg);
  analyze->add_option("--dump-analysis", dump_path, "Write the table to FILE instead of stdout");

  auto* render = app.add_subcommand("render", "Render an existing trajectory file");
  render->add_option("--trajectory", trajectory_path, "Trajectory JSON")->required();
  render->add_option("--out", out_dir, "Frame output directory")->required();
  render->add_option("--backend", backend, "mock | external:<renderer executable>")->capture_default_str();
  render->add_option("--parallelism", cfg.parallelism, "Render threads (mock backend)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (!dump_path.empty()) cfg.dump_analysis = dump_path;
    if (*trunc_opt) cfg.generator.truncation = truncation;
    if (!encoder.empty()) cfg.encoder_command = split_words(encoder);

    if (*run) {
      cfg.backend = ganterp::BackendSelector::parse(backend);
      const auto report = ganterp::run_pipeline(cfg);
      for (const auto& w : report.warnings) std::cerr << "ganterp: warning: " << w << '\n';
      std::cout << "slices: " << report.num_slices << '\n'
                << "inflections: " << report.num_inflections << '\n'
                << "frames: " << report.frames_written << '\n'
                << "trajectory: " << report.trajectory_path.string() << '\n'
                << "frames_dir: " << report.frames_dir.string() << '\n';
      if (report.video_path) std::cout << "video: " << report.video_path->string() << '\n';
    } else if (*analyze) {
      const auto result = ganterp::analyze_audio(cfg);
      if (!cfg.dump_analysis) ganterp::write_analysis_table(std::cout, result.tv, result.inflections, result.alphas);
      std::cerr << "slices: " << result.num_slices << ", inflections: " << result.inflections.indices.size()
                << '\n';
    } else if (*render) {
      const auto frames = ganterp::render_trajectory_file(trajectory_path, out_dir,
                                                          ganterp::BackendSelector::parse(backend), cfg.parallelism);
      std::cout << "frames: " << frames.size() << '\n';
    }
  } catch (const ganterp::Error& e) {
    return report_error(e);
  } catch (const std::exception& e) {
    std::cerr << "ganterp: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
