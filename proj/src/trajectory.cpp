#include "ganterp/trajectory.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <climits>
#include <cmath>
#include <fstream>
#include <memory>
#include "json.hpp"
#include <sstream>

#include "ganterp/error.hpp"

namespace ganterp {
namespace {

using nlohmann::json;

constexpr double kWeightSumTolerance = 1e-9;

std::string at_index(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

[[noreturn]] void malformed(const std::string& field, const std::string& why) {
  throw TrajectoryError(field, why);
}

// ---- validation ------------------------------------------------------------

void check_vector(const std::vector<double>& z, int dim, const std::string& field) {
  if (z.size() != static_cast<std::size_t>(dim)) {
    malformed(field, "expected " + std::to_string(dim) + " entries, found " + std::to_string(z.size()));
  }
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (!std::isfinite(z[j])) malformed(at_index(field, j), "not a finite number");
  }
}

void check_spec(const GeneratorSpec& spec) {
  if (spec.latent_dim < 1) malformed("spec.d", "must be >= 1");
  if (spec.num_classes < 1) malformed("spec.num_classes", "must be >= 1");
  if (spec.image_size.width < 1 || spec.image_size.height < 1) malformed("spec.image_size", "must be >= 1x1");
  if (spec.truncation && !(*spec.truncation > 0.0 && *spec.truncation <= 2.0)) {
    malformed("spec.truncation", "must lie in (0, 2]");
  }
}

void check_weights(const ClassWeights& weights, int num_classes, const std::string& field) {
  if (weights.empty() || weights.size() > 2) malformed(field, "must have 1 or 2 entries");
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const auto& w = weights[i];
    if (w.category < 0 || w.category >= num_classes) {
      malformed(field, "category " + std::to_string(w.category) + " out of range");
    }
    if (i > 0 && weights[i - 1].category >= w.category) malformed(field, "categories must be distinct and sorted");
    if (!(w.weight >= 0.0 && w.weight <= 1.0)) malformed(field, "weights must lie in [0, 1]");
    sum += w.weight;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    std::ostringstream msg;
    msg << "weights sum to " << sum << ", expected 1";
    malformed(field, msg.str());
  }
}

bool is_hex_digest(const std::string& s) {
  if (s.size() != 64) return false;
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

// ---- JSON field access -----------------------------------------------------

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) malformed(path.empty() ? "$" : path, "expected an object");
  auto it = obj.find(key);
  const std::string field = path.empty() ? key : path + "." + key;
  if (it == obj.end()) malformed(field, "missing");
  return *it;
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

double as_real(const json& v, const std::string& field) {
  if (!v.is_number()) malformed(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) malformed(field, "not a finite number");
  return d;
}

long long as_integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) malformed(field, "expected an integer");
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    malformed(field, "integer out of range");
  }
  return v.get<long long>();
}

int as_int(const json& v, const std::string& field) {
  const long long x = as_integer(v, field);
  if (x < INT32_MIN || x > INT32_MAX) malformed(field, "integer out of range");
  return static_cast<int>(x);
}

std::vector<double> as_vector(const json& v, const std::string& field) {
  if (!v.is_array()) malformed(field, "expected an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_real(v[i], at_index(field, i)));
  return out;
}

GeneratorSpec parse_spec(const json& j) {
  GeneratorSpec spec;
  spec.latent_dim = as_int(require(j, "d", "spec"), "spec.d");
  spec.num_classes = as_int(require(j, "num_classes", "spec"), "spec.num_classes");
  const json& size = require(j, "image_size", "spec");
  if (!size.is_array() || size.size() != 2) malformed("spec.image_size", "expected [width, height]");
  spec.image_size.width = as_int(size[0], "spec.image_size[0]");
  spec.image_size.height = as_int(size[1], "spec.image_size[1]");
  const json& trunc = require(j, "truncation", "spec");
  if (!trunc.is_null()) spec.truncation = as_real(trunc, "spec.truncation");
  return spec;
}

ClassWeights parse_weights(const json& j, const std::string& field) {
  if (!j.is_object()) malformed(field, "expected an object of {\"category\": weight}");
  ClassWeights weights;
  for (const auto& [key, value] : j.items()) {
    std::size_t used = 0;
    int category = 0;
    try {
      category = std::stoi(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != key.size()) malformed(field, "key \"" + key + "\" is not a category id");
    weights.push_back({category, as_real(value, field + "." + key)});
  }
  std::sort(weights.begin(), weights.end(),
            [](const ClassWeight& a, const ClassWeight& b) { return a.category < b.category; });
  return weights;
}

const char* alpha_mode_name(AlphaMode mode) {
  return mode == AlphaMode::kLegacyLength ? "legacy_length" : "cumulative";
}

}  // namespace

void validate(const Trajectory& t) {
  check_spec(t.spec);
  if (!(t.fps > 0.0) || !std::isfinite(t.fps)) malformed("fps", "must be a positive number");
  if (!t.audio_sha256.empty() && !is_hex_digest(t.audio_sha256)) {
    malformed("audio_sha256", "expected 64 lowercase hex digits");
  }

  const std::size_t num_frames = t.frames.size();
  if (num_frames < 2) malformed("frames", "need at least 2 frames");
  if (t.keyframes.size() < 2) malformed("keyframes", "need at least 2 keyframes");

  for (std::size_t i = 0; i < t.keyframes.size(); ++i) {
    const auto& kf = t.keyframes[i];
    const std::string base = at_index("keyframes", i);
    if (i == 0 && kf.slice_index != 0) malformed(base + ".slice_index", "first keyframe must sit at slice 0");
    if (i > 0 && kf.slice_index <= t.keyframes[i - 1].slice_index) {
      malformed(base + ".slice_index", "keyframe slices must be strictly increasing");
    }
    if (i + 1 == t.keyframes.size() && kf.slice_index + 1 != num_frames) {
      malformed(base + ".slice_index", "last keyframe must sit at the final frame " + std::to_string(num_frames - 1));
    }
    check_vector(kf.z, t.spec.latent_dim, base + ".z");
    if (kf.category < 0 || kf.category >= t.spec.num_classes) malformed(base + ".category", "out of range");
  }

  for (std::size_t i = 0; i < num_frames; ++i) {
    const std::string base = at_index("frames", i);
    check_vector(t.frames[i].z, t.spec.latent_dim, base + ".z");
    check_weights(t.frames[i].class_weights, t.spec.num_classes, base + ".class_weights");
  }

  // Keyframe slices render their keyframe exactly. Under the legacy alpha
  // rule segment ends do not reach alpha = 1, so only frame 0 is pinned.
  const std::size_t pinned = t.alpha_mode == AlphaMode::kLegacyLength ? 1 : t.keyframes.size();
  for (std::size_t i = 0; i < pinned; ++i) {
    const auto& kf = t.keyframes[i];
    const auto& frame = t.frames[kf.slice_index];
    const std::string base = at_index("frames", kf.slice_index);
    if (frame.z != kf.z) malformed(base + ".z", "differs from keyframe " + std::to_string(i));
    if (frame.class_weights != ClassWeights{{kf.category, 1.0}}) {
      malformed(base + ".class_weights", "must be {" + std::to_string(kf.category) + ": 1} at keyframe " +
                                             std::to_string(i));
    }
  }
}

std::string to_json(const Trajectory& t) {
  validate(t);

  json spec = {{"d", t.spec.latent_dim},
               {"num_classes", t.spec.num_classes},
               {"image_size", {t.spec.image_size.width, t.spec.image_size.height}},
               {"truncation", t.spec.truncation ? json(*t.spec.truncation) : json(nullptr)}};

  // One keyframe or frame per line keeps large files diffable.
  std::ostringstream out;
  out << "{\n";
  out << "  \"format_version\": " << kTrajectoryFormatVersion << ",\n";
  out << "  \"tool_version\": " << json(t.tool_version).dump() << ",\n";
  out << "  \"spec\": " << spec.dump() << ",\n";
  out << "  \"fps\": " << json(t.fps).dump() << ",\n";
  out << "  \"audio_sha256\": " << json(t.audio_sha256).dump() << ",\n";
  out << "  \"seed\": " << json(t.seed).dump() << ",\n";
  out << "  \"alpha_mode\": " << json(alpha_mode_name(t.alpha_mode)).dump() << ",\n";
  out << "  \"keyframes\": [";
  for (std::size_t i = 0; i < t.keyframes.size(); ++i) {
    const auto& kf = t.keyframes[i];
    json j = {{"slice_index", kf.slice_index}, {"z", kf.z}, {"category", kf.category}};
    out << (i ? ",\n    " : "\n    ") << j.dump();
  }
  out << "\n  ],\n";
  out << "  \"frames\": [";
  for (std::size_t i = 0; i < t.frames.size(); ++i) {
    json weights = json::object();
    for (const auto& w : t.frames[i].class_weights) weights[std::to_string(w.category)] = w.weight;
    json j = {{"z", t.frames[i].z}, {"class_weights", weights}};
    out << (i ? ",\n    " : "\n    ") << j.dump();
  }
  out << "\n  ]\n}\n";
  return out.str();
}

Trajectory trajectory_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    malformed("$", std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) malformed("$", "expected a JSON object");

  const json& version = require(doc, "format_version", "");
  if (!version.is_number_integer()) malformed("format_version", "expected an integer");
  if (version.get<long long>() != kTrajectoryFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch, "unsupported trajectory format_version " + version.dump() +
                                                 " (this build reads " +
                                                 std::to_string(kTrajectoryFormatVersion) + ")");
  }

  Trajectory t;
  t.tool_version.clear();
  if (auto it = doc.find("tool_version"); it != doc.end()) {
    if (!it->is_string()) malformed("tool_version", "expected a string");
    t.tool_version = it->get<std::string>();
  }
  t.spec = parse_spec(require(doc, "spec", ""));
  t.fps = as_real(require(doc, "fps", ""), "fps");

  const json& digest = require(doc, "audio_sha256", "");
  if (!digest.is_string()) malformed("audio_sha256", "expected a string");
  t.audio_sha256 = digest.get<std::string>();

  const json& seed = require(doc, "seed", "");
  if (!seed.is_number_integer()) malformed("seed", "expected an integer");
  t.seed = seed.is_number_unsigned() ? seed.get<std::uint64_t>()
                                     : static_cast<std::uint64_t>(seed.get<std::int64_t>());

  if (auto it = doc.find("alpha_mode"); it != doc.end()) {
    if (*it == "cumulative") {
      t.alpha_mode = AlphaMode::kCumulative;
    } else if (*it == "legacy_length") {
      t.alpha_mode = AlphaMode::kLegacyLength;
    } else {
      malformed("alpha_mode", "expected \"cumulative\" or \"legacy_length\"");
    }
  }

  const json& keyframes = require(doc, "keyframes", "");
  if (!keyframes.is_array()) malformed("keyframes", "expected an array");
  for (std::size_t i = 0; i < keyframes.size(); ++i) {
    const std::string base = at_index("keyframes", i);
    LatentKeyframe kf;
    const long long slice = as_integer(require(keyframes[i], "slice_index", base), join(base, "slice_index"));
    if (slice < 0) malformed(join(base, "slice_index"), "must be non-negative");
    kf.slice_index = static_cast<std::size_t>(slice);
    kf.z = as_vector(require(keyframes[i], "z", base), join(base, "z"));
    kf.category = as_int(require(keyframes[i], "category", base), join(base, "category"));
    t.keyframes.push_back(std::move(kf));
  }

  const json& frames = require(doc, "frames", "");
  if (!frames.is_array()) malformed("frames", "expected an array");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string base = at_index("frames", i);
    FrameMix frame;
    frame.z = as_vector(require(frames[i], "z", base), join(base, "z"));
    frame.class_weights = parse_weights(require(frames[i], "class_weights", base), join(base, "class_weights"));
    t.frames.push_back(std::move(frame));
  }

  validate(t);
  return t;
}

void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& path) {
  const std::string text = to_json(trajectory);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write trajectory " + path.string());
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::kIoError, "failed writing trajectory " + path.string());
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot read trajectory " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return trajectory_from_json(buf.str());
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot read " + path.string());

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIoError, "SHA-256 initialisation failed");
  }
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);

  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

}  // namespace ganterp
