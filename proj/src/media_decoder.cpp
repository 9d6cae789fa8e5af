#include "quip/media_decoder.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>

#include <json.hpp>

#include "quip/error.hpp"
#include "quip/hashing.hpp"

namespace quip {

Image MediaDecoder::frame_at_time(std::string_view ref, double t) {
  MediaInfo info = probe(ref);
  if (info.frame_count == 0) throw IoError("media has no frames: " + std::string(ref));
  auto idx = static_cast<std::size_t>(std::max(0.0, std::floor(t * info.fps)));
  return frame_at_index(ref, std::min(idx, info.frame_count - 1));
}

// ---- synthetic ---------------------------------------------------------------

bool SyntheticDecoder::handles(std::string_view ref) { return ref.starts_with("synthetic:"); }

SyntheticDecoder::Spec SyntheticDecoder::parse(std::string_view ref) {
  if (!handles(ref)) throw IoError("not a synthetic media reference: " + std::string(ref));
  Spec spec;
  std::string_view rest = ref.substr(10);
  while (!rest.empty()) {
    std::size_t semi = rest.find(';');
    std::string_view kv = rest.substr(0, semi);
    rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
    if (kv.empty()) continue;
    std::size_t eq = kv.find('=');
    if (eq == std::string_view::npos) throw IoError("bad synthetic media key: " + std::string(kv));
    std::string key(kv.substr(0, eq));
    std::string val(kv.substr(eq + 1));
    try {
      if (key == "seed") spec.seed = std::stoull(val);
      else if (key == "duration") spec.duration_s = std::stod(val);
      else if (key == "fps") spec.fps = std::stod(val);
      else if (key == "w") spec.width = std::stoul(val);
      else if (key == "h") spec.height = std::stoul(val);
      else if (key == "climax") spec.climax_s = std::stod(val);
      else throw IoError("unknown synthetic media key: " + key);
    } catch (const std::logic_error&) {
      throw IoError("bad synthetic media value for " + key + ": " + val);
    }
  }
  if (!(spec.duration_s > 0) || !(spec.fps > 0) || spec.width == 0 || spec.height == 0) {
    throw IoError("synthetic media needs positive duration, fps and size: " + std::string(ref));
  }
  return spec;
}

namespace {

bool in_flash(const SyntheticDecoder::Spec& s, double t) {
  return s.climax_s >= 0.0 && t >= s.climax_s && t < s.climax_s + 1.0;
}

Rgb scene_color(const SyntheticDecoder::Spec& s, double t) {
  if (in_flash(s, t)) return {250, 250, 250};
  auto scene = static_cast<std::uint64_t>(t / 3.0);
  std::uint64_t st = mix(s.seed, scene);
  std::uint64_t h = splitmix64(st);
  // Keep ordinary scenes mid-luma so the flash stands out.
  return {static_cast<std::uint8_t>(60 + (h & 0x3F)), static_cast<std::uint8_t>(60 + ((h >> 8) & 0x3F)),
          static_cast<std::uint8_t>(60 + ((h >> 16) & 0x3F))};
}

double audio_level(const SyntheticDecoder::Spec& s, std::size_t window, double t) {
  if (in_flash(s, t)) return 1.0;
  std::uint64_t st = mix(s.seed ^ 0xa0d10ULL, window);
  return 0.2 + 0.01 * unit_signed(st);
}

}  // namespace

MediaInfo SyntheticDecoder::probe(std::string_view ref) {
  Spec s = parse(ref);
  MediaInfo info;
  info.duration_s = s.duration_s;
  info.fps = s.fps;
  info.frame_count = static_cast<std::size_t>(std::floor(s.duration_s * s.fps));
  info.width = s.width;
  info.height = s.height;
  return info;
}

Image SyntheticDecoder::frame_at_index(std::string_view ref, std::size_t index) {
  Spec s = parse(ref);
  auto count = static_cast<std::size_t>(std::floor(s.duration_s * s.fps));
  if (index >= count) throw IoError("frame " + std::to_string(index) + " is past the end of " + std::string(ref));
  double t = static_cast<double>(index) / s.fps;
  Image img(s.width, s.height, scene_color(s, t));
  // A moving bar makes neighbouring frames distinguishable.
  std::size_t bar = index % s.width;
  for (std::size_t y = 0; y < s.height; ++y) img.set(bar, y, {0, 0, 0});
  return img;
}

SignalSeries SyntheticDecoder::audio_envelope(std::string_view ref, double window_s) {
  Spec s = parse(ref);
  if (!(window_s > 0)) throw IoError("window must be positive");
  SignalSeries out;
  out.window_seconds = window_s;
  auto n = static_cast<std::size_t>(std::ceil(s.duration_s / window_s - 1e-9));
  for (std::size_t i = 0; i < n; ++i) out.values.push_back(audio_level(s, i, static_cast<double>(i) * window_s));
  return out;
}

SignalSeries SyntheticDecoder::luma_series(std::string_view ref, double window_s) {
  Spec s = parse(ref);
  if (!(window_s > 0)) throw IoError("window must be positive");
  SignalSeries out;
  out.window_seconds = window_s;
  auto n = static_cast<std::size_t>(std::ceil(s.duration_s / window_s - 1e-9));
  for (std::size_t i = 0; i < n; ++i) {
    Rgb c = scene_color(s, static_cast<double>(i) * window_s);
    out.values.push_back(0.299 * c.r + 0.587 * c.g + 0.114 * c.b);
  }
  return out;
}

// ---- ffmpeg ------------------------------------------------------------------

namespace {

std::string shell_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

std::string run_capture(const std::string& cmd) {
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(::popen(cmd.c_str(), "r"), ::pclose);
  if (!pipe) throw IoError("cannot start: " + cmd);
  std::string out;
  std::array<char, 65536> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), n);
  int status = ::pclose(pipe.release());
  if (status != 0) throw IoError("command failed (status " + std::to_string(status) + "): " + cmd);
  return out;
}

void require_file(std::string_view ref) {
  if (!std::filesystem::is_regular_file(std::filesystem::path(std::string(ref)))) {
    throw IoError("media file not readable: " + std::string(ref));
  }
}

}  // namespace

MediaInfo FfmpegDecoder::probe(std::string_view ref) {
  require_file(ref);
  std::string out = run_capture(
      "ffprobe -v error -select_streams v:0 -show_entries stream=width,height,r_frame_rate,nb_frames "
      "-show_entries format=duration -of json " + shell_quote(ref) + " 2>/dev/null");
  auto j = nlohmann::json::parse(out, nullptr, false);
  if (j.is_discarded() || !j.contains("streams") || j["streams"].empty()) {
    throw IoError("ffprobe returned no video stream for " + std::string(ref));
  }
  const auto& st = j["streams"][0];
  MediaInfo info;
  info.width = st.value("width", 0);
  info.height = st.value("height", 0);
  std::string rate = st.value("r_frame_rate", "0/1");
  double num = 0, den = 1;
  std::sscanf(rate.c_str(), "%lf/%lf", &num, &den);
  info.fps = den > 0 ? num / den : 0.0;
  info.duration_s = std::stod(j["format"].value("duration", "0"));
  std::string frames = st.value("nb_frames", "");
  info.frame_count = frames.empty() ? static_cast<std::size_t>(info.duration_s * info.fps) : std::stoul(frames);
  return info;
}

Image FfmpegDecoder::frame_at_index(std::string_view ref, std::size_t index) {
  MediaInfo info = probe(ref);
  double t = info.fps > 0 ? static_cast<double>(index) / info.fps : 0.0;
  char ts[32];
  std::snprintf(ts, sizeof ts, "%.3f", t);
  std::string raw = run_capture("ffmpeg -v error -ss " + std::string(ts) + " -i " + shell_quote(ref) +
                                " -frames:v 1 -f rawvideo -pix_fmt rgb24 - 2>/dev/null");
  Image img(info.width, info.height);
  if (raw.size() != img.bytes().size()) throw IoError("short frame read from " + std::string(ref));
  std::copy(raw.begin(), raw.end(), img.bytes().begin());
  return img;
}

SignalSeries FfmpegDecoder::audio_envelope(std::string_view ref, double window_s) {
  require_file(ref);
  constexpr int kRate = 8000;
  std::string pcm = run_capture("ffmpeg -v error -i " + shell_quote(ref) +
                                " -vn -ac 1 -ar 8000 -f s16le - 2>/dev/null");
  SignalSeries out;
  out.window_seconds = window_s;
  const auto per_window = static_cast<std::size_t>(std::max(1.0, window_s * kRate));
  const std::size_t samples = pcm.size() / 2;
  for (std::size_t start = 0; start < samples; start += per_window) {
    std::size_t end = std::min(samples, start + per_window);
    double acc = 0.0;
    for (std::size_t i = start; i < end; ++i) {
      auto lo = static_cast<unsigned char>(pcm[2 * i]);
      auto hi = static_cast<unsigned char>(pcm[2 * i + 1]);
      auto v = static_cast<std::int16_t>(lo | (hi << 8));
      double x = v / 32768.0;
      acc += x * x;
    }
    out.values.push_back(std::sqrt(acc / static_cast<double>(end - start)));
  }
  if (out.values.empty()) out.values.push_back(0.0);
  return out;
}

SignalSeries FfmpegDecoder::luma_series(std::string_view ref, double window_s) {
  require_file(ref);
  constexpr int kW = 32, kH = 18;
  char filter[96];
  std::snprintf(filter, sizeof filter, "fps=%.6f,scale=%d:%d", 1.0 / window_s, kW, kH);
  std::string raw = run_capture("ffmpeg -v error -i " + shell_quote(ref) + " -vf " + filter +
                                " -f rawvideo -pix_fmt gray - 2>/dev/null");
  SignalSeries out;
  out.window_seconds = window_s;
  const std::size_t frame = kW * kH;
  for (std::size_t off = 0; off + frame <= raw.size(); off += frame) {
    double acc = 0.0;
    for (std::size_t i = 0; i < frame; ++i) acc += static_cast<unsigned char>(raw[off + i]);
    out.values.push_back(acc / frame);
  }
  if (out.values.empty()) out.values.push_back(0.0);
  return out;
}

MediaDecoder& RoutingDecoder::pick(std::string_view ref) {
  if (SyntheticDecoder::handles(ref)) return synthetic_;
  return ffmpeg_;
}

}  // namespace quip
