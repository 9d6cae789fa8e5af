#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "quip/media.hpp"

namespace quip {

struct MediaInfo {
  double duration_s = 0.0;
  double fps = 0.0;
  std::size_t frame_count = 0;
  std::size_t width = 0, height = 0;
};

// Turns a media reference (file path or synthetic descriptor) into frames
// and per-window signal envelopes. Failures throw IoError.
class MediaDecoder {
 public:
  virtual ~MediaDecoder() = default;
  virtual MediaInfo probe(std::string_view ref) = 0;
  virtual Image frame_at_index(std::string_view ref, std::size_t index) = 0;
  // RMS amplitude per window.
  virtual SignalSeries audio_envelope(std::string_view ref, double window_s) = 0;
  // Mean frame luma per window.
  virtual SignalSeries luma_series(std::string_view ref, double window_s) = 0;

  Image frame_at_time(std::string_view ref, double t);
};

// In-memory videos described by references of the form
//   synthetic:seed=7;duration=24;fps=10;w=64;h=36;climax=12.5
// Scenes change colour every three seconds; a `climax` key adds a one-second
// flash with a matching audio burst. Everything is a pure function of the
// reference string.
class SyntheticDecoder final : public MediaDecoder {
 public:
  struct Spec {
    std::uint64_t seed = 0;
    double duration_s = 10.0;
    double fps = 10.0;
    std::size_t width = 64, height = 36;
    double climax_s = -1.0;  // negative: none
  };
  static bool handles(std::string_view ref);
  static Spec parse(std::string_view ref);

  MediaInfo probe(std::string_view ref) override;
  Image frame_at_index(std::string_view ref, std::size_t index) override;
  SignalSeries audio_envelope(std::string_view ref, double window_s) override;
  SignalSeries luma_series(std::string_view ref, double window_s) override;
};

// Shells out to ffprobe/ffmpeg for real files.
class FfmpegDecoder final : public MediaDecoder {
 public:
  MediaInfo probe(std::string_view ref) override;
  Image frame_at_index(std::string_view ref, std::size_t index) override;
  SignalSeries audio_envelope(std::string_view ref, double window_s) override;
  SignalSeries luma_series(std::string_view ref, double window_s) override;
};

// Routes synthetic references to SyntheticDecoder and everything else to FfmpegDecoder.
class RoutingDecoder final : public MediaDecoder {
 public:
  MediaInfo probe(std::string_view ref) override { return pick(ref).probe(ref); }
  Image frame_at_index(std::string_view ref, std::size_t i) override { return pick(ref).frame_at_index(ref, i); }
  SignalSeries audio_envelope(std::string_view ref, double w) override { return pick(ref).audio_envelope(ref, w); }
  SignalSeries luma_series(std::string_view ref, double w) override { return pick(ref).luma_series(ref, w); }

 private:
  MediaDecoder& pick(std::string_view ref);
  SyntheticDecoder synthetic_;
  FfmpegDecoder ffmpeg_;
};

}  // namespace quip
