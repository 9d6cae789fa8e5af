#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace quip {

// ---- frame selection for dataset building ---------------------------------

// Frames to keep out of n: n up to 12, then 12, 16 and 24 for n above 12, 60
// and 160. Throws quip::Error for n == 0.
std::size_t tiered_frame_count(std::size_t n);

// Midpoint of each of k equal-width buckets over [0, n): floor((i + 0.5) n / k).
// Throws quip::Error unless 1 <= k <= n.
std::vector<std::size_t> bucket_midpoints(std::size_t n, std::size_t k);

struct FramePlan {
  std::size_t total_frames = 0;
  std::vector<std::size_t> chosen_indices;
};

FramePlan plan_frames(std::size_t total_frames);

// ---- raster images --------------------------------------------------------

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

// Packed 8-bit RGB, row-major.
class Image {
 public:
  Image() = default;
  Image(std::size_t width, std::size_t height, Rgb fill = {});

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  bool empty() const { return pixels_.empty(); }
  Rgb at(std::size_t x, std::size_t y) const;
  void set(std::size_t x, std::size_t y, Rgb c);
  std::span<const std::uint8_t> bytes() const { return pixels_; }
  std::span<std::uint8_t> bytes() { return pixels_; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t width_ = 0, height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

Image crop(const Image& src, std::size_t x, std::size_t y, std::size_t w, std::size_t h);
Image resize_nearest(const Image& src, std::size_t w, std::size_t h);
// Rec. 601 luma averaged over all pixels, in [0, 255].
double mean_luma(const Image& img);

void write_png(const Image& img, const std::filesystem::path& path);
std::string encode_png(const Image& img);
Image read_png(const std::filesystem::path& path);

// ---- composite grid -------------------------------------------------------

struct GridLayout {
  std::size_t rows = 0, cols = 0;
  std::size_t cell_w = 0, cell_h = 0;
  // (row, col) for each frame in temporal order, row-major.
  std::vector<std::pair<std::size_t, std::size_t>> positions;

  std::size_t width() const { return cols * cell_w; }
  std::size_t height() const { return rows * cell_h; }
};

GridLayout composite_layout(std::size_t k, std::size_t cell_w, std::size_t cell_h, std::size_t max_cols = 4);

// Copies frame p into cell positions[p]; unused cells stay black. Frames must
// already be cell-sized.
Image stitch(std::span<const Image> frames, const GridLayout& layout);

// ---- climax detection and dual-rate sampling ------------------------------

struct SignalSeries {
  std::vector<double> values;
  double window_seconds = 1.0;
};

struct ClimaxInterval {
  double start_s = 0.0;
  double end_s = 0.0;
  bool operator==(const ClimaxInterval&) const = default;
};

struct ClimaxOptions {
  double z_threshold = 2.5;
  double min_gap_s = 1.0;
};

// Flags windows where the z-scored absolute first difference of either
// series exceeds the threshold, then merges flagged windows closer than
// min_gap_s. Output is sorted and disjoint.
std::vector<ClimaxInterval> detect_climax(const SignalSeries& audio, const SignalSeries& luma,
                                          const ClimaxOptions& options = {});

struct SamplingRates {
  double normal_fps = 0.5;
  double climax_fps = 5.0;
};

struct SampleSchedule {
  std::vector<double> timestamps_s;  // sorted union of the two sets
  std::vector<double> normal_s;
  std::vector<double> climax_s;
  SamplingRates rates;
};

// Normal grid from t = 0 at 1/normal_fps spacing, minus any point inside a
// closed climax interval; each climax [start, end) gets its own grid from
// start at 1/climax_fps spacing.
SampleSchedule dual_rate_sample(double duration_s, std::span<const ClimaxInterval> climaxes,
                                const SamplingRates& rates = {});

}  // namespace quip
