#include "quip/media.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "quip/error.hpp"
#include "quip/fsutil.hpp"
#include "quip/kernels.hpp"

namespace quip {

std::size_t tiered_frame_count(std::size_t n) {
  if (n == 0) throw Error("tiered_frame_count: video has no frames");
  if (n <= 12) return n;
  if (n <= 60) return 12;
  if (n <= 160) return 16;
  return 24;
}

std::vector<std::size_t> bucket_midpoints(std::size_t n, std::size_t k) {
  if (k == 0 || k > n) {
    throw Error("bucket_midpoints: need 1 <= k <= n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  }
  // floor((2i + 1) n / 2k) in integers, exact for every n and k.
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = ((2 * i + 1) * n) / (2 * k);
  return out;
}

FramePlan plan_frames(std::size_t total_frames) {
  return {total_frames, bucket_midpoints(total_frames, tiered_frame_count(total_frames))};
}

Image::Image(std::size_t width, std::size_t height, Rgb fill) : width_(width), height_(height) {
  pixels_.resize(width * height * 3);
  for (std::size_t i = 0; i < width * height; ++i) {
    pixels_[3 * i] = fill.r;
    pixels_[3 * i + 1] = fill.g;
    pixels_[3 * i + 2] = fill.b;
  }
}

Rgb Image::at(std::size_t x, std::size_t y) const {
  const std::uint8_t* p = &pixels_[3 * (y * width_ + x)];
  return {p[0], p[1], p[2]};
}

void Image::set(std::size_t x, std::size_t y, Rgb c) {
  std::uint8_t* p = &pixels_[3 * (y * width_ + x)];
  p[0] = c.r;
  p[1] = c.g;
  p[2] = c.b;
}

Image crop(const Image& src, std::size_t x, std::size_t y, std::size_t w, std::size_t h) {
  if (x + w > src.width() || y + h > src.height()) throw Error("crop rectangle outside image");
  Image out(w, h);
  auto in = src.bytes();
  auto dst = out.bytes();
  for (std::size_t row = 0; row < h; ++row) {
    std::memcpy(&dst[3 * row * w], &in[3 * ((y + row) * src.width() + x)], 3 * w);
  }
  return out;
}

Image resize_nearest(const Image& src, std::size_t w, std::size_t h) {
  if (src.width() == w && src.height() == h) return src;
  Image out(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    std::size_t sy = y * src.height() / h;
    for (std::size_t x = 0; x < w; ++x) out.set(x, y, src.at(x * src.width() / w, sy));
  }
  return out;
}

double mean_luma(const Image& img) {
  if (img.empty()) return 0.0;
  double acc = 0.0;
  auto px = img.bytes();
  for (std::size_t i = 0; i < px.size(); i += 3) acc += 0.299 * px[i] + 0.587 * px[i + 1] + 0.114 * px[i + 2];
  return acc / static_cast<double>(img.width() * img.height());
}

std::string encode_png(const Image& img) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.bytes().data(), 0, nullptr)) {
    throw IoError(std::string("png encode failed: ") + image.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.bytes().data(), 0, nullptr)) {
    throw IoError(std::string("png encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

void write_png(const Image& img, const std::filesystem::path& path) { fs::write_atomic(path, encode_png(img)); }

Image read_png(const std::filesystem::path& path) {
  std::string data = fs::read_file(path);
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, data.data(), data.size())) {
    throw IoError(path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  Image out(image.width, image.height);
  if (!png_image_finish_read(&image, nullptr, out.bytes().data(), 0, nullptr)) {
    png_image_free(&image);
    throw IoError(path.string() + ": " + image.message);
  }
  return out;
}

GridLayout composite_layout(std::size_t k, std::size_t cell_w, std::size_t cell_h, std::size_t max_cols) {
  if (k == 0 || cell_w == 0 || cell_h == 0 || max_cols == 0) {
    throw Error("composite_layout: all arguments must be positive");
  }
  GridLayout g;
  g.cols = std::min(k, max_cols);
  g.rows = (k + g.cols - 1) / g.cols;
  g.cell_w = cell_w;
  g.cell_h = cell_h;
  g.positions.reserve(k);
  for (std::size_t i = 0; i < k; ++i) g.positions.emplace_back(i / g.cols, i % g.cols);
  return g;
}

Image stitch(std::span<const Image> frames, const GridLayout& layout) {
  if (frames.size() != layout.positions.size()) {
    throw Error("stitch: " + std::to_string(frames.size()) + " frames for " +
                std::to_string(layout.positions.size()) + " grid positions");
  }
  Image out(layout.width(), layout.height());
  auto dst = out.bytes();
  const std::size_t row_bytes = 3 * layout.cell_w;
  for (std::size_t p = 0; p < frames.size(); ++p) {
    const Image& f = frames[p];
    if (f.width() != layout.cell_w || f.height() != layout.cell_h) {
      throw Error("stitch: frame " + std::to_string(p) + " is " + std::to_string(f.width()) + "x" +
                  std::to_string(f.height()) + ", expected " + std::to_string(layout.cell_w) + "x" +
                  std::to_string(layout.cell_h));
    }
    auto [row, col] = layout.positions[p];
    auto src = f.bytes();
    for (std::size_t y = 0; y < layout.cell_h; ++y) {
      std::size_t oy = row * layout.cell_h + y;
      std::memcpy(&dst[3 * (oy * out.width() + col * layout.cell_w)], &src[y * row_bytes], row_bytes);
    }
  }
  return out;
}

namespace {

// Window indices (into the original series) whose incoming change is an outlier.
std::vector<std::size_t> flagged_windows(const SignalSeries& s, double z_threshold) {
  std::vector<std::size_t> out;
  const std::size_t n = s.values.size();
  if (n < 2) return out;
  std::vector<double> diffs(n - 1);
  kernels::abs_diff(s.values, diffs);
  const double m = static_cast<double>(diffs.size());
  const double mean = kernels::sum(diffs) / m;
  const double sd = std::sqrt(kernels::sum_sq_dev(diffs, mean) / m);
  if (!(sd > 0.0)) return out;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if ((diffs[i] - mean) / sd > z_threshold) out.push_back(i + 1);
  }
  return out;
}

void check_series(const SignalSeries& s, const char* name) {
  if (s.values.empty()) throw Error(std::string("detect_climax: ") + name + " series is empty");
  if (!(s.window_seconds > 0.0)) throw Error(std::string("detect_climax: ") + name + " window must be positive");
  for (double v : s.values) {
    if (!std::isfinite(v)) throw Error(std::string("detect_climax: ") + name + " series has a non-finite value");
  }
}

}  // namespace

std::vector<ClimaxInterval> detect_climax(const SignalSeries& audio, const SignalSeries& luma,
                                          const ClimaxOptions& options) {
  check_series(audio, "audio");
  check_series(luma, "luma");
  std::vector<ClimaxInterval> raw;
  for (const SignalSeries* s : {&audio, &luma}) {
    for (std::size_t w : flagged_windows(*s, options.z_threshold)) {
      double start = static_cast<double>(w) * s->window_seconds;
      raw.push_back({start, start + s->window_seconds});
    }
  }
  std::sort(raw.begin(), raw.end(), [](const ClimaxInterval& a, const ClimaxInterval& b) {
    return a.start_s < b.start_s || (a.start_s == b.start_s && a.end_s < b.end_s);
  });
  std::vector<ClimaxInterval> merged;
  for (const auto& iv : raw) {
    if (!merged.empty() && iv.start_s - merged.back().end_s < options.min_gap_s) {
      merged.back().end_s = std::max(merged.back().end_s, iv.end_s);
    } else {
      merged.push_back(iv);
    }
  }
  return merged;
}

SampleSchedule dual_rate_sample(double duration_s, std::span<const ClimaxInterval> climaxes,
                                const SamplingRates& rates) {
  if (!(duration_s > 0.0)) throw Error("dual_rate_sample: duration must be positive");
  if (!(rates.normal_fps > 0.0) || !(rates.climax_fps > 0.0)) throw Error("dual_rate_sample: rates must be positive");
  for (const auto& c : climaxes) {
    if (c.start_s < 0.0 || c.end_s <= c.start_s || c.end_s > duration_s + 1e-9) {
      throw Error("dual_rate_sample: climax interval outside [0, duration]");
    }
  }
  SampleSchedule s;
  s.rates = rates;
  auto in_climax = [&](double t) {
    return std::any_of(climaxes.begin(), climaxes.end(),
                       [t](const ClimaxInterval& c) { return t >= c.start_s && t <= c.end_s; });
  };
  for (std::size_t i = 0;; ++i) {
    double t = static_cast<double>(i) / rates.normal_fps;
    if (t >= duration_s) break;
    if (!in_climax(t)) s.normal_s.push_back(t);
  }
  for (const auto& c : climaxes) {
    for (std::size_t j = 0;; ++j) {
      double t = c.start_s + static_cast<double>(j) / rates.climax_fps;
      if (t >= c.end_s - 1e-9) break;
      s.climax_s.push_back(t);
    }
  }
  std::sort(s.climax_s.begin(), s.climax_s.end());
  s.climax_s.erase(std::unique(s.climax_s.begin(), s.climax_s.end(),
                               [](double a, double b) { return std::fabs(a - b) < 1e-9; }),
                   s.climax_s.end());
  std::merge(s.normal_s.begin(), s.normal_s.end(), s.climax_s.begin(), s.climax_s.end(),
             std::back_inserter(s.timestamps_s));
  return s;
}

}  // namespace quip
