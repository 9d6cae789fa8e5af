#pragma once

// Helpers shared by the test binaries: a seeded generator, random text with
// plenty of non-ASCII, and scratch directories.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "quip/corpus.hpp"
#include "quip/unicode.hpp"

namespace qt {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng_); }
  std::size_t range(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(eng_);
  }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  template <typename C>
  const auto& pick(const C& c) {
    return c[index(c.size())];
  }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

// Mixed-script text: CJK, kana, Latin, accented letters, fullwidth forms,
// emoji, quotes, backslashes and control-ish whitespace.
inline std::string random_text(Rng& rng, std::size_t max_cps = 24, bool allow_empty = false) {
  static const std::vector<char32_t> pool = {
      U'a', U'Z', U'0', U'9', U' ', U' ', U'.', U',', U'!', U'?', U'"', U'\\', U'/', U'\t',
      U'é', U'ü', U'ß', U'Ж', U'Ω', U'あ', U'カ', U'中',
      U'文', U'猫', U'狗', U'笑', U'死', U'棗', U'Ａ', U'０', U'　',
      U'「', U'」', U'\U0001F602', U'\U0001F436', U'—', U' ', U'가'};
  std::size_t n = rng.range(allow_empty ? 0 : 1, max_cps);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) quip::utf8::append(s, rng.pick(pool));
  return s;
}

// Non-blank text (validation rejects blank comments).
inline std::string random_nonblank(Rng& rng, std::size_t max_cps = 24) {
  for (;;) {
    std::string s = random_text(rng, max_cps);
    if (!quip::utf8::trim(s).empty()) return s;
  }
}

inline quip::VideoRecord random_record(Rng& rng, const std::string& id) {
  quip::VideoRecord r;
  r.id = id;
  r.platform = rng.coin() ? quip::Platform::Douyin : quip::Platform::YouTube;
  r.language = quip::language_of(r.platform);
  r.category = rng.pick(quip::kAllCategories);
  for (std::size_t i = rng.range(0, 3); i > 0; --i) r.tags.push_back(random_text(rng, 6, true));
  r.introduction = random_text(rng, 30, true);
  r.description = random_text(rng, 60, true);
  r.transcription = random_text(rng, 60, true);
  std::uint64_t likes = rng.range(0, 100000);
  for (std::size_t i = rng.range(0, 5); i > 0; --i) {
    quip::CommentRecord c;
    c.text = random_nonblank(rng);
    likes = likes == 0 ? 0 : rng.range(0, likes);
    c.like_count = likes;
    if (rng.coin()) {
      c.c_label = rng.pick(quip::kAllStyles);
      c.label_tier = static_cast<quip::LabelTier>(rng.index(6));
    }
    r.comments.push_back(std::move(c));
  }
  if (rng.coin()) r.source_url = "https://example.com/v/" + id;
  return r;
}

// Fresh scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "quip") {
    auto base = std::filesystem::temp_directory_path();
    std::random_device rd;
    for (;;) {
      path_ = base / (tag + "-" + std::to_string(rd()));
      if (std::filesystem::create_directory(path_)) break;
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::filesystem::path data_dir() { return QUIP_DATA_DIR; }

}  // namespace qt
