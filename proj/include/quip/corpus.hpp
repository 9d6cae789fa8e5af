#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace quip {

// Comment style taxonomy. Declaration order is the canonical order used for
// every tie-break in the project.
enum class StyleLabel : std::uint8_t { Puns, Rhyming, Meme, Sarcasm, GeneralHumor, ContentExtraction };
inline constexpr std::array<StyleLabel, 6> kAllStyles = {
    StyleLabel::Puns,    StyleLabel::Rhyming,      StyleLabel::Meme,
    StyleLabel::Sarcasm, StyleLabel::GeneralHumor, StyleLabel::ContentExtraction};

enum class VideoCategory : std::uint8_t {
  TalkShow,
  HumorousCommentary,
  FunnyAnimal,
  DailyLifeSkit,
  ComedyShortDrama,
  Other,
};
inline constexpr std::array<VideoCategory, 6> kAllCategories = {
    VideoCategory::TalkShow,      VideoCategory::HumorousCommentary, VideoCategory::FunnyAnimal,
    VideoCategory::DailyLifeSkit, VideoCategory::ComedyShortDrama,   VideoCategory::Other};

// Which annotation step produced a comment's label. Manual marks the seed set.
enum class LabelTier : std::uint8_t { Rule, Similarity, Lexicon, Knn, MapPrior, Manual };

enum class Platform : std::uint8_t { Douyin, YouTube };
enum class Language : std::uint8_t { Zh, En };

std::string_view to_string(StyleLabel v);
std::string_view to_string(VideoCategory v);
std::string_view to_string(LabelTier v);
std::string_view to_string(Platform v);
std::string_view to_string(Language v);

// Parsing is exact (case-sensitive); anything else yields nullopt.
std::optional<StyleLabel> parse_style(std::string_view s);
std::optional<VideoCategory> parse_category(std::string_view s);
std::optional<LabelTier> parse_tier(std::string_view s);
std::optional<Platform> parse_platform(std::string_view s);
std::optional<Language> parse_language(std::string_view s);

constexpr std::size_t index_of(StyleLabel v) { return static_cast<std::size_t>(v); }
constexpr std::size_t index_of(VideoCategory v) { return static_cast<std::size_t>(v); }

constexpr Language language_of(Platform p) {
  return p == Platform::Douyin ? Language::Zh : Language::En;
}

// Platform length norm: En in whitespace words, Zh in non-space characters.
struct LengthBounds {
  std::size_t min;
  std::size_t max;
  bool operator==(const LengthBounds&) const = default;
};

constexpr LengthBounds default_length_bounds(Language l) {
  return l == Language::En ? LengthBounds{63, 72} : LengthBounds{25, 35};
}

struct CommentRecord {
  std::string text;
  std::uint64_t like_count = 0;
  std::optional<StyleLabel> c_label;
  std::optional<LabelTier> label_tier;

  bool operator==(const CommentRecord&) const = default;
};

inline constexpr std::size_t kMaxComments = 5;

struct VideoRecord {
  std::string id;
  Platform platform = Platform::Douyin;
  Language language = Language::Zh;
  VideoCategory category = VideoCategory::Other;
  std::vector<std::string> tags;
  std::string introduction;
  std::string description;
  std::string transcription;
  std::vector<CommentRecord> comments;
  std::optional<std::string> source_url;

  bool operator==(const VideoRecord&) const = default;
};

// Throws SchemaError (line 0) describing the first violated invariant.
void validate(const CommentRecord& c);
void validate(const VideoRecord& v);

// Highest-liked five, stable on ties.
std::vector<CommentRecord> top_five_comments(std::vector<CommentRecord> comments);

class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<VideoRecord> records);

  const std::vector<VideoRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const VideoRecord& operator[](std::size_t i) const { return records_[i]; }

  // Indices of records in `category`, ascending.
  std::span<const std::size_t> indices(VideoCategory category) const {
    return category_index_[index_of(category)];
  }
  const VideoRecord* find(std::string_view id) const;

  void add(VideoRecord record);
  // Mutable access for in-place annotation; call rebuild_index() if categories change.
  std::vector<VideoRecord>& mutable_records() { return records_; }
  void rebuild_index();

  bool operator==(const Dataset& other) const { return records_ == other.records_; }

 private:
  std::vector<VideoRecord> records_;
  std::array<std::vector<std::size_t>, kAllCategories.size()> category_index_;
};

// One JSON object per line. Errors name the offending line.
Dataset load_dataset(const std::filesystem::path& path);
Dataset parse_dataset(std::string_view text);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
std::string serialize_dataset(const Dataset& dataset);

// Single-record form shared with the prepared-target input of `generate`.
std::string serialize_record(const VideoRecord& record);
VideoRecord parse_record(std::string_view line, std::size_t line_no = 0);

}  // namespace quip
