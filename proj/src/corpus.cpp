#include "quip/corpus.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "quip/error.hpp"
#include "quip/fsutil.hpp"
#include "quip/unicode.hpp"

namespace quip {
namespace {

using Json = nlohmann::ordered_json;

template <typename E, std::size_t N>
std::optional<E> parse_enum(std::string_view s, const std::array<std::string_view, N>& names) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  return std::nullopt;
}

constexpr std::array<std::string_view, 6> kStyleNames = {
    "Puns", "Rhyming", "Meme", "Sarcasm", "GeneralHumor", "ContentExtraction"};
constexpr std::array<std::string_view, 6> kCategoryNames = {
    "TalkShow", "HumorousCommentary", "FunnyAnimal", "DailyLifeSkit", "ComedyShortDrama", "Other"};
constexpr std::array<std::string_view, 6> kTierNames = {"Rule", "Similarity", "Lexicon",
                                                        "Knn",  "MapPrior",   "Manual"};
constexpr std::array<std::string_view, 2> kPlatformNames = {"Douyin", "YouTube"};
constexpr std::array<std::string_view, 2> kLanguageNames = {"Zh", "En"};

const Json& require(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(0, std::string("missing required field '") + key + "'");
  return *it;
}

std::string require_string(const Json& obj, const char* key) {
  const Json& v = require(obj, key);
  if (!v.is_string()) throw SchemaError(0, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

template <typename E>
E require_enum(const Json& obj, const char* key, std::optional<E> (*parse)(std::string_view)) {
  std::string s = require_string(obj, key);
  auto e = parse(s);
  if (!e) throw SchemaError(0, std::string("unknown ") + key + " value '" + s + "'");
  return *e;
}

CommentRecord comment_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError(0, "comment must be an object");
  CommentRecord c;
  c.text = require_string(j, "text");
  const Json& likes = require(j, "like_count");
  if (!likes.is_number_unsigned() && !(likes.is_number_integer() && likes.get<std::int64_t>() >= 0)) {
    throw SchemaError(0, "like_count must be a non-negative integer");
  }
  c.like_count = likes.get<std::uint64_t>();
  if (auto it = j.find("c_label"); it != j.end() && !it->is_null()) {
    c.c_label = require_enum<StyleLabel>(j, "c_label", parse_style);
  }
  if (auto it = j.find("label_tier"); it != j.end() && !it->is_null()) {
    c.label_tier = require_enum<LabelTier>(j, "label_tier", parse_tier);
  }
  return c;
}

Json comment_to_json(const CommentRecord& c) {
  Json j;
  j["text"] = c.text;
  j["like_count"] = c.like_count;
  if (c.c_label) j["c_label"] = to_string(*c.c_label);
  if (c.label_tier) j["label_tier"] = to_string(*c.label_tier);
  return j;
}

VideoRecord record_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError(0, "record must be a JSON object");
  VideoRecord r;
  r.id = require_string(j, "id");
  r.platform = require_enum<Platform>(j, "platform", parse_platform);
  r.language = require_enum<Language>(j, "language", parse_language);
  r.category = require_enum<VideoCategory>(j, "category", parse_category);
  const Json& tags = require(j, "tags");
  if (!tags.is_array()) throw SchemaError(0, "field 'tags' must be an array");
  for (const auto& t : tags) {
    if (!t.is_string()) throw SchemaError(0, "tags must be strings");
    r.tags.push_back(t.get<std::string>());
  }
  r.introduction = require_string(j, "introduction");
  r.description = require_string(j, "description");
  r.transcription = require_string(j, "transcription");
  const Json& comments = require(j, "comments");
  if (!comments.is_array()) throw SchemaError(0, "field 'comments' must be an array");
  if (comments.size() > kMaxComments) {
    throw SchemaError(0, "record has " + std::to_string(comments.size()) + " comments; at most " +
                             std::to_string(kMaxComments) + " allowed");
  }
  for (const auto& c : comments) r.comments.push_back(comment_from_json(c));
  if (auto it = j.find("source_url"); it != j.end() && !it->is_null()) {
    r.source_url = require_string(j, "source_url");
  }
  validate(r);
  return r;
}

Json record_to_json(const VideoRecord& r) {
  Json j;
  j["id"] = r.id;
  j["platform"] = to_string(r.platform);
  j["language"] = to_string(r.language);
  j["category"] = to_string(r.category);
  j["tags"] = r.tags;
  j["introduction"] = r.introduction;
  j["description"] = r.description;
  j["transcription"] = r.transcription;
  Json comments = Json::array();
  for (const auto& c : r.comments) comments.push_back(comment_to_json(c));
  j["comments"] = std::move(comments);
  if (r.source_url) j["source_url"] = *r.source_url;
  return j;
}

}  // namespace

std::string_view to_string(StyleLabel v) { return kStyleNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(VideoCategory v) { return kCategoryNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(LabelTier v) { return kTierNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(Platform v) { return kPlatformNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(Language v) { return kLanguageNames[static_cast<std::size_t>(v)]; }

std::optional<StyleLabel> parse_style(std::string_view s) { return parse_enum<StyleLabel>(s, kStyleNames); }
std::optional<VideoCategory> parse_category(std::string_view s) {
  return parse_enum<VideoCategory>(s, kCategoryNames);
}
std::optional<LabelTier> parse_tier(std::string_view s) { return parse_enum<LabelTier>(s, kTierNames); }
std::optional<Platform> parse_platform(std::string_view s) {
  return parse_enum<Platform>(s, kPlatformNames);
}
std::optional<Language> parse_language(std::string_view s) {
  return parse_enum<Language>(s, kLanguageNames);
}

void validate(const CommentRecord& c) {
  if (utf8::trim(c.text).empty()) throw SchemaError(0, "comment text is empty");
  if (c.c_label.has_value() != c.label_tier.has_value()) {
    throw SchemaError(0, "c_label and label_tier must be present together");
  }
}

void validate(const VideoRecord& v) {
  if (v.id.empty()) throw SchemaError(0, "record id is empty");
  if (language_of(v.platform) != v.language) {
    throw SchemaError(0, "platform " + std::string(to_string(v.platform)) + " requires language " +
                             std::string(to_string(language_of(v.platform))));
  }
  if (v.comments.size() > kMaxComments) {
    throw SchemaError(0, "record has " + std::to_string(v.comments.size()) + " comments; at most " +
                             std::to_string(kMaxComments) + " allowed");
  }
  for (std::size_t i = 0; i < v.comments.size(); ++i) {
    validate(v.comments[i]);
    if (i > 0 && v.comments[i].like_count > v.comments[i - 1].like_count) {
      throw SchemaError(0, "comments must be sorted by like_count, descending");
    }
  }
}

std::vector<CommentRecord> top_five_comments(std::vector<CommentRecord> comments) {
  std::stable_sort(comments.begin(), comments.end(),
                   [](const CommentRecord& a, const CommentRecord& b) { return a.like_count > b.like_count; });
  if (comments.size() > kMaxComments) comments.resize(kMaxComments);
  return comments;
}

Dataset::Dataset(std::vector<VideoRecord> records) : records_(std::move(records)) { rebuild_index(); }

const VideoRecord* Dataset::find(std::string_view id) const {
  for (const auto& r : records_) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

void Dataset::add(VideoRecord record) {
  category_index_[index_of(record.category)].push_back(records_.size());
  records_.push_back(std::move(record));
}

void Dataset::rebuild_index() {
  for (auto& bucket : category_index_) bucket.clear();
  for (std::size_t i = 0; i < records_.size(); ++i) {
    category_index_[index_of(records_[i].category)].push_back(i);
  }
}

VideoRecord parse_record(std::string_view line, std::size_t line_no) {
  Json j;
  try {
    j = Json::parse(line.begin(), line.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(line_no, std::string("invalid JSON: ") + e.what());
  }
  try {
    return record_from_json(j);
  } catch (const SchemaError& e) {
    if (line_no == 0) throw;
    throw SchemaError(line_no, e.detail());
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(line_no, e.what());
  }
}

std::string serialize_record(const VideoRecord& record) {
  return record_to_json(record).dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

Dataset parse_dataset(std::string_view text) {
  std::vector<VideoRecord> records;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    records.push_back(parse_record(line, line_no));
    if (!ids.insert(records.back().id).second) throw SchemaError(line_no, "duplicate record id " + records.back().id);
  }
  return Dataset(std::move(records));
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::string text = fs::read_file(path);
  try {
    return parse_dataset(text);
  } catch (const SchemaError& e) {
    throw SchemaError(e.line(), e.detail(), path.string());
  }
}

std::string serialize_dataset(const Dataset& dataset) {
  std::string out;
  for (const auto& r : dataset.records()) {
    out += serialize_record(r);
    out.push_back('\n');
  }
  return out;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  fs::write_atomic(path, serialize_dataset(dataset));
}

}  // namespace quip
