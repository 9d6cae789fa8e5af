#include "quip/services.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "quip/fsutil.hpp"
#include "quip/hashing.hpp"
#include "quip/log.hpp"
#include "quip/media_decoder.hpp"
#include "quip/textmetrics.hpp"
#include "quip/unicode.hpp"

namespace quip {

void GenerationConfig::validate() const {
  if (!(temperature > 0.0)) throw ConfigError("generation temperature must be > 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("generation top_p must be in (0, 1]");
  if (!(repetition_penalty >= 1.0)) throw ConfigError("generation repetition_penalty must be >= 1");
  if (max_tokens == 0) throw ConfigError("generation max_tokens must be positive");
}

std::optional<std::string> read_credential(const ClientConfig& config) {
  if (config.credential_env_var.empty()) return std::nullopt;
  const char* v = std::getenv(config.credential_env_var.c_str());
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

// ---- platform -------------------------------------------------------------------

RawVideo parse_raw_video(std::string_view json_line, std::size_t line_no) {
  auto j = nlohmann::json::parse(json_line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw SchemaError(line_no, "video metadata is not a JSON object");
  try {
    RawVideo v;
    v.id = j.at("id").get<std::string>();
    auto platform = parse_platform(j.at("platform").get<std::string>());
    if (!platform) throw SchemaError(line_no, "unknown platform");
    v.platform = *platform;
    if (j.contains("category")) {
      auto cat = parse_category(j["category"].get<std::string>());
      if (!cat) throw SchemaError(line_no, "unknown category");
      v.category = *cat;
    }
    v.tags = j.value("tags", std::vector<std::string>{});
    v.introduction = j.value("introduction", "");
    v.source_url = j.value("source_url", "");
    v.media_ref = j.value("media_ref", "");
    for (const auto& c : j.value("comments", nlohmann::json::array())) {
      CommentRecord rec;
      rec.text = c.at("text").get<std::string>();
      rec.like_count = c.at("like_count").get<std::uint64_t>();
      v.comments.push_back(std::move(rec));
    }
    if (v.id.empty()) throw SchemaError(line_no, "empty video id");
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(line_no, std::string("bad video metadata: ") + e.what());
  }
}

MockPlatformClient::MockPlatformClient(std::filesystem::path fixture_dir) {
  // No fixture simply means no videos; commands that never crawl still work.
  if (!std::filesystem::exists(fixture_dir / "videos.jsonl")) {
    missing_ = fixture_dir / "videos.jsonl";
    return;
  }
  std::istringstream in(fs::read_file(fixture_dir / "videos.jsonl"));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    videos_.push_back(parse_raw_video(line, n));
  }
}

std::vector<RawVideo> MockPlatformClient::fetch_videos(std::span<const std::string> tags, std::size_t count) {
  if (!missing_.empty()) log::warn("mock platform: no fixture at ", missing_.string(), "; the crawl finds nothing");
  std::vector<RawVideo> out;
  for (const auto& v : videos_) {
    if (out.size() >= count) break;
    bool match = tags.empty() || std::any_of(tags.begin(), tags.end(), [&](const std::string& t) {
                   return std::find(v.tags.begin(), v.tags.end(), t) != v.tags.end();
                 });
    if (match) out.push_back(v);
  }
  return out;
}

RawVideo MockPlatformClient::fetch_by_url(std::string_view url) {
  for (const auto& v : videos_) {
    if (v.source_url == url) return v;
  }
  throw ClientError("mock platform has no video at " + std::string(url));
}

// ---- transcription ----------------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 24> kEnWords = {
    "okay",  "so",    "today", "we",     "are",   "going", "to",    "see",
    "what",  "this",  "dog",   "does",   "when",  "the",   "door",  "opens",
    "look",  "at",    "him",   "run",    "again", "wait",  "for",   "it"};
constexpr std::array<std::string_view, 24> kZhWords = {
    "今天", "我们", "来看", "这只", "小狗", "一起", "开门", "的时候", "突然", "跑了", "大家", "注意",
    "看看", "他在", "做什么", "真的", "太快", "了", "哈哈", "最后", "还是", "回来", "等一下", "就是"};

}  // namespace

std::string MockTranscriber::transcribe(std::string_view media_ref, Language language) {
  if (!SyntheticDecoder::handles(media_ref) &&
      !std::filesystem::is_regular_file(std::filesystem::path(std::string(media_ref)))) {
    throw IoError("media not readable: " + std::string(media_ref));
  }
  std::uint64_t st = mix(seed_, fnv1a64(media_ref));
  const std::size_t words = 10 + splitmix64(st) % 8;
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    std::uint64_t h = splitmix64(st);
    if (language == Language::Zh) {
      out += kZhWords[h % kZhWords.size()];
    } else {
      if (i) out.push_back(' ');
      out += kEnWords[h % kEnWords.size()];
    }
  }
  out += language == Language::Zh ? "。" : ".";
  return out;
}

// ---- description -------------------------------------------------------------------

std::string MockDescriber::describe(const Image& composite, std::string_view transcription,
                                    std::span<const std::string> tags, Language language) {
  ++calls_;
  unsigned pending = failures_.load();
  while (pending > 0 && !failures_.compare_exchange_weak(pending, pending - 1)) {
  }
  if (pending > 0) throw ClientError("mock describer: injected failure");

  std::uint64_t h = fnv1a64(std::string_view(reinterpret_cast<const char*>(composite.bytes().data()),
                                             composite.bytes().size()),
                            fnv1a64(transcription, seed_ ^ 0xcbf29ce484222325ULL));
  std::string tag_list;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i) tag_list += language == Language::Zh ? "、" : ", ";
    tag_list += tags[i];
  }
  std::string digest = hex64(h).substr(0, 8);
  std::ostringstream os;
  if (language == Language::Zh) {
    os << "视频标签：" << (tag_list.empty() ? "无" : tag_list) << "。拼图画面" << composite.width() << "x"
       << composite.height() << "（摘要" << digest << "）。内容：" << transcription;
  } else {
    os << "A video tagged " << (tag_list.empty() ? "none" : tag_list) << ". Composite " << composite.width() << "x"
       << composite.height() << " (digest " << digest << "). It shows: " << transcription;
  }
  return os.str();
}

// ---- embeddings ----------------------------------------------------------------------

std::vector<double> MockEmbedder::embed(std::string_view text) {
  for (const auto& needle : fail_on_) {
    if (text.find(needle) != std::string_view::npos) throw ClientError("mock embedder: injected failure");
  }
  std::vector<double> v(dim_, 0.0);
  auto tokens = tokenize(text, Language::Zh).tokens;
  if (tokens.empty()) tokens.emplace_back(text);
  for (const auto& tok : tokens) {
    std::uint64_t st = mix(seed_, fnv1a64(tok));
    for (auto& x : v) x += unit_signed(st);
  }
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::fabs(x));
  if (peak > 0.0) {
    for (auto& x : v) x /= peak;
  }
  return v;
}

// ---- sentiment -------------------------------------------------------------------------

namespace {

const std::set<std::string>& polarity_words(Language lang, bool positive) {
  static const std::set<std::string> en_pos = {"love", "great", "funny", "hilarious", "cute",  "amazing",
                                               "best", "awesome", "lol", "happy",   "good", "nice"};
  static const std::set<std::string> en_neg = {"hate", "bad",   "worst", "boring", "sad",  "awful",
                                               "terrible", "cringe", "angry", "ugly", "stupid"};
  static const std::set<std::string> zh_pos = {"好", "爱", "笑", "棒", "可爱", "开心", "喜欢", "厉害", "哈哈"};
  static const std::set<std::string> zh_neg = {"差", "烂", "无聊", "难过", "讨厌", "生气", "离谱", "垃圾"};
  if (lang == Language::Zh) return positive ? zh_pos : zh_neg;
  return positive ? en_pos : en_neg;
}

}  // namespace

std::string MockSentiment::classify(std::string_view text, Language language) {
  if (fail_) throw ClientError("mock sentiment: injected failure");
  if (auto it = fixed_.find(text); it != fixed_.end()) return it->second;
  int score = 0;
  for (const auto& tok : tokenize(text, language).tokens) {
    if (polarity_words(language, true).count(tok)) ++score;
    if (polarity_words(language, false).count(tok)) --score;
  }
  if (score == 0) score = (fnv1a64(utf8::normalize(text), seed_ ^ 0x5e17ULL) & 1) ? 1 : -1;
  return score > 0 ? "POSITIVE" : "NEGATIVE";
}

// ---- generation --------------------------------------------------------------------------

std::string MockGenerator::complete(std::string_view prompt, const GenerationConfig& config) {
  ++calls_;
  received_.push_back(config);
  if (failures_ > 0) {
    --failures_;
    throw ClientError("mock generator: injected failure");
  }
  if (canned_) return *canned_;

  std::ostringstream cfg;
  cfg << config.temperature << '|' << config.top_p << '|' << config.repetition_penalty << '|' << config.max_tokens;
  std::uint64_t st = mix(seed_, fnv1a64(cfg.str(), fnv1a64(prompt)));

  auto cps = utf8::decode(prompt);
  std::size_t cjk = 0;
  for (char32_t c : cps) cjk += utf8::is_cjk(c) ? 1 : 0;
  const bool zh = cjk * 5 >= cps.size() && cjk > 0;

  std::string out;
  if (zh) {
    std::vector<char32_t> pool;
    for (char32_t c : cps) {
      if (utf8::is_cjk(c)) pool.push_back(c);
    }
    const std::size_t n = 22 + splitmix64(st) % 16;
    for (std::size_t i = 0; i < n; ++i) utf8::append(out, pool[splitmix64(st) % pool.size()]);
  } else {
    auto words = tokenize(prompt, Language::En).tokens;
    if (words.empty()) words.push_back("ok");
    const std::size_t n = 55 + splitmix64(st) % 25;
    for (std::size_t i = 0; i < n; ++i) {
      if (i) out.push_back(' ');
      out += words[splitmix64(st) % words.size()];
    }
  }
  return out;
}

// ---- encyclopedias --------------------------------------------------------------------------

std::string_view to_string(MemeSource s) {
  switch (s) {
    case MemeSource::LocalCache: return "LocalCache";
    case MemeSource::RegengBaike: return "RegengBaike";
    case MemeSource::UrbanDictionary: return "UrbanDictionary";
    case MemeSource::KnowYourMeme: return "KnowYourMeme";
  }
  return "?";
}

std::optional<MemeSource> parse_meme_source(std::string_view s) {
  for (MemeSource m : {MemeSource::LocalCache, MemeSource::RegengBaike, MemeSource::UrbanDictionary,
                       MemeSource::KnowYourMeme}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

void MockEncyclopedia::add(std::string term, std::string definition) {
  std::string key = utf8::normalize(utf8::trim(term));
  table_[key] = {std::move(term), std::move(definition)};
}

void MockEncyclopedia::fail_on(std::string term) { failing_.insert(utf8::normalize(utf8::trim(term))); }

std::optional<MemeDefinition> MockEncyclopedia::lookup(std::string_view term) {
  ++calls_;
  std::string key = utf8::normalize(utf8::trim(term));
  if (failing_.count(key)) throw ClientError("mock encyclopedia: injected network failure for '" + key + "'");
  auto it = table_.find(key);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

std::unique_ptr<MockEncyclopedia> MockEncyclopedia::from_file(MemeSource source, const std::filesystem::path& path) {
  auto enc = std::make_unique<MockEncyclopedia>(source);
  std::istringstream in(fs::read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    enc->add(line.substr(0, tab), line.substr(tab + 1));
  }
  return enc;
}

}  // namespace quip
