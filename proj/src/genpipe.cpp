#include "quip/genpipe.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "quip/error.hpp"
#include "quip/fsutil.hpp"
#include "quip/log.hpp"
#include "quip/textmetrics.hpp"
#include "quip/unicode.hpp"

namespace quip {

std::string_view style_definition(StyleLabel style, Language language) {
  const bool zh = language == Language::Zh;
  switch (style) {
    case StyleLabel::Puns:
      return zh ? "利用同音或近音字词制造双关，一语两义" : "plays on a word that sounds like or means two things at once";
    case StyleLabel::Rhyming:
      return zh ? "句尾押韵或对仗工整，读起来顺口" : "lines that rhyme or follow a catchy parallel rhythm";
    case StyleLabel::Meme:
      return zh ? "套用当下流行的网络梗或固定句式" : "reuses a currently popular internet meme or catchphrase";
    case StyleLabel::Sarcasm:
      return zh ? "正话反说，表面夸奖实则调侃" : "says the opposite of what is meant, praise that is really a jab";
    case StyleLabel::GeneralHumor:
      return zh ? "轻松的日常幽默，夸张或自嘲皆可" : "light everyday humor, exaggeration or self-deprecation";
    case StyleLabel::ContentExtraction:
      return zh ? "抓住视频里的具体细节或台词展开调侃"
                : "picks up a concrete detail or line from the video and riffs on it";
  }
  return {};
}

// ---- template engine ---------------------------------------------------------------

namespace {

enum class TagKind { Value, Open, Close };

struct Tag {
  TagKind kind;
  std::string name;
  std::size_t begin;  // offset of "{{"
  std::size_t end;    // offset just past "}}"
};

std::vector<Tag> scan_tags(const std::string& text, const std::string& source) {
  std::vector<Tag> tags;
  std::size_t pos = 0;
  while ((pos = text.find("{{", pos)) != std::string::npos) {
    std::size_t close = text.find("}}", pos + 2);
    if (close == std::string::npos) {
      throw ConfigError(source + ": unterminated placeholder starting at offset " + std::to_string(pos));
    }
    std::string inner = utf8::trim(std::string_view(text).substr(pos + 2, close - pos - 2));
    TagKind kind = TagKind::Value;
    if (!inner.empty() && (inner[0] == '#' || inner[0] == '/')) {
      kind = inner[0] == '#' ? TagKind::Open : TagKind::Close;
      inner = utf8::trim(std::string_view(inner).substr(1));
    }
    if (inner.empty()) throw ConfigError(source + ": empty placeholder at offset " + std::to_string(pos));
    tags.push_back({kind, inner, pos, close + 2});
    pos = close + 2;
  }
  return tags;
}

}  // namespace

PromptTemplate PromptTemplate::parse(std::string text, std::string source) {
  PromptTemplate t;
  t.text_ = std::move(text);
  t.source_ = std::move(source);
  std::vector<std::string> stack;
  for (const Tag& tag : scan_tags(t.text_, t.source_)) {
    switch (tag.kind) {
      case TagKind::Value:
        t.placeholders_.insert(tag.name);
        break;
      case TagKind::Open:
        t.sections_.insert(tag.name);
        stack.push_back(tag.name);
        break;
      case TagKind::Close:
        if (stack.empty() || stack.back() != tag.name) {
          throw ConfigError(t.source_ + ": section close {{/" + tag.name + "}} does not match an open section");
        }
        stack.pop_back();
        break;
    }
  }
  if (!stack.empty()) throw ConfigError(t.source_ + ": section {{#" + stack.back() + "}} is never closed");
  return t;
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
  return parse(fs::read_file(path), path.string());
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& values,
                                   const std::map<std::string, bool>& sections) const {
  for (const auto& p : placeholders_) {
    if (!values.count(p)) throw ConfigError(source_ + ": unresolved placeholder {{" + p + "}}");
  }
  for (const auto& s : sections_) {
    if (!sections.count(s)) throw ConfigError(source_ + ": unresolved section {{#" + s + "}}");
  }
  std::string out;
  std::size_t cursor = 0;
  std::size_t skip_depth = 0;  // >0 while inside a switched-off section
  for (const Tag& tag : scan_tags(text_, source_)) {
    if (skip_depth == 0) out.append(text_, cursor, tag.begin - cursor);
    cursor = tag.end;
    switch (tag.kind) {
      case TagKind::Value:
        if (skip_depth == 0) out += values.at(tag.name);
        break;
      case TagKind::Open:
        if (skip_depth > 0 || !sections.at(tag.name)) ++skip_depth;
        break;
      case TagKind::Close:
        if (skip_depth > 0) --skip_depth;
        break;
    }
    // A section tag alone on its line should not leave a blank line behind.
    if (tag.kind != TagKind::Value && cursor < text_.size() && text_[cursor] == '\n' &&
        (tag.begin == 0 || text_[tag.begin - 1] == '\n')) {
      ++cursor;
    }
  }
  if (skip_depth == 0) out.append(text_, cursor, std::string::npos);
  return out;
}

namespace {

std::string single_line(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (c == '\n' || c == '\r' || c == '\t') {
      space = true;
      continue;
    }
    if (space && !out.empty()) out.push_back(' ');
    space = false;
    out.push_back(c);
  }
  return utf8::trim(out);
}

}  // namespace

std::string build_prompt(const PromptBundle& b, const PromptTemplate& tmpl) {
  std::string examples;
  for (std::size_t i = 0; i < b.examples.size(); ++i) {
    examples += "[" + std::to_string(i + 1) + "] " + single_line(b.examples[i]) + "\n";
  }
  if (!examples.empty()) examples.pop_back();

  std::map<std::string, std::string> values{
      {"platform", std::string(to_string(b.platform))},
      {"language", std::string(to_string(b.language))},
      {"introduction", b.introduction},
      {"description", b.description},
      {"transcription", b.transcription},
      {"style", std::string(to_string(b.style))},
      {"style_definition", std::string(style_definition(b.style, b.language))},
      {"examples", examples},
      {"meme_name", b.meme ? b.meme->name : std::string()},
      {"meme_definition", b.meme ? b.meme->definition : std::string()},
      {"length_min", std::to_string(b.length.min)},
      {"length_max", std::to_string(b.length.max)},
  };
  std::map<std::string, bool> sections{
      {"introduction", !b.introduction.empty()},
      {"description", !b.description.empty()},
      {"transcription", !b.transcription.empty()},
      {"examples", !b.examples.empty()},
      {"meme", b.meme.has_value()},
  };
  return tmpl.render(values, sections);
}

std::filesystem::path template_path(const std::filesystem::path& dir, Platform platform) {
  return dir / (platform == Platform::Douyin ? "douyin_zh.txt" : "youtube_en.txt");
}

// ---- completion cleanup ---------------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 12> kRolePrefixes = {
    "assistant", "comment", "reply", "output", "answer", "response",
    "评论",      "回复",    "助手",  "输出", "答",     "弹幕"};

bool strip_role(std::string& s) {
  std::string lowered;
  for (char c : s) lowered.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  for (std::string_view role : kRolePrefixes) {
    if (lowered.compare(0, role.size(), role) != 0) continue;
    std::string_view rest = std::string_view(s).substr(role.size());
    std::size_t skip = 0;
    while (skip < rest.size() && rest[skip] == ' ') ++skip;
    rest.remove_prefix(skip);
    for (std::string_view colon : {std::string_view(":"), std::string_view("：")}) {
      if (rest.substr(0, colon.size()) == colon) {
        s = utf8::trim(rest.substr(colon.size()));
        return true;
      }
    }
  }
  return false;
}

bool strip_quotes(std::string& s) {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 7> kPairs = {{
      {"\"", "\""}, {"'", "'"}, {"“", "”"}, {"‘", "’"}, {"「", "」"}, {"『", "』"}, {"«", "»"},
  }};
  for (auto [open, close] : kPairs) {
    if (s.size() >= open.size() + close.size() && s.compare(0, open.size(), open) == 0 &&
        s.compare(s.size() - close.size(), close.size(), close) == 0) {
      s = utf8::trim(std::string_view(s).substr(open.size(), s.size() - open.size() - close.size()));
      return true;
    }
  }
  return false;
}

}  // namespace

std::string clean_completion(std::string_view raw) {
  std::string line;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t nl = raw.find('\n', pos);
    std::string candidate = utf8::trim(raw.substr(pos, nl == std::string_view::npos ? raw.npos : nl - pos));
    if (!candidate.empty()) {
      line = std::move(candidate);
      break;
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  while (strip_role(line) || strip_quotes(line)) {
  }
  if (line.empty()) throw Error("generation model returned an empty comment");
  return line;
}

std::string generate_comment(GenerationClient& client, std::string_view prompt, const GenerationConfig& config,
                             unsigned max_retries) {
  config.validate();
  std::string raw = with_retries("generation", max_retries, [&] { return client.complete(prompt, config); });
  return clean_completion(raw);
}

// ---- end-to-end step -------------------------------------------------------------------

namespace {

std::string target_text(const VideoRecord& v) {
  std::string s = v.introduction;
  for (const std::string* part : {&v.description, &v.transcription}) {
    if (part->empty()) continue;
    if (!s.empty()) s.push_back('\n');
    s += *part;
  }
  return s;
}

TfIdfModel keyword_model(const Dataset& dataset, const VideoRecord& target) {
  std::vector<TokenList> docs;
  docs.reserve(dataset.size() + 1);
  for (const auto& r : dataset.records()) docs.push_back(tokenize(target_text(r), r.language));
  docs.push_back(tokenize(target_text(target), target.language));
  return fit_tfidf(docs);
}

}  // namespace

GenerationOutcome generate_for_video(const VideoRecord& target, const GenerationResources& res) {
  if (!res.dataset || !res.store || !res.embedder || !res.generator || !res.memes) {
    throw ConfigError("generation resources are incomplete");
  }
  const PromptTemplate* tmpl = target.language == Language::Zh ? res.zh_template : res.en_template;
  if (!tmpl) throw ConfigError("no prompt template for language " + std::string(to_string(target.language)));
  if (res.store->empty()) throw Error("vector store is empty; run the `embed` command first");

  GenerationOutcome out;
  out.config = res.config;

  auto query = with_retries("embedding", res.max_retries,
                            [&] { return res.embedder->embed(build_query_text(target)); });
  if (target.category != VideoCategory::Other) out.query_category = target.category;
  out.retrieval = res.store->topk_similar(query, out.query_category, res.retrieval_k);

  std::vector<RetrievedSample> samples;
  for (const auto& hit : out.retrieval.hits) {
    const VideoRecord* rec = res.dataset->find(hit.sample_id);
    if (!rec) throw Error("vector store entry '" + hit.sample_id + "' is not in the dataset; rebuild with `embed`");
    samples.push_back({rec->id, rec->comments});
  }
  out.decision = decide_style(samples);

  PromptBundle bundle;
  bundle.platform = target.platform;
  bundle.language = target.language;
  bundle.introduction = target.introduction;
  bundle.description = target.description;
  bundle.transcription = target.transcription;
  bundle.style = out.decision.style;
  bundle.length = default_length_bounds(target.language);
  for (const auto& ex : out.decision.examples) bundle.examples.push_back(ex.text);

  if (out.decision.style == StyleLabel::Meme) {
    TfIdfModel model = keyword_model(*res.dataset, target);
    out.keywords = extract_keywords(target_text(target), target.language, model, res.keyword_count);
    out.meme = augment_with_memes(out.keywords, *res.memes, res.encyclopedias, target.language);
    if (out.meme) bundle.meme = out.meme->entry;
  }

  out.prompt = build_prompt(bundle, *tmpl);
  out.comment = generate_comment(*res.generator, out.prompt, res.config, res.max_retries);
  if (out.meme) {
    record_meme_usage(*res.memes, out.meme->entry.name, out.comment);
    log::info("recorded new expression for meme '", out.meme->entry.name, "'");
  }
  return out;
}

nlohmann::ordered_json provenance_json(const VideoRecord& target, const GenerationOutcome& o) {
  nlohmann::ordered_json j;
  j["target_id"] = target.id;
  j["platform"] = to_string(target.platform);
  j["category"] = to_string(target.category);
  j["retrieval"]["scope"] = o.retrieval.category_filtered ? "category" : "global";
  j["retrieval"]["query_category"] =
      o.query_category ? nlohmann::ordered_json(to_string(*o.query_category)) : nlohmann::ordered_json(nullptr);
  j["retrieval"]["hits"] = nlohmann::ordered_json::array();
  for (const auto& h : o.retrieval.hits) {
    j["retrieval"]["hits"].push_back({{"sample_id", h.sample_id}, {"similarity", h.similarity}});
  }
  nlohmann::ordered_json votes;
  for (StyleLabel s : kAllStyles) votes[std::string(to_string(s))] = o.decision.vote_counts[index_of(s)];
  j["vote_counts"] = votes;
  j["style"] = to_string(o.decision.style);
  j["examples"] = nlohmann::ordered_json::array();
  for (const auto& e : o.decision.examples) j["examples"].push_back({{"sample_id", e.sample_id}, {"text", e.text}});
  j["keywords"] = o.keywords;
  if (o.meme) {
    j["meme"] = {{"keyword", o.meme->keyword},
                 {"name", o.meme->entry.name},
                 {"definition", o.meme->entry.definition},
                 {"source", to_string(o.meme->entry.source)},
                 {"cache_hit", o.meme->cache_hit},
                 {"encyclopedia_calls", o.meme->encyclopedia_calls}};
  } else {
    j["meme"] = nullptr;
  }
  j["prompt"] = o.prompt;
  j["generation"] = {{"temperature", o.config.temperature},
                     {"top_p", o.config.top_p},
                     {"repetition_penalty", o.config.repetition_penalty},
                     {"max_tokens", o.config.max_tokens}};
  j["comment"] = o.comment;
  return j;
}

}  // namespace quip
