#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "quip/corpus.hpp"
#include "quip/generation_config.hpp"
#include "quip/retrieval.hpp"
#include "quip/services.hpp"
#include "quip/stylist.hpp"

namespace quip {

struct PromptBundle {
  Platform platform = Platform::Douyin;
  Language language = Language::Zh;
  std::string introduction;
  std::string description;
  std::string transcription;
  StyleLabel style = StyleLabel::GeneralHumor;
  std::vector<std::string> examples;
  std::optional<MemeEntry> meme;  // only meaningful for the Meme style
  LengthBounds length = default_length_bounds(Language::Zh);
};

// Short definition of each style, worded for the prompt language.
std::string_view style_definition(StyleLabel style, Language language);

// Mustache-like template: `{{name}}` substitutes a value, and
// `{{#name}}...{{/name}}` keeps its body only when `name` is switched on.
// Sections may nest but must be balanced.
class PromptTemplate {
 public:
  static PromptTemplate parse(std::string text, std::string source = "<template>");
  static PromptTemplate load(const std::filesystem::path& path);

  // Throws ConfigError naming any placeholder without a value and any
  // section without a switch, whether or not it would be rendered.
  std::string render(const std::map<std::string, std::string>& values,
                     const std::map<std::string, bool>& sections) const;

  const std::string& text() const { return text_; }
  const std::string& source() const { return source_; }
  const std::set<std::string>& placeholders() const { return placeholders_; }
  const std::set<std::string>& sections() const { return sections_; }

 private:
  std::string text_;
  std::string source_;
  std::set<std::string> placeholders_;
  std::set<std::string> sections_;
};

// Values: platform, language, introduction, description, transcription,
// style, style_definition, examples, meme_name, meme_definition,
// length_min, length_max. Sections: introduction, description,
// transcription, examples, meme (each on when non-empty/present).
std::string build_prompt(const PromptBundle& bundle, const PromptTemplate& tmpl);

// `douyin_zh.txt` or `youtube_en.txt` inside `dir`.
std::filesystem::path template_path(const std::filesystem::path& dir, Platform platform);

// First non-blank line, with role prefixes ("Comment:", "评论：" ...) and
// wrapping quotes removed, then trimmed. Throws quip::Error when nothing is left.
std::string clean_completion(std::string_view raw);

// Passes `config` through unchanged. Client failures are retried
// (1 + max_retries attempts in total); an empty completion is an error.
std::string generate_comment(GenerationClient& client, std::string_view prompt, const GenerationConfig& config,
                             unsigned max_retries = 2);

// Everything the retrieval-guided generation step needs.
struct GenerationResources {
  const Dataset* dataset = nullptr;
  const VectorStore* store = nullptr;
  EmbeddingClient* embedder = nullptr;
  GenerationClient* generator = nullptr;
  MemeCache* memes = nullptr;
  EncyclopediaSet encyclopedias;
  const PromptTemplate* zh_template = nullptr;
  const PromptTemplate* en_template = nullptr;
  std::size_t retrieval_k = 3;
  std::size_t keyword_count = 5;
  GenerationConfig config;
  unsigned max_retries = 2;
};

struct GenerationOutcome {
  std::string comment;
  std::optional<VideoCategory> query_category;  // nullopt for Other: global search
  RetrievalResult retrieval;
  StyleDecision decision;
  std::vector<std::string> keywords;  // only collected for the Meme style
  std::optional<MemeLookup> meme;
  std::string prompt;
  GenerationConfig config;
};

// Embed the target, retrieve, vote on a style, pick examples, optionally
// look up a meme, build the prompt and generate. A meme that made it into
// the prompt gets the comment recorded as a new expression.
GenerationOutcome generate_for_video(const VideoRecord& target, const GenerationResources& res);

// Audit record of one generation: retrieval hits, votes, style, examples,
// meme, prompt and sampling settings.
nlohmann::ordered_json provenance_json(const VideoRecord& target, const GenerationOutcome& outcome);

}  // namespace quip
