#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quip/corpus.hpp"
#include "quip/services.hpp"
#include "quip/textmetrics.hpp"

namespace quip {

struct RetrievedSample {
  std::string sample_id;
  std::vector<CommentRecord> comments;  // like-ranked, as stored in the dataset
};

struct StyleExample {
  std::string text;
  std::string sample_id;
  bool operator==(const StyleExample&) const = default;
};

inline constexpr std::size_t kExamplesPerSample = 2;

struct StyleDecision {
  StyleLabel style;
  std::array<std::size_t, kAllStyles.size()> vote_counts{};
  std::vector<StyleExample> examples;
};

// Counts the labels of every comment of every retrieved sample; the argmax
// (canonical order on ties) is the style. Up to two comments of that style
// are taken from each sample, in stored order. Throws quip::Error when no
// comment carries a label.
StyleDecision decide_style(std::span<const RetrievedSample> retrieved);

// Top-n distinct tokens of `text` by TF-IDF weight, ties by first appearance.
std::vector<std::string> extract_keywords(std::string_view text, Language language, const TfIdfModel& model,
                                          std::size_t n = 5);

struct MemeEntry {
  std::string name;
  std::string definition;
  std::vector<std::string> expressions;
  MemeSource source = MemeSource::LocalCache;
  bool operator==(const MemeEntry&) const = default;
};

// Persistent meme knowledge base. Names are matched after width folding,
// lower-casing and trimming. Entries and expressions only ever grow. Every
// mutation is written through to `path` under an exclusive file lock.
class MemeCache {
 public:
  // A missing file yields an empty cache bound to `path`.
  static MemeCache open(const std::filesystem::path& path);
  static std::string normalize_name(std::string_view name);

  const MemeEntry* find(std::string_view name) const;
  // Inserts, or merges definition/expressions into an existing entry.
  const MemeEntry& insert(MemeEntry entry);
  // Appends unless the exact string is already present. Throws quip::Error
  // for an unknown meme.
  void append_expression(std::string_view name, std::string expression);

  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, MemeEntry>& entries() const { return entries_; }
  const std::filesystem::path& path() const { return path_; }

  // One JSON object per line, ordered by normalized name.
  std::string serialize() const;
  static MemeCache parse(std::string_view text, std::filesystem::path path = {});
  void save() const;

 private:
  std::filesystem::path path_;
  std::map<std::string, MemeEntry> entries_;
};

// Encyclopedias consulted per language, in order.
struct EncyclopediaSet {
  std::vector<EncyclopediaClient*> zh;
  std::vector<EncyclopediaClient*> en;
  std::span<EncyclopediaClient* const> for_language(Language l) const { return l == Language::Zh ? zh : en; }
};

struct MemeLookup {
  MemeEntry entry;
  std::string keyword;
  bool cache_hit = false;
  unsigned encyclopedia_calls = 0;
};

// For each keyword in order: cache first, then the language's encyclopedias.
// The first hit wins and is persisted. Client failures count as misses.
std::optional<MemeLookup> augment_with_memes(std::span<const std::string> keywords, MemeCache& cache,
                                             const EncyclopediaSet& encyclopedias, Language language);

// Records a generated comment against a meme and persists the cache.
void record_meme_usage(MemeCache& cache, std::string_view meme_name, std::string generated_comment);

}  // namespace quip
