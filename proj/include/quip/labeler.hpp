#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "quip/corpus.hpp"
#include "quip/textmetrics.hpp"

namespace quip {

// Ordered regex rules; the first match wins. Rule files hold one
// `pattern<TAB>label` per line; blank lines and lines starting with '#' are skipped.
class RuleSet {
 public:
  struct Rule {
    std::string pattern;
    std::regex regex;
    StyleLabel label;
  };
  struct Match {
    std::size_t index;
    StyleLabel label;
  };

  static RuleSet load(const std::filesystem::path& path);
  static RuleSet parse(std::string_view text, std::string_view source = "<rules>");

  // Patterns are ECMAScript, case-insensitive for ASCII. Throws ConfigError if
  // the pattern does not compile.
  void add(std::string pattern, StyleLabel label);
  std::optional<Match> match(std::string_view text) const;
  std::size_t size() const { return rules_.size(); }
  const std::vector<Rule>& rules() const { return rules_; }

 private:
  std::vector<Rule> rules_;
};

// Token -> label map; keys are normalized exactly like tokenize() output, so a
// Chinese entry must be one or two characters to ever match.
class EmotionLexicon {
 public:
  static EmotionLexicon load(const std::filesystem::path& path, Language language);
  static EmotionLexicon parse(std::string_view text, Language language,
                              std::string_view source = "<lexicon>");

  void add(std::string_view token, StyleLabel label, Language language);
  std::optional<StyleLabel> lookup(std::string_view token) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, StyleLabel> entries_;
};

// Label counts per video category, for the MAP fallback.
class PriorTable {
 public:
  void add(VideoCategory category, StyleLabel label, std::uint64_t count = 1);
  std::uint64_t count(VideoCategory category, StyleLabel label) const {
    return counts_[index_of(category)][index_of(label)];
  }
  // Zero for categories without any labeled comment.
  std::uint64_t total(VideoCategory category) const;
  bool has(VideoCategory category) const { return total(category) > 0; }
  double probability(VideoCategory category, StyleLabel label) const;
  std::uint64_t global_count(StyleLabel label) const;
  bool empty() const;

 private:
  std::array<std::array<std::uint64_t, kAllStyles.size()>, kAllCategories.size()> counts_{};
};

PriorTable compute_priors(const Dataset& dataset);

// argmax P(label | category), canonical order on ties. A category with no
// data falls back to global counts; a fully empty table throws quip::Error.
StyleLabel map_fallback(VideoCategory category, const PriorTable& priors);

struct LabelDecision {
  StyleLabel label;
  LabelTier tier;
  // Rule: matched rule index. Similarity: cosine to the description.
  // Lexicon: token position. Knn: winning vote share. MapPrior: P(label | category).
  double evidence;

  bool operator==(const LabelDecision&) const = default;
};

inline constexpr double kContentSimilarityThreshold = 0.10;

struct CascadeOptions {
  double similarity_threshold = kContentSimilarityThreshold;
  std::size_t knn_k = 5;
  double knn_min_similarity = kDefaultKnnMinSimilarity;
  // Tiers to skip: Rule, Similarity, Lexicon or Knn. MapPrior always runs.
  std::array<bool, 5> disabled{};

  bool is_disabled(LabelTier t) const {
    auto i = static_cast<std::size_t>(t);
    return i < disabled.size() && disabled[i];
  }
};

// Borrowed views of everything the cascade consults.
struct LabelerInputs {
  const RuleSet& rules;
  const EmotionLexicon& lexicon;
  const TfIdfModel& model;
  std::span<const LabeledVector> pool;
  const PriorTable& priors;
};

// Tier 2 gate. Inclusive: a similarity equal to the threshold fires.
constexpr bool content_similarity_fires(double similarity, double threshold) {
  return similarity >= threshold;
}

LabelDecision label_comment(std::string_view comment, const VideoRecord& video, const LabelerInputs& in,
                            const CascadeOptions& options = {});

// Per-language resources for annotating a whole dataset.
struct LabelerConfig {
  RuleSet zh_rules;
  RuleSet en_rules;
  EmotionLexicon zh_lexicon;
  EmotionLexicon en_lexicon;
  CascadeOptions options;

  const RuleSet& rules(Language l) const { return l == Language::Zh ? zh_rules : en_rules; }
  const EmotionLexicon& lexicon(Language l) const { return l == Language::Zh ? zh_lexicon : en_lexicon; }
};

// Loads `rules_zh.tsv`, `rules_en.tsv`, `lexicon_zh.tsv`, `lexicon_en.tsv`
// from the given directories.
LabelerConfig load_labeler_config(const std::filesystem::path& rules_dir,
                                  const std::filesystem::path& lexicon_dir);

struct AnnotationEntry {
  std::string video_id;
  std::size_t comment_index;
  LabelDecision decision;
};

// Labels every unlabeled comment in `target`. The TF-IDF space is fit over
// the descriptions and comments of `target` and `seed`; the k-NN pool and the
// priors come from comments that already carry labels in either dataset.
std::vector<AnnotationEntry> annotate_dataset(Dataset& target, const Dataset& seed, const LabelerConfig& config);

// Tab-separated audit log, one line per decision.
std::string format_audit_log(std::span<const AnnotationEntry> entries);

}  // namespace quip
