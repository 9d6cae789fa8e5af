#include "quip/labeler.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "quip/error.hpp"
#include "quip/fsutil.hpp"
#include "quip/unicode.hpp"

namespace quip {
namespace {

struct TsvLine {
  std::size_t number;
  std::string key;
  std::string value;
};

// Splits `key<TAB>value` lines, skipping blanks and '#' comments.
std::vector<TsvLine> split_tsv(std::string_view text, std::string_view source) {
  std::vector<TsvLine> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    std::size_t tab = line.rfind('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw ConfigError(std::string(source) + ": line " + std::to_string(line_no) +
                        ": expected <text><TAB><label>");
    }
    out.push_back({line_no, std::string(line.substr(0, tab)), utf8::trim(line.substr(tab + 1))});
  }
  return out;
}

StyleLabel parse_label_or_throw(const TsvLine& l, std::string_view source) {
  auto label = parse_style(l.value);
  if (!label) {
    throw ConfigError(std::string(source) + ": line " + std::to_string(l.number) + ": unknown label '" +
                      l.value + "'");
  }
  return *label;
}

}  // namespace

RuleSet RuleSet::load(const std::filesystem::path& path) {
  return parse(fs::read_file(path), path.string());
}

RuleSet RuleSet::parse(std::string_view text, std::string_view source) {
  RuleSet set;
  for (const auto& l : split_tsv(text, source)) {
    StyleLabel label = parse_label_or_throw(l, source);
    try {
      set.add(l.key, label);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(source) + ": line " + std::to_string(l.number) + ": " + e.what());
    }
  }
  return set;
}

void RuleSet::add(std::string pattern, StyleLabel label) {
  try {
    std::regex re(pattern, std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
    rules_.push_back({std::move(pattern), std::move(re), label});
  } catch (const std::regex_error& e) {
    throw ConfigError("invalid pattern '" + pattern + "': " + e.what());
  }
}

std::optional<RuleSet::Match> RuleSet::match(std::string_view text) const {
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (std::regex_search(text.begin(), text.end(), rules_[i].regex)) return Match{i, rules_[i].label};
  }
  return std::nullopt;
}

EmotionLexicon EmotionLexicon::load(const std::filesystem::path& path, Language language) {
  return parse(fs::read_file(path), language, path.string());
}

EmotionLexicon EmotionLexicon::parse(std::string_view text, Language language, std::string_view source) {
  EmotionLexicon lex;
  for (const auto& l : split_tsv(text, source)) {
    StyleLabel label = parse_label_or_throw(l, source);
    try {
      lex.add(l.key, label, language);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(source) + ": line " + std::to_string(l.number) + ": " + e.what());
    }
  }
  return lex;
}

void EmotionLexicon::add(std::string_view token, StyleLabel label, Language language) {
  std::string key = utf8::normalize(utf8::trim(token));
  auto toks = tokenize(key, language).tokens;
  if (std::find(toks.begin(), toks.end(), key) == toks.end()) {
    throw ConfigError("lexicon entry '" + std::string(token) + "' is not a single token");
  }
  entries_[key] = label;
}

std::optional<StyleLabel> EmotionLexicon::lookup(std::string_view token) const {
  auto it = entries_.find(std::string(token));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void PriorTable::add(VideoCategory category, StyleLabel label, std::uint64_t count) {
  counts_[index_of(category)][index_of(label)] += count;
}

std::uint64_t PriorTable::total(VideoCategory category) const {
  std::uint64_t t = 0;
  for (auto c : counts_[index_of(category)]) t += c;
  return t;
}

double PriorTable::probability(VideoCategory category, StyleLabel label) const {
  auto t = total(category);
  return t ? static_cast<double>(count(category, label)) / static_cast<double>(t) : 0.0;
}

std::uint64_t PriorTable::global_count(StyleLabel label) const {
  std::uint64_t t = 0;
  for (const auto& row : counts_) t += row[index_of(label)];
  return t;
}

bool PriorTable::empty() const {
  for (StyleLabel l : kAllStyles) {
    if (global_count(l) > 0) return false;
  }
  return true;
}

PriorTable compute_priors(const Dataset& dataset) {
  PriorTable table;
  for (const auto& r : dataset.records()) {
    for (const auto& c : r.comments) {
      if (c.c_label) table.add(r.category, *c.c_label);
    }
  }
  return table;
}

StyleLabel map_fallback(VideoCategory category, const PriorTable& priors) {
  if (priors.empty()) throw Error("MAP fallback has no labeled comments to draw priors from");
  std::size_t best = 0;
  if (priors.has(category)) {
    for (std::size_t l = 1; l < kAllStyles.size(); ++l) {
      if (priors.count(category, kAllStyles[l]) > priors.count(category, kAllStyles[best])) best = l;
    }
  } else {
    for (std::size_t l = 1; l < kAllStyles.size(); ++l) {
      if (priors.global_count(kAllStyles[l]) > priors.global_count(kAllStyles[best])) best = l;
    }
  }
  return kAllStyles[best];
}

LabelDecision label_comment(std::string_view comment, const VideoRecord& video, const LabelerInputs& in,
                            const CascadeOptions& options) {
  if (!options.is_disabled(LabelTier::Rule)) {
    if (auto m = in.rules.match(comment)) {
      return {m->label, LabelTier::Rule, static_cast<double>(m->index)};
    }
  }

  TokenList tokens = tokenize(comment, video.language);
  SparseVector comment_vec = vectorize(in.model, tokens);

  if (!options.is_disabled(LabelTier::Similarity)) {
    SparseVector desc_vec = vectorize(in.model, tokenize(video.description, video.language));
    double sim = cosine(comment_vec, desc_vec);
    if (content_similarity_fires(sim, options.similarity_threshold)) {
      return {StyleLabel::ContentExtraction, LabelTier::Similarity, sim};
    }
  }

  if (!options.is_disabled(LabelTier::Lexicon)) {
    for (std::size_t i = 0; i < tokens.tokens.size(); ++i) {
      if (auto label = in.lexicon.lookup(tokens.tokens[i])) {
        return {*label, LabelTier::Lexicon, static_cast<double>(i)};
      }
    }
  }

  if (!options.is_disabled(LabelTier::Knn)) {
    if (auto vote = knn_vote(comment_vec, in.pool, options.knn_k, options.knn_min_similarity)) {
      return {vote->label, LabelTier::Knn, vote->vote_share};
    }
  }

  StyleLabel label = map_fallback(video.category, in.priors);
  double p = in.priors.has(video.category)
                 ? in.priors.probability(video.category, label)
                 : [&] {
                     std::uint64_t total = 0;
                     for (StyleLabel l : kAllStyles) total += in.priors.global_count(l);
                     return static_cast<double>(in.priors.global_count(label)) / static_cast<double>(total);
                   }();
  return {label, LabelTier::MapPrior, p};
}

LabelerConfig load_labeler_config(const std::filesystem::path& rules_dir,
                                  const std::filesystem::path& lexicon_dir) {
  LabelerConfig cfg;
  cfg.zh_rules = RuleSet::load(rules_dir / "rules_zh.tsv");
  cfg.en_rules = RuleSet::load(rules_dir / "rules_en.tsv");
  cfg.zh_lexicon = EmotionLexicon::load(lexicon_dir / "lexicon_zh.tsv", Language::Zh);
  cfg.en_lexicon = EmotionLexicon::load(lexicon_dir / "lexicon_en.tsv", Language::En);
  return cfg;
}

std::vector<AnnotationEntry> annotate_dataset(Dataset& target, const Dataset& seed, const LabelerConfig& config) {
  std::vector<TokenList> docs;
  for (const Dataset* ds : {static_cast<const Dataset*>(&target), &seed}) {
    for (const auto& r : ds->records()) {
      docs.push_back(tokenize(r.description, r.language));
      for (const auto& c : r.comments) docs.push_back(tokenize(c.text, r.language));
    }
  }
  std::vector<AnnotationEntry> audit;
  if (docs.empty()) return audit;
  TfIdfModel model = fit_tfidf(docs);

  PriorTable priors = compute_priors(seed);
  std::vector<LabeledVector> pool;
  for (const Dataset* ds : {&seed, static_cast<const Dataset*>(&target)}) {
    for (const auto& r : ds->records()) {
      for (const auto& c : r.comments) {
        if (!c.c_label) continue;
        pool.push_back({vectorize(model, tokenize(c.text, r.language)), *c.c_label});
        if (ds == &target) priors.add(r.category, *c.c_label);
      }
    }
  }

  for (auto& r : target.mutable_records()) {
    LabelerInputs in{config.rules(r.language), config.lexicon(r.language), model, pool, priors};
    for (std::size_t i = 0; i < r.comments.size(); ++i) {
      auto& c = r.comments[i];
      if (c.c_label) continue;
      LabelDecision d = label_comment(c.text, r, in, config.options);
      c.c_label = d.label;
      c.label_tier = d.tier;
      audit.push_back({r.id, i, d});
    }
  }
  return audit;
}

std::string format_audit_log(std::span<const AnnotationEntry> entries) {
  std::ostringstream os;
  os << "video_id\tcomment_index\tlabel\ttier\tevidence\n";
  for (const auto& e : entries) {
    char ev[32];
    std::snprintf(ev, sizeof ev, "%.6f", e.decision.evidence);
    os << e.video_id << '\t' << e.comment_index << '\t' << to_string(e.decision.label) << '\t'
       << to_string(e.decision.tier) << '\t' << ev << '\n';
  }
  return os.str();
}

}  // namespace quip
