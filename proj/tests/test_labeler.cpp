#include <doctest.h>

#include <array>
#include <string>

#include "quip/error.hpp"
#include "quip/labeler.hpp"
#include "support.hpp"

using namespace quip;

namespace {

std::string repeat(const std::string& word, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += word + " ";
  return s;
}

VideoRecord video(std::string description, VideoCategory cat = VideoCategory::TalkShow) {
  VideoRecord v;
  v.id = "v";
  v.platform = Platform::YouTube;
  v.language = Language::En;
  v.category = cat;
  v.description = std::move(description);
  return v;
}

}  // namespace

TEST_CASE("rule files: comments, bad labels and bad patterns") {
  auto rules = RuleSet::parse("# header\n\nfoo+\tMeme\n^pov:\tSarcasm\n");
  CHECK(rules.size() == 2);
  CHECK(rules.match("FOOOO")->label == StyleLabel::Meme);
  CHECK(rules.match("pov: x")->index == 1);
  CHECK_FALSE(rules.match("nothing"));
  CHECK_THROWS_WITH_AS(RuleSet::parse("a\tNotALabel\n"), doctest::Contains("line 1"), ConfigError);
  CHECK_THROWS_WITH_AS(RuleSet::parse("ok\tMeme\n(\tMeme\n"), doctest::Contains("line 2"), ConfigError);
  CHECK_THROWS_AS(RuleSet::parse("no tab here\n"), ConfigError);
}

TEST_CASE("lexicon keys must be single tokens") {
  auto zh = EmotionLexicon::parse("笑死\tGeneralHumor\n猫\tMeme\n", Language::Zh);
  CHECK(zh.lookup("笑死") == StyleLabel::GeneralHumor);
  CHECK_THROWS_AS(EmotionLexicon::parse("笑死我\tMeme\n", Language::Zh), ConfigError);
  CHECK_THROWS_AS(EmotionLexicon::parse("two words\tMeme\n", Language::En), ConfigError);
  auto en = EmotionLexicon::parse("Hilarious\tGeneralHumor\n", Language::En);
  CHECK(en.lookup("hilarious") == StyleLabel::GeneralHumor);
}

TEST_CASE("shipped rule and lexicon files load") {
  auto cfg = load_labeler_config(qt::data_dir() / "rules", qt::data_dir() / "lexicon");
  CHECK(cfg.zh_rules.size() > 5);
  CHECK(cfg.en_rules.size() > 5);
  CHECK(cfg.zh_rules.match("2333333")->label == StyleLabel::GeneralHumor);
  CHECK(cfg.en_rules.match("POV: you are the frisbee")->label == StyleLabel::Meme);
  CHECK(cfg.en_rules.match("what a day /s")->label == StyleLabel::Sarcasm);
  CHECK(cfg.zh_lexicon.lookup("躺平") == StyleLabel::Meme);
}

TEST_CASE("priors recount and MAP fallback") {
  qt::Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<VideoRecord> rs;
    for (int i = 0; i < 12; ++i) rs.push_back(qt::random_record(rng, "r" + std::to_string(i)));
    Dataset ds(rs);
    auto priors = compute_priors(ds);
    std::uint64_t counts[6][6] = {};
    for (auto& r : rs) {
      for (auto& c : r.comments) {
        if (c.c_label) ++counts[index_of(r.category)][index_of(*c.c_label)];
      }
    }
    for (auto cat : kAllCategories) {
      for (auto s : kAllStyles) CHECK(priors.count(cat, s) == counts[index_of(cat)][index_of(s)]);
    }
  }
  PriorTable p;
  p.add(VideoCategory::FunnyAnimal, StyleLabel::Sarcasm, 2);
  p.add(VideoCategory::FunnyAnimal, StyleLabel::Puns, 2);
  p.add(VideoCategory::TalkShow, StyleLabel::Meme, 5);
  CHECK(map_fallback(VideoCategory::FunnyAnimal, p) == StyleLabel::Puns);   // tie, canonical
  CHECK(map_fallback(VideoCategory::TalkShow, p) == StyleLabel::Meme);
  CHECK(map_fallback(VideoCategory::Other, p) == StyleLabel::Meme);         // global counts
  CHECK(p.probability(VideoCategory::FunnyAnimal, StyleLabel::Puns) == 0.5);
  CHECK_THROWS_AS(map_fallback(VideoCategory::Other, PriorTable{}), Error);
}

TEST_CASE("content similarity boundary is inclusive at exactly 0.10") {
  // Every idf is 1 in a one-document corpus, so the cosine is 1 / sqrt(1 * 100).
  auto model = fit_tfidf(std::vector<TokenList>{tokenize("alpha beta gamma delta", Language::En)});
  RuleSet rules;
  EmotionLexicon lex;
  PriorTable priors;
  priors.add(VideoCategory::TalkShow, StyleLabel::Sarcasm);
  LabelerInputs in{rules, lex, model, {}, priors};
  auto v = video("alpha " + repeat("beta", 7) + repeat("gamma", 7) + "delta");

  auto desc = vectorize(model, tokenize(v.description, Language::En));
  auto com = vectorize(model, tokenize("alpha", Language::En));
  REQUIRE(cosine(com, desc) == 0.1);

  auto at = label_comment("alpha", v, in);
  CHECK(at.tier == LabelTier::Similarity);
  CHECK(at.label == StyleLabel::ContentExtraction);
  CHECK(at.evidence == 0.1);

  CascadeOptions raised;
  raised.similarity_threshold = 0.10 + 1e-9;
  auto above = label_comment("alpha", v, in, raised);
  CHECK(above.tier == LabelTier::MapPrior);
  CHECK(above.label == StyleLabel::Sarcasm);

  CHECK(content_similarity_fires(0.10, 0.10));
  CHECK_FALSE(content_similarity_fires(0.10 - 1e-9, 0.10));
}

TEST_CASE("cascade order: rule, similarity, lexicon, knn, prior") {
  auto model = fit_tfidf(std::vector<TokenList>{tokenize("dog park ball sunny happy random words", Language::En)});
  auto rules = RuleSet::parse("\\blol\\b\tGeneralHumor\n");
  auto lex = EmotionLexicon::parse("sunny\tRhyming\n", Language::En);
  PriorTable priors;
  priors.add(VideoCategory::TalkShow, StyleLabel::Puns);
  std::vector<LabeledVector> pool = {{vectorize(model, tokenize("random words", Language::En)), StyleLabel::Meme}};
  LabelerInputs in{rules, lex, model, pool, priors};
  auto v = video("dog park ball");

  CHECK(label_comment("dog park lol", v, in).tier == LabelTier::Rule);        // rule beats similarity
  CHECK(label_comment("dog park sunny", v, in).tier == LabelTier::Similarity);  // similarity beats lexicon
  auto lexd = label_comment("sunny random", v, in);
  CHECK(lexd.tier == LabelTier::Lexicon);
  CHECK(lexd.label == StyleLabel::Rhyming);
  auto knn = label_comment("random words", v, in);
  CHECK(knn.tier == LabelTier::Knn);
  CHECK(knn.label == StyleLabel::Meme);
  auto prior = label_comment("nothing known here", v, in);
  CHECK(prior.tier == LabelTier::MapPrior);
  CHECK(prior.label == StyleLabel::Puns);

  CascadeOptions no_rules;
  no_rules.disabled[static_cast<std::size_t>(LabelTier::Rule)] = true;
  CHECK(label_comment("dog park lol", v, in, no_rules).tier == LabelTier::Similarity);
}

TEST_CASE("annotate_dataset labels only unlabeled comments and logs each decision") {
  auto cfg = load_labeler_config(qt::data_dir() / "rules", qt::data_dir() / "lexicon");
  Dataset seed = load_dataset(qt::data_dir() / "fixtures" / "seed.jsonl");
  VideoRecord r;
  r.id = "t1";
  r.platform = Platform::YouTube;
  r.language = Language::En;
  r.category = VideoCategory::FunnyAnimal;
  r.description = "A cat jumps when it sees a cucumber";
  r.comments = {{"POV: you are the cucumber", 10, {}, {}},
                {"already labeled", 5, StyleLabel::Puns, LabelTier::Manual},
                {"qwerty asdf", 1, {}, {}}};
  Dataset target({r});
  auto audit = annotate_dataset(target, seed, cfg);
  REQUIRE(audit.size() == 2);
  CHECK(audit[0].comment_index == 0);
  CHECK(audit[0].decision.tier == LabelTier::Rule);
  CHECK(audit[1].comment_index == 2);
  CHECK(audit[1].decision.tier == LabelTier::MapPrior);
  for (auto& c : target[0].comments) CHECK(c.c_label.has_value());
  CHECK(target[0].comments[1].label_tier == LabelTier::Manual);
  auto log = format_audit_log(audit);
  CHECK(log.rfind("video_id\tcomment_index\tlabel\ttier\tevidence\n", 0) == 0);
  CHECK(log.find("t1\t0\tMeme\tRule\t") != std::string::npos);
}

TEST_CASE("disabling earlier tiers never changes which later tier fires") {
  const std::vector<std::string> vocab{"lol", "dog", "park", "ball", "sunny", "gloomy", "random", "words",
                                       "other", "stuff", "zzz", "qqq"};
  std::string corpus;
  for (auto& w : vocab) corpus += w + " ";
  auto model = fit_tfidf(std::vector<TokenList>{tokenize(corpus, Language::En),
                                                tokenize("dog park ball", Language::En),
                                                tokenize("random words stuff", Language::En)});
  auto rules = RuleSet::parse("\\blol\\b\tGeneralHumor\n");
  auto lex = EmotionLexicon::parse("sunny\tRhyming\ngloomy\tSarcasm\n", Language::En);
  PriorTable priors;
  priors.add(VideoCategory::TalkShow, StyleLabel::Puns);
  std::vector<LabeledVector> pool = {
      {vectorize(model, tokenize("random words", Language::En)), StyleLabel::Meme},
      {vectorize(model, tokenize("other stuff", Language::En)), StyleLabel::Sarcasm},
      {vectorize(model, tokenize("random stuff", Language::En)), StyleLabel::Meme}};
  LabelerInputs in{rules, lex, model, pool, priors};
  auto v = video("dog park ball");

  qt::Rng rng(211);
  std::array<std::size_t, 5> seen{};
  for (int t = 0; t < 2000; ++t) {
    std::string text;
    for (std::size_t i = rng.range(1, 5); i > 0; --i) text += rng.pick(vocab) + " ";
    auto full = label_comment(text, v, in);
    auto fired = static_cast<std::size_t>(full.tier);
    ++seen[fired];
    // Any subset of the earlier tiers switched off leaves the decision alone.
    for (unsigned mask = 0; mask < (1u << fired); ++mask) {
      CascadeOptions o;
      for (std::size_t i = 0; i < fired; ++i) o.disabled[i] = (mask >> i) & 1;
      CHECK(label_comment(text, v, in, o) == full);
    }
    // Switching off the tier that fired hands the comment to a later one.
    if (full.tier != LabelTier::MapPrior) {
      CascadeOptions o;
      o.disabled[fired] = true;
      CHECK(static_cast<std::size_t>(label_comment(text, v, in, o).tier) > fired);
    }
    CHECK(label_comment(text, v, in) == full);
  }
  for (auto n : seen) CHECK(n > 0);  // the generator reaches every tier
}
