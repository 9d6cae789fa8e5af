// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "quip/error.hpp"
#include "quip/fsutil.hpp"
#include "quip/genpipe.hpp"
#include "quip/labeler.hpp"
#include "quip/log.hpp"
#include "quip/media.hpp"
#include "quip/pipeline.hpp"
#include "quip/retrieval.hpp"
#include "quip/scorer.hpp"
#include "quip/stylist.hpp"
#include "support.hpp"

using namespace quip;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects the first few mismatches so a FAIL line says what went wrong.
struct Check {
  std::vector<std::string> problems;
  void expect(bool ok, const std::string& what) {
    if (!ok && problems.size() < 5) problems.push_back(what);
    if (!ok) ++failures;
  }
  std::size_t failures = 0;
};

int report(int n, const std::string& title, const Check& c, const std::string& detail = {}) {
  bool pass = c.failures == 0;
  std::cout << (pass ? "PASS" : "FAIL") << " " << n << " " << title;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << "\n";
  for (const auto& p : c.problems) std::cout << "    " << p << "\n";
  if (c.failures > c.problems.size()) std::cout << "    ... " << c.failures << " mismatches in total\n";
  return pass ? 0 : 1;
}

std::string fmt_s(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

// ---- 1 ----
int tiered_count() {
  Check c;
  auto t0 = Clock::now();
  for (std::size_t n = 1; n <= 1000000; ++n) {
    std::size_t want = n <= 12 ? n : n <= 60 ? 12 : n <= 160 ? 16 : 24;
    std::size_t got = tiered_frame_count(n);
    c.expect(got == want, "N=" + std::to_string(n) + " got " + std::to_string(got));
  }
  const std::size_t ns[] = {12, 13, 60, 61, 160, 161}, ks[] = {12, 12, 12, 16, 16, 24};
  for (int i = 0; i < 6; ++i) c.expect(tiered_frame_count(ns[i]) == ks[i], "boundary N=" + std::to_string(ns[i]));
  double dt = seconds_since(t0);
  c.expect(dt < 1.0, "runtime " + fmt_s(dt));
  return report(1, "tiered frame count exact for N in [1, 1e6]", c, fmt_s(dt));
}

// ---- 2 ----
int bucket_midpoints_exact() {
  Check c;
  auto t0 = Clock::now();
  for (std::size_t n = 1; n <= 5000; ++n) {
    std::size_t k = tiered_frame_count(n);
    auto got = bucket_midpoints(n, k);
    c.expect(got.size() == k, "N=" + std::to_string(n) + " wrong count");
    for (std::size_t i = 0; i < got.size(); ++i) {
      c.expect(got[i] < n, "N=" + std::to_string(n) + " index out of range");
      if (i) c.expect(got[i - 1] < got[i], "N=" + std::to_string(n) + " not strictly increasing");
    }
    c.expect(got == qt::bucket_oracle(n, k), "N=" + std::to_string(n) + " differs from oracle");
  }
  double dt = seconds_since(t0);
  c.expect(dt < 5.0, "runtime " + fmt_s(dt));
  return report(2, "bucket midpoints match the enumeration oracle for N in [1, 5000]", c, fmt_s(dt));
}

// ---- 3 ----
// Planted corpus: each comment carries evidence for exactly one tier, with
// every earlier tier guaranteed silent.
int cascade_planted() {
  Check c;
  qt::Rng rng(2024);
  const std::size_t videos = 10;
  std::vector<TokenList> docs;
  std::vector<VideoRecord> vids;
  for (std::size_t v = 0; v < videos; ++v) {
    VideoRecord r;
    r.id = "v" + std::to_string(v);
    r.platform = Platform::YouTube;
    r.language = Language::En;
    r.category = VideoCategory::FunnyAnimal;
    for (int w = 0; w < 3; ++w) r.description += "desc" + std::to_string(v) + "w" + std::to_string(w) + " ";
    docs.push_back(tokenize(r.description, Language::En));
    vids.push_back(r);
  }
  std::vector<std::string> pool_texts;
  for (int p = 0; p < 12; ++p) pool_texts.push_back("poolword" + std::to_string(p) + " poolshared");
  for (auto& t : pool_texts) docs.push_back(tokenize(t, Language::En));
  auto model = fit_tfidf(docs);

  auto rules = RuleSet::parse("\\bplantedrule\\b\tSarcasm\n");
  auto lex = EmotionLexicon::parse("plantedfeeling\tRhyming\n", Language::En);
  std::vector<LabeledVector> pool;
  for (std::size_t p = 0; p < pool_texts.size(); ++p) {
    pool.push_back({vectorize(model, tokenize(pool_texts[p], Language::En)), p % 3 ? StyleLabel::Meme : StyleLabel::Puns});
  }
  PriorTable priors;
  priors.add(VideoCategory::FunnyAnimal, StyleLabel::GeneralHumor, 3);
  priors.add(VideoCategory::FunnyAnimal, StyleLabel::Puns, 1);
  LabelerInputs in{rules, lex, model, pool, priors};

  auto noise = [&] {
    std::string s;
    for (std::size_t i = rng.range(0, 3); i > 0; --i) s += " oov" + std::to_string(rng.next() % 100000);
    return s;
  };
  std::size_t labeled = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    const auto& v = vids[rng.index(videos)];
    std::string desc_word = "desc" + v.id.substr(1) + "w" + std::to_string(rng.index(3));
    LabelTier want = static_cast<LabelTier>(i % 5);
    std::string text;
    switch (want) {
      case LabelTier::Rule: text = desc_word + " plantedrule plantedfeeling" + noise(); break;
      case LabelTier::Similarity: text = desc_word + " plantedfeeling" + noise(); break;
      case LabelTier::Lexicon: text = "plantedfeeling" + noise(); break;
      case LabelTier::Knn: text = "poolword" + std::to_string(rng.index(12)) + noise(); break;
      default: text = "nothing" + noise(); break;
    }
    auto d = label_comment(text, v, in);
    ++labeled;
    c.expect(d.tier == want, "comment '" + text + "' went to tier " + std::string(to_string(d.tier)) + ", wanted " +
                                 std::string(to_string(want)));
    StyleLabel want_label = want == LabelTier::Rule         ? StyleLabel::Sarcasm
                            : want == LabelTier::Similarity ? StyleLabel::ContentExtraction
                            : want == LabelTier::Lexicon    ? StyleLabel::Rhyming
                            : want == LabelTier::MapPrior   ? StyleLabel::GeneralHumor
                                                            : d.label;
    c.expect(d.label == want_label, "comment '" + text + "' got label " + std::string(to_string(d.label)));
    if (want == LabelTier::Knn) {
      auto q = vectorize(model, tokenize(text, Language::En));
      auto oracle = qt::knn_oracle(q, pool, 5, kDefaultKnnMinSimilarity);
      c.expect(oracle && oracle->label == d.label, "k-NN label differs from oracle for '" + text + "'");
    }
  }
  c.expect(labeled == 200, "corpus size");

  // Exact boundary: a one-document model makes every idf 1, so "alpha"
  // against alpha + 7 beta + 7 gamma + delta has cosine 1 / sqrt(100) = 0.1.
  auto bmodel = fit_tfidf(std::vector<TokenList>{tokenize("alpha beta gamma delta", Language::En)});
  RuleSet no_rules;
  EmotionLexicon no_lex;
  LabelerInputs bin{no_rules, no_lex, bmodel, {}, priors};
  VideoRecord bv = vids[0];
  bv.description = "alpha";
  for (int i = 0; i < 7; ++i) bv.description += " beta";
  for (int i = 0; i < 7; ++i) bv.description += " gamma";
  bv.description += " delta";
  double sim = cosine(vectorize(bmodel, tokenize("alpha", Language::En)),
                      vectorize(bmodel, tokenize(bv.description, Language::En)));
  c.expect(sim == 0.1, "constructed similarity is not exactly 0.10");
  auto at = label_comment("alpha", bv, bin);
  c.expect(at.tier == LabelTier::Similarity && at.label == StyleLabel::ContentExtraction,
           "similarity exactly 0.10 did not label ContentExtraction");
  c.expect(content_similarity_fires(0.10, kContentSimilarityThreshold), "0.10 must fire");
  c.expect(!content_similarity_fires(0.10 - 1e-9, kContentSimilarityThreshold), "0.10 - 1e-9 must not fire");
  // Same check through the cascade: a threshold 1e-9 above the similarity stands in for a similarity 1e-9 below it.
  CascadeOptions raised;
  raised.similarity_threshold = 0.10 + 1e-9;
  c.expect(label_comment("alpha", bv, bin, raised).tier != LabelTier::Similarity,
           "similarity 1e-9 below the threshold still fired");
  return report(3, "cascade labels a 200-comment planted corpus by the intended tier; 0.10 boundary inclusive", c);
}

// ---- 4 ----
int knn_and_topk_oracles() {
  Check c;
  qt::Rng rng(4);
  for (int t = 0; t < 500; ++t) {
    std::vector<LabeledVector> pool;
    for (std::size_t i = rng.range(1, 40); i > 0; --i) {
      std::vector<SparseVector::Entry> e;
      for (std::size_t j = rng.range(1, 4); j > 0; --j) e.push_back({std::uint32_t(rng.index(8)), double(rng.range(1, 3))});
      pool.push_back({SparseVector::from_entries(e), rng.pick(kAllStyles)});
    }
    std::vector<SparseVector::Entry> q;
    for (std::size_t j = rng.range(1, 4); j > 0; --j) q.push_back({std::uint32_t(rng.index(10)), rng.uniform(0.1, 3)});
    auto query = SparseVector::from_entries(q);
    std::size_t k = rng.range(1, 7);
    auto got = knn_vote(query, pool, k, kDefaultKnnMinSimilarity);
    auto want = qt::knn_oracle(query, pool, k, kDefaultKnnMinSimilarity);
    bool same = got.has_value() == want.has_value() &&
                (!got || (got->label == want->label && got->top_similarity == want->top_similarity &&
                          got->vote_share == want->vote_share));
    c.expect(same, "knn trial " + std::to_string(t));
  }
  for (int t = 0; t < 500; ++t) {
    std::size_t dim = rng.range(1, 32);
    std::vector<qt::StoreItem> items;
    VectorStore s;
    for (std::size_t i = rng.range(1, 60); i > 0; --i) {
      qt::StoreItem it{"id" + std::to_string(i) + "-" + std::to_string(rng.next() % 1000), rng.pick(kAllCategories), {}};
      for (std::size_t d = 0; d < dim; ++d) it.v.push_back(rng.uniform(-1, 1));
      // Some exact duplicates so the id tie-break is exercised.
      if (!items.empty() && rng.coin(0.15)) it.v = items.back().v;
      s.add(it.id, it.cat, it.v);
      items.push_back(it);
    }
    std::vector<double> qv(dim);
    for (auto& x : qv) x = rng.uniform(-1, 1);
    std::optional<VideoCategory> cat;
    if (rng.coin()) cat = rng.pick(kAllCategories);
    std::size_t k = rng.range(1, 8);
    auto got = s.topk_similar(qv, cat, k);
    std::vector<std::string> ids;
    for (auto& h : got.hits) ids.push_back(h.sample_id);
    c.expect(ids == qt::topk_oracle(items, qv, cat, k), "top-k trial " + std::to_string(t));
  }
  return report(4, "k-NN vote and top-k retrieval equal exhaustive oracles on 500 random instances each", c);
}

// ---- 5 ----
int scoring_math() {
  Check c;
  c.expect(originality(0) == 10.0, "S_o(0)");
  c.expect(originality(1) == 0.0, "S_o(1)");
  for (double b : {0.0, 0.12, 0.5, 0.9}) {
    c.expect(relevance_from_similarity(b, b, 0.1) == 10.0, "S_r peak");
    c.expect(std::fabs(relevance_from_similarity(b + 0.1, b, 0.1) - 10 * std::exp(-0.5)) <= 1e-9, "S_r at +sigma");
    c.expect(std::fabs(relevance_from_similarity(b - 0.1, b, 0.1) - 10 * std::exp(-0.5)) <= 1e-9, "S_r at -sigma");
  }
  ScoringParams p;
  for (auto lang : {Language::En, Language::Zh}) {
    auto b = p.bounds(lang);
    double s = p.sigma_l(lang);
    for (std::size_t n = b.min; n <= b.max; ++n) c.expect(length_score_for(n, b, s) == 5.0, "S_l inside band");
    // Gaussian branch anchored at the nearer bound, evaluated at the bound itself.
    for (std::size_t bound : {b.min, b.max}) {
      double gauss = 5.0 * std::exp(-std::pow(double(bound) - double(bound), 2) / (2 * s * s));
      c.expect(std::fabs(gauss - length_score_for(bound, b, s)) <= 1e-9, "S_l continuity at bound");
    }
  }
  c.expect(p.bounds_en.min == 63 && p.bounds_en.max == 72, "En bounds");
  c.expect(p.bounds_zh.min == 25 && p.bounds_zh.max == 35, "Zh bounds");
  // Counting through the real length functions.
  std::string en;
  for (int i = 0; i < 63; ++i) en += "word ";
  c.expect(comment_length(en, Language::En) == 63, "En word count");
  c.expect(comment_length("这是一个二十五个字符的中文评论句子用于测试长度计算正确", Language::Zh) == 27, "Zh char count");
  c.expect(length_score("这是一个二十五个字符的中文评论句子用于测试长度计算正确", Language::Zh,
                        ScoringContext(Dataset({[] {
                                         VideoRecord r;
                                         r.id = "b";
                                         r.description = "视频";
                                         r.comments = {{"评论", 1, {}, {}}};
                                         return r;
                                       }()}),
                                       Dataset())) == 5.0,
           "Zh in-band comment scored below 5");
  c.expect(total_score(10, 10, 10) == 10.0, "S_total(10,10,10)");
  c.expect(total_score(0, 0, 0) == 0.0, "S_total(0,0,0)");
  return report(5, "scoring formulas hit their exact values", c);
}

// ---- 6 ----
int dual_rate() {
  Check c;
  c.expect(dual_rate_sample(20, {}).timestamps_s.size() == 10, "20 s climax-free");
  std::vector<ClimaxInterval> all{{0, 10}};
  auto full = dual_rate_sample(10, all);
  c.expect(full.timestamps_s.size() == 50, "10 s all-climax gave " + std::to_string(full.timestamps_s.size()));
  c.expect(full.normal_s.empty(), "all-climax normal grid not empty");
  qt::Rng rng(6);
  for (int t = 0; t < 2000; ++t) {
    double duration = rng.uniform(0.5, 90);
    std::vector<ClimaxInterval> cs;
    double cursor = 0;
    while (rng.coin(0.6)) {
      double s = cursor + rng.uniform(0, 10);
      if (rng.coin(0.2)) s = std::round(s * 2) / 2;  // land on the normal grid
      double e = s + rng.uniform(0.05, 6);
      if (e > duration) break;
      cs.push_back({s, e});
      cursor = e + 0.01;
    }
    auto got = dual_rate_sample(duration, cs);
    auto want = qt::grid_oracle(duration, cs, {});
    c.expect(got.normal_s == want.normal && got.climax_s == want.climax, "mixed trial " + std::to_string(t));
    std::set<double> n(got.normal_s.begin(), got.normal_s.end());
    for (double x : got.climax_s) c.expect(!n.count(x), "normal and climax sets intersect");
  }
  return report(6, "dual-rate sampling counts, grid oracle and disjointness", c);
}

// ---- 7 ----
int run_cli(const std::filesystem::path& dir, const std::string& args) {
  std::string cmd = "cd '" + dir.string() + "' && '" + std::string(QUIP_CLI_PATH) + "' " + args + " >> cli.log 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

PipelineConfig fixture_config() {
  // Work paths stay relative so two run directories produce identical bytes.
  PipelineConfig c;
  c.mock = true;
  auto d = qt::data_dir();
  c.paths.seed_dataset = d / "fixtures" / "seed.jsonl";
  c.paths.benchmark = d / "fixtures" / "benchmark.jsonl";
  c.paths.rules_dir = d / "rules";
  c.paths.lexicon_dir = d / "lexicon";
  c.paths.templates_dir = d / "templates";
  c.paths.fixture_dir = d / "fixtures" / "platform";
  c.paths.encyclopedia_dir = d / "fixtures" / "encyclopedia";
  return c;
}

std::map<std::string, std::string> end_to_end(const std::filesystem::path& dir, Check& c) {
  fs::write_atomic(dir / "config.json", config_to_json(fixture_config()).dump(2));
  const std::string base = "--config config.json --mock -q ";
  c.expect(run_cli(dir, base + "dataset-build") == 0, "dataset-build failed in " + dir.string());
  c.expect(run_cli(dir, base + "embed") == 0, "embed failed");
  c.expect(run_cli(dir, base + "generate --target " + (qt::data_dir() / "fixtures" / "benchmark.jsonl").string()) == 0,
           "generate failed");
  c.expect(run_cli(dir, base + "score --comments work/generated/comments.jsonl") == 0, "score failed");
  std::map<std::string, std::string> out;
  for (auto& e : std::filesystem::recursive_directory_iterator(dir / "work")) {
    if (!e.is_regular_file()) continue;
    auto rel = std::filesystem::relative(e.path(), dir).string();
    out[rel] = fs::read_file(e.path());
  }
  return out;
}

int determinism() {
  Check c;
  auto t0 = Clock::now();
  qt::TempDir a("quip-accept-a"), b("quip-accept-b");
  auto first = end_to_end(a.path(), c);
  auto second = end_to_end(b.path(), c);
  double dt = seconds_since(t0);
  for (auto* must : {"work/dataset.jsonl", "work/generated/comments.jsonl", "work/scores.tsv",
                     "work/generated/bm-zh-01.provenance.json", "work/generated/bm-en-01.provenance.json"}) {
    c.expect(first.count(must) == 1, std::string("missing artifact ") + must);
  }
  c.expect(first.size() == second.size(), "different artifact sets");
  for (auto& [name, bytes] : first) {
    auto it = second.find(name);
    c.expect(it != second.end() && it->second == bytes, "artifact differs: " + name);
  }
  c.expect(dt < 60.0, "runtime " + fmt_s(dt));
  return report(7, "two all-mock end-to-end runs on the 10-video fixture are byte-identical", c,
                std::to_string(first.size()) + " artifacts, " + fmt_s(dt));
}

// ---- 8 ----
int meme_monotone() {
  Check c;
  qt::Rng rng(8);
  qt::TempDir dir;
  MockEncyclopedia ud(MemeSource::UrbanDictionary), kym(MemeSource::KnowYourMeme);
  std::vector<std::string> terms;
  for (int i = 0; i < 30; ++i) {
    terms.push_back(qt::random_nonblank(rng, 5));
    (rng.coin() ? ud : kym).add(terms.back(), qt::random_text(rng, 12));
  }
  EncyclopediaSet set{{&ud}, {&ud, &kym}};
  auto cache = MemeCache::open(dir / "memes.jsonl");
  std::map<std::string, std::size_t> prev;
  for (int step = 0; step < 2000; ++step) {
    int op = int(rng.index(4));
    if (op == 0) {
      cache.insert({qt::random_nonblank(rng, 6), qt::random_text(rng, 8), {qt::random_text(rng, 6)},
                    MemeSource::LocalCache});
    } else if (op == 1 && cache.size() > 0) {
      auto it = cache.entries().begin();
      std::advance(it, rng.index(cache.size()));
      cache.append_expression(it->second.name, qt::random_text(rng, 10));
    } else {
      std::vector<std::string> kws{rng.pick(terms), qt::random_nonblank(rng, 4)};
      bool cached = cache.find(kws[0]) != nullptr;
      unsigned before = ud.calls() + kym.calls();
      auto hit = augment_with_memes(kws, cache, set, rng.coin() ? Language::En : Language::Zh);
      if (cached) {
        c.expect(hit && hit->cache_hit && hit->encyclopedia_calls == 0, "cached keyword not served from cache");
        c.expect(ud.calls() + kym.calls() == before, "encyclopedia called on a cache hit");
      }
    }
    c.expect(cache.size() >= prev.size(), "entry count shrank");
    for (auto& [k, n] : prev) {
      auto it = cache.entries().find(k);
      c.expect(it != cache.entries().end() && it->second.expressions.size() >= n, "expressions shrank for " + k);
    }
    prev.clear();
    for (auto& [k, e] : cache.entries()) prev[k] = e.expressions.size();
  }
  c.expect(MemeCache::open(dir / "memes.jsonl").entries() == cache.entries(), "persisted cache differs");
  return report(8, "meme cache never shrinks and cache hits skip the encyclopedias", c);
}

// ---- 9 ----
int generation_config() {
  Check c;
  qt::TempDir dir;
  PipelineConfig cfg = fixture_config();
  cfg.paths.work_dir = dir.path();
  cfg.paths.dataset = dir / "dataset.jsonl";
  cfg.paths.store = dir / "store.tsv";
  cfg.paths.meme_cache = dir / "memes.jsonl";
  cfg.fetch_count = 4;
  auto clients = make_clients(cfg);
  auto* gen = new MockGenerator(cfg.seed);
  clients.generator.reset(gen);
  log::Capture quiet;
  cmd_dataset_build(cfg, clients);
  cmd_embed(cfg, clients);
  GenerateOptions g;
  g.target_records = cfg.paths.benchmark;
  g.out_dir = dir / "gen";
  cmd_generate(cfg, clients, g);
  c.expect(!gen->received().empty(), "generator never called");
  for (const auto& r : gen->received()) {
    c.expect(r.temperature == 0.75 && r.top_p == 0.9 && r.repetition_penalty == 1.1,
             "received (" + std::to_string(r.temperature) + ", " + std::to_string(r.top_p) + ", " +
                 std::to_string(r.repetition_penalty) + ")");
  }
  return report(9, "mock generator receives exactly (0.75, 0.9, 1.1) by default", c,
                std::to_string(gen->received().size()) + " calls");
}

// ---- 10 ----
int round_trips() {
  Check c;
  qt::Rng rng(10);
  qt::TempDir dir;
  for (int t = 0; t < 50; ++t) {
    Dataset ds;
    for (std::size_t i = rng.range(1, 8); i > 0; --i) {
      auto r = qt::random_record(rng, qt::random_nonblank(rng, 8) + "#" + std::to_string(i));
      ds.add(r);
    }
    save_dataset(ds, dir / "d.jsonl");
    auto first = fs::read_file(dir / "d.jsonl");
    save_dataset(load_dataset(dir / "d.jsonl"), dir / "d2.jsonl");
    c.expect(fs::read_file(dir / "d2.jsonl") == first, "dataset trial " + std::to_string(t));

    VectorStore s;
    std::size_t dim = rng.range(1, 12);
    for (std::size_t i = rng.range(1, 10); i > 0; --i) {
      std::string id = qt::random_nonblank(rng, 8);
      std::erase_if(id, [](char ch) { return ch == '\t' || ch == '\n' || ch == '\r'; });
      id += "#" + std::to_string(i);
      std::vector<double> v(dim);
      for (auto& x : v) x = rng.normal() * std::pow(10.0, rng.uniform(-30, 30));
      s.add(id, rng.pick(kAllCategories), v);
    }
    save_store(s, dir / "s.tsv");
    auto sfirst = fs::read_file(dir / "s.tsv");
    save_store(load_store(dir / "s.tsv"), dir / "s2.tsv");
    c.expect(fs::read_file(dir / "s2.tsv") == sfirst, "store trial " + std::to_string(t));

    auto m = MemeCache::open(dir / ("m" + std::to_string(t) + ".jsonl"));
    for (std::size_t i = rng.range(1, 8); i > 0; --i) {
      std::vector<std::string> ex;
      for (std::size_t j = rng.range(0, 3); j > 0; --j) ex.push_back(qt::random_text(rng, 10, true));
      m.insert({qt::random_nonblank(rng, 6), qt::random_text(rng, 12, true), ex,
                rng.pick(std::array{MemeSource::LocalCache, MemeSource::RegengBaike, MemeSource::UrbanDictionary,
                                    MemeSource::KnowYourMeme})});
    }
    auto mfirst = fs::read_file(m.path());
    auto reloaded = MemeCache::open(m.path());
    auto copy = MemeCache::parse(reloaded.serialize(), dir / "m-copy.jsonl");
    copy.save();
    c.expect(fs::read_file(dir / "m-copy.jsonl") == mfirst, "meme cache trial " + std::to_string(t));
  }
  return report(10, "dataset, vector store and meme cache save-load-save byte-identically", c);
}

}  // namespace

int main() {
  log::set_min_level(log::Level::Error);
  std::vector<std::function<int()>> criteria{tiered_count, bucket_midpoints_exact, cascade_planted,
                                             knn_and_topk_oracles, scoring_math, dual_rate,
                                             determinism, meme_monotone, generation_config, round_trips};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      failed += criteria[i]();
    } catch (const std::exception& e) {
      std::cout << "FAIL " << i + 1 << " threw: " << e.what() << "\n";
      ++failed;
    }
  }
  std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criteria failed" : std::string("acceptance: all criteria passed"))
            << "\n";
  return failed;
}
