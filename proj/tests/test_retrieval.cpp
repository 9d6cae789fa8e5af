#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "quip/error.hpp"
#include "quip/log.hpp"
#include "quip/retrieval.hpp"
#include "quip/services.hpp"
#include "quip/textmetrics.hpp"
#include "support.hpp"
#include "oracles.hpp"

using namespace quip;

namespace {

VideoRecord rec(std::string id, std::string intro, std::string desc, std::string trans) {
  VideoRecord r;
  r.id = std::move(id);
  r.platform = Platform::YouTube;
  r.language = Language::En;
  r.introduction = std::move(intro);
  r.description = std::move(desc);
  r.transcription = std::move(trans);
  return r;
}

}  // namespace

TEST_CASE("query text joins non-empty parts in order") {
  CHECK(build_query_text(rec("a", "intro", "desc", "trans")) == "intro\ndesc\ntrans");
  CHECK(build_query_text(rec("a", "", "desc", "")) == "desc");
  CHECK_THROWS_AS(build_query_text(rec("a", "", "", "")), Error);
}

TEST_CASE("dense cosine agrees with the sparse cosine on non-negative vectors") {
  qt::Rng rng(3);
  for (int t = 0; t < 500; ++t) {
    std::size_t dim = rng.range(1, 20);
    std::vector<double> a(dim), b(dim);
    std::vector<SparseVector::Entry> sa, sb;
    for (std::size_t i = 0; i < dim; ++i) {
      a[i] = rng.coin(0.4) ? 0 : rng.uniform(0, 3);
      b[i] = rng.coin(0.4) ? 0 : rng.uniform(0, 3);
      sa.push_back({std::uint32_t(i), a[i]});
      sb.push_back({std::uint32_t(i), b[i]});
    }
    CHECK(std::fabs(dense_cosine(a, b) - cosine(SparseVector::from_entries(sa), SparseVector::from_entries(sb))) < 1e-9);
  }
  CHECK_THROWS_AS(dense_cosine(std::vector<double>{1}, std::vector<double>{1, 2}), Error);
}

TEST_CASE("top-k filter semantics") {
  VectorStore s;
  s.add("a", VideoCategory::FunnyAnimal, std::vector<double>{1, 0});
  s.add("b", VideoCategory::FunnyAnimal, std::vector<double>{0, 1});
  s.add("c", VideoCategory::TalkShow, std::vector<double>{1, 0.1});
  s.add("d", VideoCategory::TalkShow, std::vector<double>{1, 0.2});

  auto self = s.topk_similar(std::vector<double>{1, 0}, std::nullopt, 3);
  CHECK(self.hits[0].sample_id == "a");
  CHECK(self.hits[0].similarity == doctest::Approx(1.0));
  CHECK_FALSE(self.category_filtered);

  auto fa = s.topk_similar(std::vector<double>{1, 0.15}, VideoCategory::FunnyAnimal, 3);
  CHECK(fa.category_filtered);
  REQUIRE(fa.hits.size() == 2);  // no global spill
  CHECK(fa.hits[0].sample_id == "a");

  auto other = s.topk_similar(std::vector<double>{1, 0.15}, VideoCategory::Other, 3);
  CHECK_FALSE(other.category_filtered);
  CHECK(other.hits.size() == 3);

  CHECK_THROWS_AS(s.topk_similar(std::vector<double>{1}, std::nullopt, 3), Error);
  CHECK_THROWS_AS(VectorStore().topk_similar(std::vector<double>{1}, std::nullopt, 3), Error);
  CHECK_THROWS_AS(s.add("a", VideoCategory::Other, std::vector<double>{1, 1}), Error);
  CHECK_THROWS_AS(s.add("e", VideoCategory::Other, std::vector<double>{1}), Error);
  CHECK_THROWS_AS(s.add("f", VideoCategory::Other, std::vector<double>{NAN, 1}), Error);
  CHECK_THROWS_AS(s.add("g\th", VideoCategory::Other, std::vector<double>{1, 1}), Error);
}

TEST_CASE("equal similarities rank by sample id") {
  VectorStore s;
  for (const char* id : {"m", "b", "z", "a"}) s.add(id, VideoCategory::Other, std::vector<double>{2, 1});
  auto r = s.topk_similar(std::vector<double>{2, 1}, std::nullopt, 4);
  std::vector<std::string> ids;
  for (auto& h : r.hits) ids.push_back(h.sample_id);
  CHECK(ids == std::vector<std::string>{"a", "b", "m", "z"});
}

TEST_CASE("top-k ranking equals the exhaustive oracle on random stores") {
  qt::Rng rng(53);
  for (int t = 0; t < 300; ++t) {
    std::size_t dim = rng.range(1, 24);
    std::vector<qt::StoreItem> items;
    VectorStore s;
    for (std::size_t i = rng.range(1, 50); i > 0; --i) {
      qt::StoreItem it{"s" + std::to_string(rng.next() % 100000) + "-" + std::to_string(i), rng.pick(kAllCategories), {}};
      for (std::size_t d = 0; d < dim; ++d) it.v.push_back(rng.uniform(-1, 1));
      s.add(it.id, it.cat, it.v);
      items.push_back(it);
    }
    std::vector<double> q(dim);
    for (auto& x : q) x = rng.uniform(-1, 1);
    std::optional<VideoCategory> cat;
    if (rng.coin()) cat = rng.pick(kAllCategories);
    std::size_t k = rng.range(1, 8);
    auto got = s.topk_similar(q, cat, k);
    std::vector<std::string> ids;
    for (auto& h : got.hits) ids.push_back(h.sample_id);
    CHECK(ids == qt::topk_oracle(items, q, cat, k));
    CHECK(std::is_sorted(got.hits.begin(), got.hits.end(),
                         [](auto& a, auto& b) { return a.similarity > b.similarity; }));
  }
}

TEST_CASE("absent category equals a store with one shared category") {
  qt::Rng rng(59);
  for (int t = 0; t < 100; ++t) {
    VectorStore mixed, single;
    for (int i = 0; i < 20; ++i) {
      std::vector<double> v{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      mixed.add("x" + std::to_string(i), rng.pick(kAllCategories), v);
      single.add("x" + std::to_string(i), VideoCategory::Other, v);
    }
    std::vector<double> q{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    CHECK(mixed.topk_similar(q, std::nullopt, 5).hits == single.topk_similar(q, std::nullopt, 5).hits);
  }
}

TEST_CASE("store persistence round-trips byte for byte") {
  qt::Rng rng(61);
  qt::TempDir dir;
  for (int t = 0; t < 40; ++t) {
    VectorStore s;
    std::size_t dim = rng.range(1, 16);
    for (std::size_t i = rng.range(1, 12); i > 0; --i) {
      std::string id;
      do {
        id = qt::random_nonblank(rng, 10);
        std::erase_if(id, [](char c) { return c == '\t' || c == '\n' || c == '\r'; });
      } while (id.empty() || std::any_of(s.entries().begin(), s.entries().end(),
                                         [&](auto& e) { return e.sample_id == id; }));
      std::vector<double> v(dim);
      for (auto& x : v) x = rng.uniform(-1e3, 1e3) * (rng.coin(0.1) ? 1e-300 : 1);
      s.add(id, rng.pick(kAllCategories), v);
    }
    save_store(s, dir / "s.tsv");
    auto first = serialize_store(s);
    auto back = load_store(dir / "s.tsv");
    CHECK(back == s);
    CHECK(serialize_store(back) == first);
  }
  CHECK_THROWS_AS(parse_store("garbage\n"), SchemaError);
  CHECK_THROWS_AS(parse_store("#quip-vectors dim=2\na\tOther\t1\n"), SchemaError);
}

TEST_CASE("embed_and_index skips failing records with a warning") {
  Dataset ds({rec("r1", "one", "", ""), rec("r2", "two poison", "", ""), rec("r3", "three", "", "")});
  MockEmbedder emb(9, 16);
  emb.fail_on("poison");
  log::Capture cap;
  auto store = embed_and_index(ds, emb);
  CHECK(store.size() == 2);
  CHECK(store.entries()[0].sample_id == "r1");
  CHECK(store.entries()[1].sample_id == "r3");
  CHECK(cap.text().find("r2") != std::string::npos);
  MockEmbedder again(9, 16);
  CHECK(serialize_store(embed_and_index(ds, again)) == serialize_store(embed_and_index(ds, again)));
}
