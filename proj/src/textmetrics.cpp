#include "quip/textmetrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "quip/error.hpp"
#include "quip/unicode.hpp"

namespace quip {
namespace {

void emit_cjk_run(const std::vector<char32_t>& run, std::vector<std::string>& out) {
  for (char32_t cp : run) {
    std::string s;
    utf8::append(s, cp);
    out.push_back(std::move(s));
  }
  for (std::size_t i = 0; i + 1 < run.size(); ++i) {
    std::string s;
    utf8::append(s, run[i]);
    utf8::append(s, run[i + 1]);
    out.push_back(std::move(s));
  }
}

void emit_word(const std::vector<char32_t>& run, std::vector<std::string>& out) {
  std::string s;
  for (char32_t cp : run) utf8::append(s, utf8::to_lower(cp));
  out.push_back(std::move(s));
}

}  // namespace

TokenList tokenize(std::string_view text, Language language) {
  TokenList result;
  result.language = language;
  std::vector<char32_t> run;
  bool run_is_cjk = false;

  auto flush = [&] {
    if (run.empty()) return;
    if (language == Language::Zh && run_is_cjk) {
      emit_cjk_run(run, result.tokens);
    } else {
      emit_word(run, result.tokens);
    }
    run.clear();
  };

  for (char32_t raw : utf8::decode(text)) {
    char32_t cp = utf8::fold_width(raw);
    if (!utf8::is_word_char(cp)) {
      flush();
      continue;
    }
    if (language == Language::Zh) {
      bool cjk = utf8::is_cjk(cp);
      if (!run.empty() && cjk != run_is_cjk) flush();
      run_is_cjk = cjk;
    }
    run.push_back(cp);
  }
  flush();
  return result;
}

SparseVector SparseVector::from_entries(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  SparseVector v;
  for (const auto& [dim, w] : entries) {
    if (!v.entries_.empty() && v.entries_.back().first == dim) {
      v.entries_.back().second += w;
    } else {
      v.entries_.emplace_back(dim, w);
    }
  }
  std::erase_if(v.entries_, [](const Entry& e) { return e.second == 0.0; });
  return v;
}

double SparseVector::weight(std::uint32_t dim) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), dim,
                             [](const Entry& e, std::uint32_t d) { return e.first < d; });
  return (it != entries_.end() && it->first == dim) ? it->second : 0.0;
}

double SparseVector::squared_norm() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.second * e.second;
  return s;
}

double SparseVector::norm() const { return std::sqrt(squared_norm()); }

SparseVector SparseVector::scaled(double factor) const {
  SparseVector out;
  if (factor == 0.0) return out;
  out.entries_ = entries_;
  for (auto& e : out.entries_) e.second *= factor;
  return out;
}

double dot(const SparseVector& u, const SparseVector& v) {
  const auto& a = u.entries();
  const auto& b = v.entries();
  double acc = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      acc += a[i].second * b[j].second;
      ++i;
      ++j;
    }
  }
  return acc;
}

double cosine(const SparseVector& u, const SparseVector& v) {
  // One sqrt of the product keeps cosine(v, v) at exactly 1.
  double su = u.squared_norm();
  double sv = v.squared_norm();
  if (su == 0.0 || sv == 0.0) return 0.0;
  double c = dot(u, v) / std::sqrt(su * sv);
  return std::clamp(c, 0.0, 1.0);
}

std::optional<std::uint32_t> TfIdfModel::lookup(std::string_view token) const {
  auto it = vocabulary_.find(std::string(token));
  if (it == vocabulary_.end()) return std::nullopt;
  return it->second;
}

TfIdfModel fit_tfidf(std::span<const TokenList> documents) {
  if (documents.empty()) throw Error("cannot fit TF-IDF on an empty corpus");
  TfIdfModel model;
  std::vector<std::size_t> df;
  std::vector<std::size_t> last_doc;
  for (std::size_t d = 0; d < documents.size(); ++d) {
    for (const auto& tok : documents[d].tokens) {
      auto [it, inserted] = model.vocabulary_.try_emplace(tok, static_cast<std::uint32_t>(model.terms_.size()));
      if (inserted) {
        model.terms_.push_back(tok);
        df.push_back(0);
        last_doc.push_back(static_cast<std::size_t>(-1));
      }
      std::uint32_t dim = it->second;
      if (last_doc[dim] != d) {
        last_doc[dim] = d;
        ++df[dim];
      }
    }
  }
  model.doc_count_ = documents.size();
  const double n = static_cast<double>(documents.size());
  model.idf_.resize(df.size());
  for (std::size_t i = 0; i < df.size(); ++i) {
    model.idf_[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[i]))) + 1.0;
  }
  return model;
}

SparseVector vectorize(const TfIdfModel& model, const TokenList& doc) {
  std::vector<SparseVector::Entry> entries;
  entries.reserve(doc.tokens.size());
  for (const auto& tok : doc.tokens) {
    if (auto dim = model.lookup(tok)) entries.emplace_back(*dim, 1.0);
  }
  auto counts = SparseVector::from_entries(std::move(entries));
  std::vector<SparseVector::Entry> weighted;
  weighted.reserve(counts.size());
  for (const auto& [dim, count] : counts.entries()) weighted.emplace_back(dim, count * model.idf(dim));
  return SparseVector::from_entries(std::move(weighted));
}

std::optional<KnnVote> knn_vote(const SparseVector& query, std::span<const LabeledVector> pool,
                                std::size_t k, double min_similarity) {
  if (pool.empty() || k == 0) return std::nullopt;
  std::vector<double> sims(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) sims[i] = cosine(query, pool[i].vector);

  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(k, pool.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (sims[a] != sims[b]) return sims[a] > sims[b];
                      return a < b;
                    });
  const double top = sims[order[0]];
  if (top < min_similarity) return std::nullopt;

  std::array<std::size_t, kAllStyles.size()> votes{};
  for (std::size_t i = 0; i < take; ++i) ++votes[index_of(pool[order[i]].label)];
  std::size_t best = 0;
  for (std::size_t l = 1; l < votes.size(); ++l) {
    if (votes[l] > votes[best]) best = l;
  }
  return KnnVote{kAllStyles[best], top, static_cast<double>(votes[best]) / static_cast<double>(take)};
}

}  // namespace quip
