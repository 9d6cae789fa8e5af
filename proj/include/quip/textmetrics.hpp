#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "quip/corpus.hpp"

namespace quip {

struct TokenList {
  std::vector<std::string> tokens;
  Language language = Language::En;
};

// En: maximal runs of letters/digits, lower-cased, fullwidth folded.
// Zh: each CJK run yields its character unigrams followed by its bigrams;
// Latin runs inside Chinese text are tokenized as En words.
TokenList tokenize(std::string_view text, Language language);

// Sorted by dimension, no explicit zeros.
class SparseVector {
 public:
  using Entry = std::pair<std::uint32_t, double>;

  SparseVector() = default;
  // Accepts entries in any order; duplicate dimensions are summed, zeros dropped.
  static SparseVector from_entries(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  double weight(std::uint32_t dim) const;
  double squared_norm() const;
  double norm() const;
  SparseVector scaled(double factor) const;

  bool operator==(const SparseVector&) const = default;

 private:
  std::vector<Entry> entries_;
};

double dot(const SparseVector& u, const SparseVector& v);
// u.v / (|u| |v|), clamped to [0, 1]; 0 when either vector is empty.
double cosine(const SparseVector& u, const SparseVector& v);

class TfIdfModel {
 public:
  std::optional<std::uint32_t> lookup(std::string_view token) const;
  double idf(std::uint32_t dim) const { return idf_[dim]; }
  std::size_t dimensions() const { return idf_.size(); }
  std::size_t doc_count() const { return doc_count_; }
  // Token for each dimension, in dimension order.
  const std::vector<std::string>& terms() const { return terms_; }

  bool operator==(const TfIdfModel& o) const {
    return terms_ == o.terms_ && idf_ == o.idf_ && doc_count_ == o.doc_count_;
  }

 private:
  friend TfIdfModel fit_tfidf(std::span<const TokenList> documents);

  std::unordered_map<std::string, std::uint32_t> vocabulary_;
  std::vector<std::string> terms_;
  std::vector<double> idf_;
  std::size_t doc_count_ = 0;
};

// idf(t) = ln((1 + N) / (1 + df(t))) + 1. Dimensions are assigned in order of
// first appearance. Throws quip::Error on an empty corpus.
TfIdfModel fit_tfidf(std::span<const TokenList> documents);
// weight(t) = raw count x idf(t); out-of-vocabulary tokens are dropped.
SparseVector vectorize(const TfIdfModel& model, const TokenList& doc);

struct LabeledVector {
  SparseVector vector;
  StyleLabel label;
};

struct KnnVote {
  StyleLabel label;
  double top_similarity;  // cosine of the nearest neighbor
  double vote_share;      // winning votes / neighbors consulted
};

inline constexpr double kDefaultKnnMinSimilarity = 0.05;

// Majority label among the k nearest (by cosine, ties by pool position).
// Vote ties go to the earlier label in canonical order. Returns nullopt for an
// empty pool or when the nearest neighbor is below min_similarity.
std::optional<KnnVote> knn_vote(const SparseVector& query, std::span<const LabeledVector> pool,
                                std::size_t k = 5, double min_similarity = kDefaultKnnMinSimilarity);

}  // namespace quip
