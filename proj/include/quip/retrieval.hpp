#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quip/corpus.hpp"

namespace quip {

class EmbeddingClient;

using EmbeddingVector = std::vector<double>;

// Introduction, description and transcription joined by newlines, empty
// parts skipped. Throws quip::Error when all three are empty.
std::string build_query_text(const VideoRecord& video);

// Dense cosine; 0 when either vector has zero norm. Throws on size mismatch.
double dense_cosine(std::span<const double> a, std::span<const double> b);

struct RetrievalHit {
  std::string sample_id;
  double similarity;
  bool operator==(const RetrievalHit&) const = default;
};

struct RetrievalResult {
  std::vector<RetrievalHit> hits;
  // True when candidates were restricted to the query category.
  bool category_filtered = false;
};

// Exhaustive-scan store. Vectors live in one contiguous row-major buffer.
class VectorStore {
 public:
  struct Entry {
    std::string sample_id;
    VideoCategory category;
  };

  explicit VectorStore(std::size_t dim = 0) : dim_(dim) {}

  // Throws on duplicate id, dimension mismatch or non-finite values. The
  // first insert fixes the dimension of an empty store created with dim 0.
  void add(std::string sample_id, VideoCategory category, std::span<const double> vector);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t dim() const { return dim_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::span<const double> vector(std::size_t i) const { return {&data_[i * dim_], dim_}; }
  std::size_t count(VideoCategory category) const;

  // Top-k by cosine, ties by sample_id ascending. With a category that has
  // entries, only those entries compete; otherwise the whole store does.
  RetrievalResult topk_similar(std::span<const double> query, std::optional<VideoCategory> category,
                               std::size_t k = 3) const;

  bool operator==(const VectorStore& o) const {
    return dim_ == o.dim_ && data_ == o.data_ && ids_equal(o);
  }

 private:
  bool ids_equal(const VectorStore& o) const;

  std::size_t dim_;
  std::vector<Entry> entries_;
  std::vector<double> data_;
  std::vector<double> norms_;
};

// Text format: a `#quip-vectors dim=<n>` header, then one
// `id<TAB>category<TAB>v1 v2 ...` line per entry with values in %.17g.
std::string serialize_store(const VectorStore& store);
VectorStore parse_store(std::string_view text, std::string_view source = "<store>");
void save_store(const VectorStore& store, const std::filesystem::path& path);
VectorStore load_store(const std::filesystem::path& path);

// One entry per record embedded from build_query_text(). Records whose
// embedding fails are skipped with a warning naming them.
VectorStore embed_and_index(const Dataset& dataset, EmbeddingClient& embedder);

}  // namespace quip
