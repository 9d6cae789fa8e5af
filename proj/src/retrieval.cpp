#include "quip/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "quip/error.hpp"
#include "quip/fsutil.hpp"
#include "quip/kernels.hpp"
#include "quip/log.hpp"
#include "quip/services.hpp"

namespace quip {

std::string build_query_text(const VideoRecord& video) {
  std::string out;
  for (const std::string* part : {&video.introduction, &video.description, &video.transcription}) {
    if (part->empty()) continue;
    if (!out.empty()) out.push_back('\n');
    out += *part;
  }
  if (out.empty()) throw Error("video " + video.id + " has no introduction, description or transcription to embed");
  return out;
}

double dense_cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("dense_cosine: dimension mismatch");
  double na = std::sqrt(kernels::dot(a, a));
  double nb = std::sqrt(kernels::dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return kernels::dot(a, b) / (na * nb);
}

void VectorStore::add(std::string sample_id, VideoCategory category, std::span<const double> vector) {
  if (sample_id.empty() || sample_id.find_first_of("\t\n\r") != std::string::npos) {
    throw Error("sample id must be non-empty and free of tabs and line breaks");
  }
  if (dim_ == 0 && entries_.empty()) dim_ = vector.size();
  if (vector.size() != dim_ || dim_ == 0) {
    throw Error("vector for '" + sample_id + "' has dimension " + std::to_string(vector.size()) + ", store expects " +
                std::to_string(dim_));
  }
  for (double v : vector) {
    if (!std::isfinite(v)) throw Error("vector for '" + sample_id + "' has a non-finite value");
  }
  for (const auto& e : entries_) {
    if (e.sample_id == sample_id) throw Error("duplicate sample id '" + sample_id + "' in vector store");
  }
  entries_.push_back({std::move(sample_id), category});
  data_.insert(data_.end(), vector.begin(), vector.end());
  norms_.push_back(std::sqrt(kernels::dot(vector, vector)));
}

std::size_t VectorStore::count(VideoCategory category) const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.category == category; }));
}

bool VectorStore::ids_equal(const VectorStore& o) const {
  if (entries_.size() != o.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].sample_id != o.entries_[i].sample_id || entries_[i].category != o.entries_[i].category) {
      return false;
    }
  }
  return true;
}

RetrievalResult VectorStore::topk_similar(std::span<const double> query, std::optional<VideoCategory> category,
                                          std::size_t k) const {
  if (entries_.empty()) throw Error("vector store is empty");
  if (query.size() != dim_) {
    throw Error("query has dimension " + std::to_string(query.size()) + ", store expects " + std::to_string(dim_));
  }
  RetrievalResult result;
  result.category_filtered = category.has_value() && count(*category) > 0;

  std::vector<double> dots(entries_.size());
  kernels::dot_rows(data_, dim_, query, dots);
  const double qn = std::sqrt(kernels::dot(query, query));

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!result.category_filtered || entries_[i].category == *category) candidates.push_back(i);
  }
  std::vector<double> sims(entries_.size(), 0.0);
  for (std::size_t i : candidates) {
    sims[i] = (qn == 0.0 || norms_[i] == 0.0) ? 0.0 : dots[i] / (qn * norms_[i]);
  }
  const std::size_t take = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (sims[a] != sims[b]) return sims[a] > sims[b];
                      return entries_[a].sample_id < entries_[b].sample_id;
                    });
  for (std::size_t i = 0; i < take; ++i) {
    result.hits.push_back({entries_[candidates[i]].sample_id, sims[candidates[i]]});
  }
  return result;
}

std::string serialize_store(const VectorStore& store) {
  std::string out = "#quip-vectors dim=" + std::to_string(store.dim()) + "\n";
  char buf[40];
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto& e = store.entries()[i];
    out += e.sample_id;
    out.push_back('\t');
    out += to_string(e.category);
    out.push_back('\t');
    auto v = store.vector(i);
    for (std::size_t d = 0; d < v.size(); ++d) {
      if (d) out.push_back(' ');
      std::snprintf(buf, sizeof buf, "%.17g", v[d]);
      out += buf;
    }
    out.push_back('\n');
  }
  return out;
}

VectorStore parse_store(std::string_view text, std::string_view source) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) { throw SchemaError(line_no, why, std::string(source)); };

  if (!std::getline(in, line)) {
    line_no = 1;
    fail("missing #quip-vectors header");
  }
  line_no = 1;
  std::size_t dim = 0;
  if (std::sscanf(line.c_str(), "#quip-vectors dim=%zu", &dim) != 1) fail("missing #quip-vectors header");
  VectorStore store(dim);
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) fail("expected id<TAB>category<TAB>values");
    auto category = parse_category(std::string_view(line).substr(t1 + 1, t2 - t1 - 1));
    if (!category) fail("unknown category");
    values.clear();
    const char* p = line.c_str() + t2 + 1;
    while (*p) {
      char* end = nullptr;
      double v = std::strtod(p, &end);
      if (end == p) fail("bad vector value");
      values.push_back(v);
      p = end;
      while (*p == ' ') ++p;
    }
    try {
      store.add(line.substr(0, t1), *category, values);
    } catch (const Error& e) {
      fail(e.what());
    }
  }
  return store;
}

void save_store(const VectorStore& store, const std::filesystem::path& path) {
  fs::write_atomic(path, serialize_store(store));
}

VectorStore load_store(const std::filesystem::path& path) { return parse_store(fs::read_file(path), path.string()); }

VectorStore embed_and_index(const Dataset& dataset, EmbeddingClient& embedder) {
  VectorStore store(embedder.dimension());
  for (const auto& r : dataset.records()) {
    try {
      EmbeddingVector v = embedder.embed(build_query_text(r));
      store.add(r.id, r.category, v);
    } catch (const Error& e) {
      log::warn("embedding skipped record ", r.id, ": ", e.what());
    }
  }
  return store;
}

}  // namespace quip
