#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "quip/corpus.hpp"
#include "quip/services.hpp"
#include "quip/textmetrics.hpp"

namespace quip {

struct ScoreBreakdown {
  double s_o = 0;      // originality, [0, 10]
  double s_r = 0;      // relevance, [0, 10]
  double s_l = 0;      // length, [0, 5]
  double s_st = 0;     // sentiment match, 0 or 5
  double s_s = 0;      // s_l + s_st
  double s_total = 0;  // (s_o + s_r + s_s) / 3
};

struct ScoringParams {
  double sigma = 0.1;  // relevance Gaussian width
  double sigma_l_en = 10.0;
  double sigma_l_zh = 5.0;
  LengthBounds bounds_en = default_length_bounds(Language::En);
  LengthBounds bounds_zh = default_length_bounds(Language::Zh);

  double sigma_l(Language l) const { return l == Language::En ? sigma_l_en : sigma_l_zh; }
  LengthBounds bounds(Language l) const { return l == Language::En ? bounds_en : bounds_zh; }
  // Throws ConfigError for non-positive widths or inverted bounds.
  void validate() const;
};

// Description and transcription joined by a newline (empty parts skipped).
std::string video_content(const VideoRecord& video);

// Immutable after construction. The TF-IDF space covers every comment of
// both datasets and the content of every video in them.
class ScoringContext {
 public:
  ScoringContext(Dataset benchmark, Dataset training, ScoringParams params = {});

  const Dataset& benchmark() const { return benchmark_; }
  const Dataset& training() const { return training_; }
  const ScoringParams& params() const { return params_; }
  const TfIdfModel& model() const { return model_; }
  double baseline_b() const { return baseline_b_; }
  // Comment vectors of both datasets, benchmark first.
  const std::vector<SparseVector>& comment_vectors() const { return comment_vectors_; }

  SparseVector vectorize_text(std::string_view text, Language language) const;
  double similarity(std::string_view a, std::string_view b, Language language) const;

 private:
  Dataset benchmark_;
  Dataset training_;
  ScoringParams params_;
  TfIdfModel model_;
  std::vector<SparseVector> comment_vectors_;
  double baseline_b_ = 0;
};

// Largest similarity between the comment and any corpus comment or the
// video's own content. Throws quip::Error for an empty comment.
double max_similarity(std::string_view comment, const ScoringContext& ctx, const VideoRecord& video);
// 10 (1 - m); throws quip::Error outside [0, 1].
double originality(double m);
// Mean sim(comment, its video content) over every benchmark pair.
// Throws quip::Error when the benchmark has no comments.
double relevance_baseline(const Dataset& benchmark, const TfIdfModel& model);
// 10 exp(-(sim - b)^2 / (2 sigma^2)).
double relevance_from_similarity(double sim, double b, double sigma);
double relevance(std::string_view comment, const VideoRecord& video, const ScoringContext& ctx);
// En counts whitespace words, Zh counts non-space characters.
std::size_t comment_length(std::string_view comment, Language language);
double length_score_for(std::size_t length, LengthBounds bounds, double sigma_l);
double length_score(std::string_view comment, Language language, const ScoringContext& ctx);
// 5 when the top-1 labels of comment and video content agree, else 0.
double sentiment_score(std::string_view comment, const VideoRecord& video, SentimentClient& sentiment);
double total_score(double s_o, double s_r, double s_s);
ScoreBreakdown score(std::string_view comment, const VideoRecord& video, const ScoringContext& ctx,
                     SentimentClient& sentiment);

// One generated comment to be scored.
struct ScoredComment {
  std::string model;
  std::string video_id;
  std::string comment;
};

// JSONL lines {model, video_id, comment}. Blank lines skipped.
std::vector<ScoredComment> parse_comments_file(std::string_view text, std::string_view source = "<comments>");

struct ScoreRow {
  ScoredComment input;
  Platform platform;
  ScoreBreakdown scores;
};

// Scores every row. Throws quip::Error listing all video ids absent from
// the benchmark before scoring anything.
std::vector<ScoreRow> score_comments(std::span<const ScoredComment> comments, const ScoringContext& ctx,
                                     SentimentClient& sentiment);

// Tab-separated: `#` config lines, a per-comment table, then mean rows per
// (model, platform) in first-appearance order.
std::string format_score_report(std::span<const ScoreRow> rows, const ScoringContext& ctx);

}  // namespace quip
