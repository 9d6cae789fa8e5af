#include "quip/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include <json.hpp>

#include "quip/error.hpp"
#include "quip/unicode.hpp"

namespace quip {

void ScoringParams::validate() const {
  if (!(sigma > 0) || !(sigma_l_en > 0) || !(sigma_l_zh > 0)) {
    throw ConfigError("scorer widths must be positive (sigma, sigma_l_en, sigma_l_zh)");
  }
  if (bounds_en.min > bounds_en.max || bounds_zh.min > bounds_zh.max) {
    throw ConfigError("scorer length bounds must satisfy min <= max");
  }
}

std::string video_content(const VideoRecord& video) {
  if (video.description.empty()) return video.transcription;
  if (video.transcription.empty()) return video.description;
  return video.description + "\n" + video.transcription;
}

ScoringContext::ScoringContext(Dataset benchmark, Dataset training, ScoringParams params)
    : benchmark_(std::move(benchmark)), training_(std::move(training)), params_(params) {
  params_.validate();
  std::vector<TokenList> comment_docs;
  std::vector<TokenList> docs;
  for (const Dataset* ds : {&benchmark_, &training_}) {
    for (const auto& r : ds->records()) {
      for (const auto& c : r.comments) comment_docs.push_back(tokenize(c.text, r.language));
    }
  }
  docs = comment_docs;
  for (const Dataset* ds : {&benchmark_, &training_}) {
    for (const auto& r : ds->records()) docs.push_back(tokenize(video_content(r), r.language));
  }
  model_ = fit_tfidf(docs);
  comment_vectors_.reserve(comment_docs.size());
  for (const auto& d : comment_docs) comment_vectors_.push_back(vectorize(model_, d));
  baseline_b_ = relevance_baseline(benchmark_, model_);
}

SparseVector ScoringContext::vectorize_text(std::string_view text, Language language) const {
  return vectorize(model_, tokenize(text, language));
}

double ScoringContext::similarity(std::string_view a, std::string_view b, Language language) const {
  return cosine(vectorize_text(a, language), vectorize_text(b, language));
}

double max_similarity(std::string_view comment, const ScoringContext& ctx, const VideoRecord& video) {
  if (utf8::trim(comment).empty()) throw Error("cannot score an empty comment");
  SparseVector c = ctx.vectorize_text(comment, video.language);
  double m = cosine(c, ctx.vectorize_text(video_content(video), video.language));
  for (const auto& d : ctx.comment_vectors()) m = std::max(m, cosine(c, d));
  return m;
}

double originality(double m) {
  if (!(m >= 0.0 && m <= 1.0)) throw Error("originality: similarity outside [0, 1]");
  return 10.0 * (1.0 - m);
}

double relevance_baseline(const Dataset& benchmark, const TfIdfModel& model) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& r : benchmark.records()) {
    if (r.comments.empty()) continue;
    SparseVector v = vectorize(model, tokenize(video_content(r), r.language));
    for (const auto& c : r.comments) {
      sum += cosine(vectorize(model, tokenize(c.text, r.language)), v);
      ++n;
    }
  }
  if (n == 0) throw Error("relevance baseline needs at least one benchmark comment");
  return sum / static_cast<double>(n);
}

double relevance_from_similarity(double sim, double b, double sigma) {
  double d = sim - b;
  return 10.0 * std::exp(-(d * d) / (2.0 * sigma * sigma));
}

double relevance(std::string_view comment, const VideoRecord& video, const ScoringContext& ctx) {
  double sim = ctx.similarity(comment, video_content(video), video.language);
  return relevance_from_similarity(sim, ctx.baseline_b(), ctx.params().sigma);
}

std::size_t comment_length(std::string_view comment, Language language) {
  return language == Language::En ? utf8::count_words(comment) : utf8::count_non_space(comment);
}

double length_score_for(std::size_t length, LengthBounds bounds, double sigma_l) {
  if (length >= bounds.min && length <= bounds.max) return 5.0;
  double nearest = static_cast<double>(length < bounds.min ? bounds.min : bounds.max);
  double d = static_cast<double>(length) - nearest;
  return 5.0 * std::exp(-(d * d) / (2.0 * sigma_l * sigma_l));
}

double length_score(std::string_view comment, Language language, const ScoringContext& ctx) {
  const auto& p = ctx.params();
  return length_score_for(comment_length(comment, language), p.bounds(language), p.sigma_l(language));
}

double sentiment_score(std::string_view comment, const VideoRecord& video, SentimentClient& sentiment) {
  std::string a = sentiment.classify(comment, video.language);
  std::string b = sentiment.classify(video_content(video), video.language);
  return a == b ? 5.0 : 0.0;
}

double total_score(double s_o, double s_r, double s_s) { return (s_o + s_r + s_s) / 3.0; }

ScoreBreakdown score(std::string_view comment, const VideoRecord& video, const ScoringContext& ctx,
                     SentimentClient& sentiment) {
  ScoreBreakdown s;
  s.s_o = originality(max_similarity(comment, ctx, video));
  s.s_r = relevance(comment, video, ctx);
  s.s_l = length_score(comment, video.language, ctx);
  s.s_st = sentiment_score(comment, video, sentiment);
  s.s_s = s.s_l + s.s_st;
  s.s_total = total_score(s.s_o, s.s_r, s.s_s);
  return s;
}

std::vector<ScoredComment> parse_comments_file(std::string_view text, std::string_view source) {
  std::vector<ScoredComment> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (utf8::trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw SchemaError(line_no, "not a JSON object", std::string(source));
    try {
      out.push_back({j.at("model").get<std::string>(), j.at("video_id").get<std::string>(),
                     j.at("comment").get<std::string>()});
    } catch (const nlohmann::json::exception&) {
      throw SchemaError(line_no, "expected string fields model, video_id and comment", std::string(source));
    }
  }
  return out;
}

std::vector<ScoreRow> score_comments(std::span<const ScoredComment> comments, const ScoringContext& ctx,
                                     SentimentClient& sentiment) {
  std::set<std::string> missing;
  for (const auto& c : comments) {
    if (!ctx.benchmark().find(c.video_id)) missing.insert(c.video_id);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw Error("comments reference video ids missing from the benchmark: " + list);
  }
  std::vector<ScoreRow> rows;
  rows.reserve(comments.size());
  for (const auto& c : comments) {
    const VideoRecord& v = *ctx.benchmark().find(c.video_id);
    rows.push_back({c, v.platform, score(c.comment, v, ctx, sentiment)});
  }
  return rows;
}

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

std::string tsv_field(std::string_view s) {
  std::string out;
  for (char c : s) out.push_back(c == '\t' || c == '\n' || c == '\r' ? ' ' : c);
  return out;
}

}  // namespace

std::string format_score_report(std::span<const ScoreRow> rows, const ScoringContext& ctx) {
  const auto& p = ctx.params();
  std::string out;
  out += "# sigma\t" + fmt(p.sigma) + "\n";
  out += "# sigma_l\ten=" + fmt(p.sigma_l_en) + "\tzh=" + fmt(p.sigma_l_zh) + "\n";
  out += "# bounds\ten=" + std::to_string(p.bounds_en.min) + "-" + std::to_string(p.bounds_en.max) +
         "\tzh=" + std::to_string(p.bounds_zh.min) + "-" + std::to_string(p.bounds_zh.max) + "\n";
  out += "# baseline_b\t" + fmt(ctx.baseline_b()) + "\n";
  out += "model\tplatform\tvideo_id\tS_o\tS_r\tS_l\tS_st\tS_s\tS_total\tcomment\n";

  struct Acc {
    ScoreBreakdown sum;
    std::size_t n = 0;
  };
  std::vector<std::pair<std::string, Platform>> order;
  std::map<std::pair<std::string, Platform>, Acc> groups;
  for (const auto& r : rows) {
    const auto& s = r.scores;
    out += tsv_field(r.input.model) + "\t" + std::string(to_string(r.platform)) + "\t" + tsv_field(r.input.video_id) +
           "\t" + fmt(s.s_o) + "\t" + fmt(s.s_r) + "\t" + fmt(s.s_l) + "\t" + fmt(s.s_st) + "\t" + fmt(s.s_s) + "\t" +
           fmt(s.s_total) + "\t" + tsv_field(r.input.comment) + "\n";
    auto key = std::make_pair(r.input.model, r.platform);
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    Acc& a = it->second;
    a.sum.s_o += s.s_o;
    a.sum.s_r += s.s_r;
    a.sum.s_l += s.s_l;
    a.sum.s_st += s.s_st;
    a.sum.s_s += s.s_s;
    a.sum.s_total += s.s_total;
    ++a.n;
  }
  if (!order.empty()) {
    out += "\n# means\nmodel\tplatform\tn\tS_o\tS_r\tS_l\tS_st\tS_s\tS_total\n";
    for (const auto& key : order) {
      const Acc& a = groups.at(key);
      double n = static_cast<double>(a.n);
      out += tsv_field(key.first) + "\t" + std::string(to_string(key.second)) + "\t" + std::to_string(a.n) + "\t" +
             fmt(a.sum.s_o / n) + "\t" + fmt(a.sum.s_r / n) + "\t" + fmt(a.sum.s_l / n) + "\t" +
             fmt(a.sum.s_st / n) + "\t" + fmt(a.sum.s_s / n) + "\t" + fmt(a.sum.s_total / n) + "\n";
    }
  }
  return out;
}

}  // namespace quip
