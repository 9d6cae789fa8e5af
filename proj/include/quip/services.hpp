#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "quip/corpus.hpp"
#include "quip/error.hpp"
#include "quip/generation_config.hpp"
#include "quip/log.hpp"
#include "quip/media.hpp"

// Contracts for every external dependency, each with a deterministic mock
// and a thin HTTP implementation. Mocks never touch the network.
namespace quip {

struct ClientConfig {
  std::string endpoint;
  // Name of the environment variable holding the API key. The key itself is
  // read at request time and never stored or logged.
  std::string credential_env_var;
  double timeout_s = 30.0;
  unsigned max_retries = 2;
  std::string model;
};

std::optional<std::string> read_credential(const ClientConfig& config);

// Calls `fn` up to 1 + max_retries times. Each failed attempt is logged;
// after the last one a ClientError naming `what` is thrown.
template <typename Fn>
auto with_retries(std::string_view what, unsigned max_retries, Fn&& fn) -> decltype(fn()) {
  std::string last;
  const unsigned attempts = max_retries + 1;
  for (unsigned attempt = 1; attempt <= attempts; ++attempt) {
    try {
      return fn();
    } catch (const ClientError& e) {
      last = e.what();
    } catch (const IoError& e) {
      last = e.what();
    }
    log::warn(what, ": attempt ", attempt, "/", attempts, " failed: ", last);
  }
  throw ClientError(std::string(what) + " failed after " + std::to_string(attempts) + " attempts: " + last);
}

// ---- platform ---------------------------------------------------------------

struct RawVideo {
  std::string id;
  Platform platform = Platform::Douyin;
  VideoCategory category = VideoCategory::Other;
  std::vector<std::string> tags;
  std::string introduction;
  std::string source_url;
  std::string media_ref;
  std::vector<CommentRecord> comments;  // as crawled, any order, any count
};

class PlatformClient {
 public:
  virtual ~PlatformClient() = default;
  // Videos carrying any of `tags` (all videos when tags is empty), at most `count`.
  virtual std::vector<RawVideo> fetch_videos(std::span<const std::string> tags, std::size_t count) = 0;
  virtual RawVideo fetch_by_url(std::string_view url) = 0;
};

RawVideo parse_raw_video(std::string_view json_line, std::size_t line_no = 0);

// Serves `<dir>/videos.jsonl`. Each line: id, platform, category, tags,
// introduction, source_url, media_ref, comments[{text, like_count}].
class MockPlatformClient final : public PlatformClient {
 public:
  explicit MockPlatformClient(std::filesystem::path fixture_dir);
  std::vector<RawVideo> fetch_videos(std::span<const std::string> tags, std::size_t count) override;
  RawVideo fetch_by_url(std::string_view url) override;

 private:
  std::vector<RawVideo> videos_;
  std::filesystem::path missing_;  // fixture file that was not found, if any
};

// GET {endpoint}/videos?tags=a,b&count=n and GET {endpoint}/video?url=...,
// both answering in the fixture JSON schema.
class HttpPlatformClient final : public PlatformClient {
 public:
  explicit HttpPlatformClient(ClientConfig config) : config_(std::move(config)) {}
  std::vector<RawVideo> fetch_videos(std::span<const std::string> tags, std::size_t count) override;
  RawVideo fetch_by_url(std::string_view url) override;

 private:
  ClientConfig config_;
};

// ---- speech transcription -----------------------------------------------------

class Transcriber {
 public:
  virtual ~Transcriber() = default;
  virtual std::string transcribe(std::string_view media_ref, Language language) = 0;
};

// Pseudo-text derived from a hash of (seed, media_ref). Synthetic references
// are always readable; anything else must be an existing file.
class MockTranscriber final : public Transcriber {
 public:
  explicit MockTranscriber(std::uint64_t seed) : seed_(seed) {}
  std::string transcribe(std::string_view media_ref, Language language) override;

 private:
  std::uint64_t seed_;
};

// POSTs the media bytes; expects {"text": ...}.
class HttpTranscriber final : public Transcriber {
 public:
  explicit HttpTranscriber(ClientConfig config) : config_(std::move(config)) {}
  std::string transcribe(std::string_view media_ref, Language language) override;

 private:
  ClientConfig config_;
};

// ---- multimodal description ---------------------------------------------------

class Describer {
 public:
  virtual ~Describer() = default;
  virtual std::string describe(const Image& composite, std::string_view transcription,
                               std::span<const std::string> tags, Language language) = 0;
};

class MockDescriber final : public Describer {
 public:
  explicit MockDescriber(std::uint64_t seed) : seed_(seed) {}
  std::string describe(const Image& composite, std::string_view transcription, std::span<const std::string> tags,
                       Language language) override;
  // Makes the next `n` calls throw ClientError.
  void fail_next(unsigned n) { failures_ = n; }
  unsigned calls() const { return calls_; }

 private:
  std::uint64_t seed_;
  std::atomic<unsigned> failures_{0};
  std::atomic<unsigned> calls_{0};
};

// Chat-completions request carrying the composite as a PNG data URI.
class HttpDescriber final : public Describer {
 public:
  explicit HttpDescriber(ClientConfig config) : config_(std::move(config)) {}
  std::string describe(const Image& composite, std::string_view transcription, std::span<const std::string> tags,
                       Language language) override;

 private:
  ClientConfig config_;
};

// ---- embeddings -----------------------------------------------------------------

class EmbeddingClient {
 public:
  virtual ~EmbeddingClient() = default;
  virtual std::vector<double> embed(std::string_view text) = 0;
  virtual std::size_t dimension() const = 0;
};

// Feature-hashed bag of tokens: each token contributes a seeded pseudo-random
// vector, the sum is scaled so the largest component has magnitude 1. Texts
// sharing tokens therefore land near each other.
class MockEmbedder final : public EmbeddingClient {
 public:
  explicit MockEmbedder(std::uint64_t seed, std::size_t dim = 64) : seed_(seed), dim_(dim) {}
  std::vector<double> embed(std::string_view text) override;
  std::size_t dimension() const override { return dim_; }
  // Texts containing this substring fail with ClientError.
  void fail_on(std::string needle) { fail_on_.push_back(std::move(needle)); }

 private:
  std::uint64_t seed_;
  std::size_t dim_;
  std::vector<std::string> fail_on_;
};

// OpenAI-style embeddings endpoint: {"model", "input"} -> data[0].embedding.
class HttpEmbedder final : public EmbeddingClient {
 public:
  HttpEmbedder(ClientConfig config, std::size_t dim) : config_(std::move(config)), dim_(dim) {}
  std::vector<double> embed(std::string_view text) override;
  std::size_t dimension() const override { return dim_; }

 private:
  ClientConfig config_;
  std::size_t dim_;
};

// ---- sentiment --------------------------------------------------------------------

// Returns the top-1 label, upper-cased ("POSITIVE", "NEGATIVE", ...).
class SentimentClient {
 public:
  virtual ~SentimentClient() = default;
  virtual std::string classify(std::string_view text, Language language) = 0;
};

// Counts hits from small polarity word lists; ties resolve by a hash of the text.
class MockSentiment final : public SentimentClient {
 public:
  explicit MockSentiment(std::uint64_t seed) : seed_(seed) {}
  std::string classify(std::string_view text, Language language) override;
  // Forces a label for an exact text.
  void set(std::string text, std::string label) { fixed_[std::move(text)] = std::move(label); }
  void fail_all(bool fail) { fail_ = fail; }

 private:
  std::uint64_t seed_;
  std::map<std::string, std::string, std::less<>> fixed_;
  bool fail_ = false;
};

// POST {"text", "language"} -> {"label"} or [{"label", "score"}, ...].
class HttpSentiment final : public SentimentClient {
 public:
  explicit HttpSentiment(ClientConfig config) : config_(std::move(config)) {}
  std::string classify(std::string_view text, Language language) override;

 private:
  ClientConfig config_;
};

// ---- generation -------------------------------------------------------------------

class GenerationClient {
 public:
  virtual ~GenerationClient() = default;
  virtual std::string complete(std::string_view prompt, const GenerationConfig& config) = 0;
};

// Builds a comment from words of the prompt picked by a hash of
// (seed, prompt, config), and records every config it receives.
class MockGenerator final : public GenerationClient {
 public:
  explicit MockGenerator(std::uint64_t seed) : seed_(seed) {}
  std::string complete(std::string_view prompt, const GenerationConfig& config) override;

  void fail_next(unsigned n) { failures_ = n; }
  // Replaces the generated text verbatim (for post-processing tests).
  void set_canned(std::optional<std::string> text) { canned_ = std::move(text); }
  unsigned calls() const { return calls_; }
  const std::vector<GenerationConfig>& received() const { return received_; }

 private:
  std::uint64_t seed_;
  unsigned failures_ = 0;
  unsigned calls_ = 0;
  std::optional<std::string> canned_;
  std::vector<GenerationConfig> received_;
};

// Chat-completions endpoint; the sampling fields are sent as given.
class HttpGenerator final : public GenerationClient {
 public:
  explicit HttpGenerator(ClientConfig config) : config_(std::move(config)) {}
  std::string complete(std::string_view prompt, const GenerationConfig& config) override;

 private:
  ClientConfig config_;
};

// ---- meme encyclopedias -------------------------------------------------------------

enum class MemeSource : std::uint8_t { LocalCache, RegengBaike, UrbanDictionary, KnowYourMeme };
std::string_view to_string(MemeSource s);
std::optional<MemeSource> parse_meme_source(std::string_view s);

struct MemeDefinition {
  std::string name;
  std::string definition;
};

class EncyclopediaClient {
 public:
  virtual ~EncyclopediaClient() = default;
  // nullopt on a miss; ClientError on transport failure.
  virtual std::optional<MemeDefinition> lookup(std::string_view term) = 0;
  virtual MemeSource source() const = 0;
};

// Table-driven; lookups are case-insensitive on the term.
class MockEncyclopedia final : public EncyclopediaClient {
 public:
  explicit MockEncyclopedia(MemeSource source) : source_(source) {}
  void add(std::string term, std::string definition);
  void fail_on(std::string term);
  std::optional<MemeDefinition> lookup(std::string_view term) override;
  MemeSource source() const override { return source_; }
  unsigned calls() const { return calls_; }

  // `term<TAB>definition` lines.
  static std::unique_ptr<MockEncyclopedia> from_file(MemeSource source, const std::filesystem::path& path);

 private:
  MemeSource source_;
  std::map<std::string, MemeDefinition> table_;
  std::set<std::string> failing_;
  unsigned calls_ = 0;
};

// GET `url_template` with {term} replaced (URL-encoded); name and definition
// are read from the JSON response at the given JSON pointers.
class HttpEncyclopedia final : public EncyclopediaClient {
 public:
  HttpEncyclopedia(MemeSource source, ClientConfig config, std::string url_template,
                   std::string name_pointer = "/name", std::string definition_pointer = "/definition");
  std::optional<MemeDefinition> lookup(std::string_view term) override;
  MemeSource source() const override { return source_; }

 private:
  MemeSource source_;
  ClientConfig config_;
  std::string url_template_;
  std::string name_pointer_;
  std::string definition_pointer_;
};

// ---- low-level HTTP -----------------------------------------------------------------

namespace http {

struct Response {
  int status = 0;
  std::string body;
};

// Bearer credential from config.credential_env_var, if set. Transport errors
// and non-2xx statuses throw ClientError (without the credential).
Response post_json(const ClientConfig& config, const std::string& url, const std::string& body);
Response post_bytes(const ClientConfig& config, const std::string& url, const std::string& body,
                    const std::string& content_type, const std::vector<std::pair<std::string, std::string>>& headers);
Response get(const ClientConfig& config, const std::string& url);
std::string url_encode(std::string_view s);

}  // namespace http

}  // namespace quip
