#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "quip/corpus.hpp"
#include "quip/generation_config.hpp"
#include "quip/labeler.hpp"
#include "quip/media.hpp"
#include "quip/media_decoder.hpp"
#include "quip/scorer.hpp"
#include "quip/services.hpp"
#include "quip/stylist.hpp"

// Workflow orchestration behind the CLI subcommands.
namespace quip {

struct EncyclopediaConfig {
  ClientConfig client;
  std::string url_template;
  std::string name_pointer = "/name";
  std::string definition_pointer = "/definition";
};

struct PipelinePaths {
  std::filesystem::path work_dir = "work";
  // Empty dataset, store and meme_cache paths live inside work_dir.
  std::filesystem::path dataset;
  std::filesystem::path seed_dataset = "data/fixtures/seed.jsonl";
  std::filesystem::path benchmark = "data/fixtures/benchmark.jsonl";
  std::filesystem::path store;
  std::filesystem::path meme_cache;
  std::filesystem::path rules_dir = "data/rules";
  std::filesystem::path lexicon_dir = "data/lexicon";
  std::filesystem::path templates_dir = "data/templates";
  std::filesystem::path fixture_dir = "data/fixtures/platform";
  std::filesystem::path encyclopedia_dir = "data/fixtures/encyclopedia";

  std::filesystem::path dataset_file() const { return dataset.empty() ? work_dir / "dataset.jsonl" : dataset; }
  std::filesystem::path store_file() const { return store.empty() ? work_dir / "store.tsv" : store; }
  std::filesystem::path meme_cache_file() const { return meme_cache.empty() ? work_dir / "memes.jsonl" : meme_cache; }
};

struct MediaSettings {
  SamplingRates rates;
  ClimaxOptions climax;
  double signal_window_s = 0.2;
  std::size_t cell_width = 160;
  std::size_t cell_height = 90;
  std::size_t max_cols = 4;
};

struct PipelineConfig {
  bool mock = false;
  std::uint64_t seed = 42;
  unsigned concurrency = 4;
  PipelinePaths paths;
  std::vector<std::string> fetch_tags;
  std::size_t fetch_count = 10;
  CascadeOptions cascade;
  MediaSettings media;
  std::size_t retrieval_k = 3;
  std::size_t embedding_dim = 64;
  GenerationConfig generation;
  std::size_t keyword_count = 5;
  ScoringParams scoring;
  ClientConfig platform, transcriber, describer, embedder, sentiment, generator;
  EncyclopediaConfig regeng_baike, urban_dictionary, know_your_meme;

  // Throws ConfigError on any out-of-range value.
  void validate() const;
};

// Unknown keys are ConfigErrors so typos do not silently fall back to
// defaults. Relative paths stay relative to the working directory.
PipelineConfig config_from_json(const nlohmann::json& j, const PipelineConfig& base = {});
PipelineConfig load_config(const std::filesystem::path& path);
// Full effective configuration; feeding it back through config_from_json
// reproduces the run. Never contains credential values.
nlohmann::ordered_json config_to_json(const PipelineConfig& config);

// Clients wired from configuration: all mocks with --mock, HTTP otherwise.
struct ClientStack {
  std::unique_ptr<PlatformClient> platform;
  std::unique_ptr<Transcriber> transcriber;
  std::unique_ptr<Describer> describer;
  std::unique_ptr<EmbeddingClient> embedder;
  std::unique_ptr<SentimentClient> sentiment;
  std::unique_ptr<GenerationClient> generator;
  std::vector<std::unique_ptr<EncyclopediaClient>> encyclopedia_owners;
  EncyclopediaSet encyclopedias;
  std::unique_ptr<MediaDecoder> decoder;
};

ClientStack make_clients(const PipelineConfig& config);

// ---- video processing ------------------------------------------------------

struct ProcessedVideo {
  VideoRecord record;
  FramePlan plan;             // dataset-build frame selection (tiered)
  std::optional<SampleSchedule> schedule;  // target processing (dual-rate)
  std::vector<ClimaxInterval> climaxes;
  Image composite;
};

// Dataset Stages 2-5 for one crawled video: top-five comments, tiered frame
// selection, composite, transcription and description.
ProcessedVideo build_record(const RawVideo& raw, const PipelineConfig& config, ClientStack& clients);

// Target video processing: climax detection, dual-rate frames, composite,
// transcription and description. Comments are dropped.
ProcessedVideo process_target(const RawVideo& raw, const PipelineConfig& config, ClientStack& clients);

// ---- workflows ---------------------------------------------------------------

enum class RunStatus { Ok, PartialFailure };

struct BuildOptions {
  std::vector<std::string> urls;  // when non-empty, fetched instead of by tags
};

RunStatus cmd_dataset_build(const PipelineConfig& config, ClientStack& clients, const BuildOptions& options = {});
RunStatus cmd_annotate(const PipelineConfig& config);
RunStatus cmd_embed(const PipelineConfig& config, ClientStack& clients);

struct GenerateOptions {
  std::filesystem::path target_records;  // JSONL of prepared records
  std::string target_url;                // fetched and processed first
  std::filesystem::path out_dir = "work/generated";
  std::string model_name = "mock";
};

// Writes <out_dir>/<id>.comment.txt, <id>.provenance.json and appends
// {model, video_id, comment} lines to <out_dir>/comments.jsonl (rewritten
// per run). Returns the generated comments in target order.
std::vector<std::string> cmd_generate(const PipelineConfig& config, ClientStack& clients,
                                      const GenerateOptions& options);

struct ScoreOptions {
  std::vector<std::filesystem::path> comment_files;
  std::filesystem::path out = "work/scores.tsv";
};

// Benchmark from paths.benchmark, training set from paths.dataset when it exists.
std::string cmd_score(const PipelineConfig& config, ClientStack& clients, const ScoreOptions& options);

// Writes <work_dir>/<command>.config.json.
void write_config_echo(const PipelineConfig& config, std::string_view command, const nlohmann::ordered_json& extra);

// File-system-safe name derived from a record id.
std::string safe_file_name(std::string_view id);

}  // namespace quip
