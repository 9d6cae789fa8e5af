// quip: command-line front end for the comment pipeline.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 pipeline error,
// 4 finished with some per-item failures.

#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "quip/error.hpp"
#include "quip/fsutil.hpp"
#include "quip/log.hpp"
#include "quip/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPipeline = 3;
constexpr int kExitPartial = 4;

struct Overrides {
  std::string config_path;
  bool mock = false;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> concurrency;
  std::optional<std::string> work_dir, dataset, seed_dataset, benchmark, store, meme_cache;
  std::optional<std::size_t> k;
  std::optional<double> threshold, temperature, top_p, repetition_penalty;
  bool verbose = false;
  bool quiet = false;
};

quip::PipelineConfig effective_config(const Overrides& o) {
  quip::PipelineConfig c = o.config_path.empty() ? quip::PipelineConfig{} : quip::load_config(o.config_path);
  if (o.mock) c.mock = true;
  if (o.seed) c.seed = *o.seed;
  if (o.concurrency) c.concurrency = *o.concurrency;
  if (o.work_dir) c.paths.work_dir = *o.work_dir;
  if (o.dataset) c.paths.dataset = *o.dataset;
  if (o.seed_dataset) c.paths.seed_dataset = *o.seed_dataset;
  if (o.benchmark) c.paths.benchmark = *o.benchmark;
  if (o.store) c.paths.store = *o.store;
  if (o.meme_cache) c.paths.meme_cache = *o.meme_cache;
  if (o.k) c.retrieval_k = *o.k;
  if (o.threshold) c.cascade.similarity_threshold = *o.threshold;
  if (o.temperature) c.generation.temperature = *o.temperature;
  if (o.top_p) c.generation.top_p = *o.top_p;
  if (o.repetition_penalty) c.generation.repetition_penalty = *o.repetition_penalty;
  c.validate();
  return c;
}

int status_code(quip::RunStatus s) { return s == quip::RunStatus::Ok ? kExitOk : kExitPartial; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build styled short-video comment corpora, generate comments and score them."};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("-c,--config", o.config_path, "JSON configuration file");
  app.add_flag("--mock", o.mock, "Use the deterministic offline client stack");
  app.add_option("--seed", o.seed, "Seed for the mock clients");
  app.add_option("--concurrency", o.concurrency, "Maximum parallel workers");
  app.add_option("--work-dir", o.work_dir, "Directory for intermediate artifacts");
  app.add_option("--dataset", o.dataset, "Dataset file (JSONL)");
  app.add_option("--seed-dataset", o.seed_dataset, "Manually labeled seed dataset");
  app.add_option("--benchmark", o.benchmark, "Benchmark dataset for scoring");
  app.add_option("--store", o.store, "Vector store file");
  app.add_option("--meme-cache", o.meme_cache, "Meme cache file");
  app.add_option("-k,--retrieval-k", o.k, "Samples retrieved per target");
  app.add_option("--threshold", o.threshold, "Content-similarity threshold of the labeler");
  app.add_option("--temperature", o.temperature);
  app.add_option("--top-p", o.top_p);
  app.add_option("--repetition-penalty", o.repetition_penalty);
  app.add_flag("-v,--verbose", o.verbose, "Debug logging");
  app.add_flag("-q,--quiet", o.quiet, "Warnings and errors only");

  auto* build = app.add_subcommand("dataset-build", "Crawl, process and label videos into a dataset");
  std::vector<std::string> build_urls, build_tags;
  std::optional<std::size_t> build_count;
  build->add_option("--url", build_urls, "Video URLs to fetch instead of searching by tag");
  build->add_option("--tag", build_tags, "Tags to search for");
  build->add_option("--count", build_count, "Maximum number of videos");

  auto* annotate = app.add_subcommand("annotate", "Label unlabeled comments of the dataset");
  auto* embed = app.add_subcommand("embed", "Embed the dataset into the vector store");

  auto* process = app.add_subcommand("process", "Turn a target video into a prepared record");
  std::string proc_url, proc_media, proc_id, proc_intro, proc_out;
  std::string proc_platform = "YouTube", proc_category = "Other";
  process->add_option("--url", proc_url, "Fetch the target through the platform client");
  process->add_option("--media", proc_media, "Local media file (or synthetic reference)");
  process->add_option("--id", proc_id, "Record id for --media");
  process->add_option("--platform", proc_platform, "Douyin or YouTube (with --media)");
  process->add_option("--category", proc_category, "Video category (with --media)");
  process->add_option("--intro", proc_intro, "Introduction text (with --media)");
  process->add_option("-o,--out", proc_out, "Output JSONL file")->required();

  auto* generate = app.add_subcommand("generate", "Generate a comment for each target");
  quip::GenerateOptions gen;
  std::string gen_target, gen_out;
  generate->add_option("--target", gen_target, "Prepared records (JSONL)");
  generate->add_option("--url", gen.target_url, "Target video URL");
  generate->add_option("--out-dir", gen_out, "Output directory (default <work-dir>/generated)");
  generate->add_option("--model-name", gen.model_name, "Model name written to comments.jsonl");

  auto* score = app.add_subcommand("score", "Score generated comments against the benchmark");
  std::vector<std::string> score_files;
  std::string score_out;
  score->add_option("--comments", score_files, "JSONL files of {model, video_id, comment}")->required();
  score->add_option("-o,--out", score_out, "Report path (default <work-dir>/scores.tsv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (o.verbose) quip::log::set_min_level(quip::log::Level::Debug);
  if (o.quiet) quip::log::set_min_level(quip::log::Level::Warn);

  try {
    quip::PipelineConfig config = effective_config(o);
    auto clients = quip::make_clients(config);
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();

    if (build->parsed()) {
      if (!build_tags.empty()) config.fetch_tags = build_tags;
      if (build_count) config.fetch_count = *build_count;
      extra["urls"] = build_urls;
      quip::write_config_echo(config, "dataset-build", extra);
      return status_code(quip::cmd_dataset_build(config, clients, {build_urls}));
    }
    if (annotate->parsed()) {
      quip::write_config_echo(config, "annotate", extra);
      return status_code(quip::cmd_annotate(config));
    }
    if (embed->parsed()) {
      quip::write_config_echo(config, "embed", extra);
      return status_code(quip::cmd_embed(config, clients));
    }
    if (process->parsed()) {
      quip::RawVideo raw;
      if (!proc_url.empty()) {
        raw = clients.platform->fetch_by_url(proc_url);
      } else if (!proc_media.empty()) {
        auto platform = quip::parse_platform(proc_platform);
        auto category = quip::parse_category(proc_category);
        if (!platform || !category || proc_id.empty()) {
          throw quip::ConfigError("--media needs --id plus a valid --platform and --category");
        }
        raw.id = proc_id;
        raw.platform = *platform;
        raw.category = *category;
        raw.introduction = proc_intro;
        raw.media_ref = proc_media;
      } else {
        throw quip::ConfigError("process: pass --url or --media");
      }
      extra = {{"url", proc_url}, {"media", proc_media}, {"id", raw.id}, {"out", proc_out}};
      quip::write_config_echo(config, "process", extra);
      auto pv = quip::process_target(raw, config, clients);
      std::filesystem::path out(proc_out);
      if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
      quip::fs::write_atomic(out, quip::serialize_record(pv.record) + "\n");
      nlohmann::ordered_json sched;
      sched["climaxes"] = nlohmann::ordered_json::array();
      for (const auto& c : pv.climaxes) sched["climaxes"].push_back({c.start_s, c.end_s});
      sched["normal_s"] = pv.schedule->normal_s;
      sched["climax_s"] = pv.schedule->climax_s;
      auto stem = out;
      stem.replace_extension();
      quip::fs::write_atomic(stem.string() + ".frames.json", sched.dump(2) + "\n");
      quip::fs::write_atomic(stem.string() + ".composite.png", quip::encode_png(pv.composite));
      std::cout << quip::serialize_record(pv.record) << "\n";
      return kExitOk;
    }
    if (generate->parsed()) {
      gen.target_records = gen_target;
      gen.out_dir = gen_out.empty() ? config.paths.work_dir / "generated" : std::filesystem::path(gen_out);
      extra = {{"target", gen_target},
               {"url", gen.target_url},
               {"out_dir", gen.out_dir.string()},
               {"model_name", gen.model_name}};
      quip::write_config_echo(config, "generate", extra);
      for (const auto& c : quip::cmd_generate(config, clients, gen)) std::cout << c << "\n";
      return kExitOk;
    }
    if (score->parsed()) {
      quip::ScoreOptions so;
      for (const auto& f : score_files) so.comment_files.emplace_back(f);
      so.out = score_out.empty() ? config.paths.work_dir / "scores.tsv" : std::filesystem::path(score_out);
      extra = {{"comments", score_files}, {"out", so.out.string()}};
      quip::write_config_echo(config, "score", extra);
      std::cout << quip::cmd_score(config, clients, so);
      return kExitOk;
    }
  } catch (const quip::ConfigError& e) {
    quip::log::error(e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    quip::log::error(e.what());
    return kExitPipeline;
  }
  return kExitConfig;
}
