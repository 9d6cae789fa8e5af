#include "quip/pipeline.hpp"

#include <algorithm>
#include <set>

#include "quip/error.hpp"
#include "quip/fsutil.hpp"
#include "quip/genpipe.hpp"
#include "quip/hashing.hpp"
#include "quip/log.hpp"
#include "quip/retrieval.hpp"
#include "quip/workqueue.hpp"

namespace quip {

using nlohmann::json;
using nlohmann::ordered_json;

// ---- configuration -------------------------------------------------------------------

namespace {

// Reads fields out of one JSON object and complains about leftovers.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ConfigError(where_ + ": expected an object");
  }
  ~ObjectReader() noexcept(false) {
    if (std::uncaught_exceptions()) return;
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where_ + "." + key + ": wrong type");
    }
  }

  void path(const char* key, std::filesystem::path& out) {
    std::string s = out.string();
    get(key, s);
    out = s;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string where(const char* key) const { return where_ + "." + key; }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void read_client(const json* j, const std::string& where, ClientConfig& c) {
  if (!j) return;
  ObjectReader r(*j, where);
  r.get("endpoint", c.endpoint);
  r.get("credential_env_var", c.credential_env_var);
  r.get("timeout_s", c.timeout_s);
  r.get("max_retries", c.max_retries);
  r.get("model", c.model);
}

void read_encyclopedia(const json* j, const std::string& where, EncyclopediaConfig& e) {
  if (!j) return;
  ObjectReader r(*j, where);
  r.get("endpoint", e.client.endpoint);
  r.get("credential_env_var", e.client.credential_env_var);
  r.get("timeout_s", e.client.timeout_s);
  r.get("max_retries", e.client.max_retries);
  r.get("url_template", e.url_template);
  r.get("name_pointer", e.name_pointer);
  r.get("definition_pointer", e.definition_pointer);
}

void read_bounds(ObjectReader& r, const char* key, LengthBounds& b) {
  std::vector<std::size_t> v{b.min, b.max};
  r.get(key, v);
  if (v.size() != 2) throw ConfigError(r.where(key) + ": expected [min, max]");
  b = {v[0], v[1]};
}

ordered_json client_json(const ClientConfig& c) {
  return {{"endpoint", c.endpoint},
          {"credential_env_var", c.credential_env_var},
          {"timeout_s", c.timeout_s},
          {"max_retries", c.max_retries},
          {"model", c.model}};
}

ordered_json encyclopedia_json(const EncyclopediaConfig& e) {
  return {{"endpoint", e.client.endpoint},
          {"credential_env_var", e.client.credential_env_var},
          {"timeout_s", e.client.timeout_s},
          {"max_retries", e.client.max_retries},
          {"url_template", e.url_template},
          {"name_pointer", e.name_pointer},
          {"definition_pointer", e.definition_pointer}};
}

}  // namespace

void PipelineConfig::validate() const {
  if (concurrency == 0) throw ConfigError("concurrency must be at least 1");
  if (retrieval_k == 0) throw ConfigError("retrieval.k must be at least 1");
  if (embedding_dim == 0) throw ConfigError("retrieval.embedding_dim must be at least 1");
  if (cascade.knn_k == 0) throw ConfigError("labeler.knn_k must be at least 1");
  if (!(cascade.similarity_threshold >= 0 && cascade.similarity_threshold <= 1)) {
    throw ConfigError("labeler.similarity_threshold must lie in [0, 1]");
  }
  if (!(media.rates.normal_fps > 0) || !(media.rates.climax_fps > 0)) throw ConfigError("media rates must be positive");
  if (!(media.signal_window_s > 0)) throw ConfigError("media.signal_window_s must be positive");
  if (!(media.climax.z_threshold > 0) || media.climax.min_gap_s < 0) throw ConfigError("bad climax options");
  if (media.cell_width == 0 || media.cell_height == 0 || media.max_cols == 0) {
    throw ConfigError("media cell size and max_cols must be positive");
  }
  generation.validate();
  scoring.validate();
  for (const ClientConfig* c : {&platform, &transcriber, &describer, &embedder, &sentiment, &generator}) {
    if (!(c->timeout_s > 0)) throw ConfigError("client timeout_s must be positive");
  }
}

PipelineConfig config_from_json(const json& j, const PipelineConfig& base) {
  PipelineConfig c = base;
  {
    ObjectReader r(j, "config");
    r.get("mock", c.mock);
    r.get("seed", c.seed);
    r.get("concurrency", c.concurrency);
    if (const json* p = r.child("paths")) {
      ObjectReader pr(*p, "paths");
      pr.path("work_dir", c.paths.work_dir);
      pr.path("dataset", c.paths.dataset);
      pr.path("seed_dataset", c.paths.seed_dataset);
      pr.path("benchmark", c.paths.benchmark);
      pr.path("store", c.paths.store);
      pr.path("meme_cache", c.paths.meme_cache);
      pr.path("rules_dir", c.paths.rules_dir);
      pr.path("lexicon_dir", c.paths.lexicon_dir);
      pr.path("templates_dir", c.paths.templates_dir);
      pr.path("fixture_dir", c.paths.fixture_dir);
      pr.path("encyclopedia_dir", c.paths.encyclopedia_dir);
    }
    if (const json* f = r.child("fetch")) {
      ObjectReader fr(*f, "fetch");
      fr.get("tags", c.fetch_tags);
      fr.get("count", c.fetch_count);
    }
    if (const json* l = r.child("labeler")) {
      ObjectReader lr(*l, "labeler");
      lr.get("similarity_threshold", c.cascade.similarity_threshold);
      lr.get("knn_k", c.cascade.knn_k);
      lr.get("knn_min_similarity", c.cascade.knn_min_similarity);
    }
    if (const json* m = r.child("media")) {
      ObjectReader mr(*m, "media");
      mr.get("normal_fps", c.media.rates.normal_fps);
      mr.get("climax_fps", c.media.rates.climax_fps);
      mr.get("z_threshold", c.media.climax.z_threshold);
      mr.get("min_gap_s", c.media.climax.min_gap_s);
      mr.get("signal_window_s", c.media.signal_window_s);
      mr.get("cell_width", c.media.cell_width);
      mr.get("cell_height", c.media.cell_height);
      mr.get("max_cols", c.media.max_cols);
    }
    if (const json* rt = r.child("retrieval")) {
      ObjectReader rr(*rt, "retrieval");
      rr.get("k", c.retrieval_k);
      rr.get("embedding_dim", c.embedding_dim);
    }
    if (const json* g = r.child("generation")) {
      ObjectReader gr(*g, "generation");
      gr.get("temperature", c.generation.temperature);
      gr.get("top_p", c.generation.top_p);
      gr.get("repetition_penalty", c.generation.repetition_penalty);
      gr.get("max_tokens", c.generation.max_tokens);
      gr.get("keyword_count", c.keyword_count);
    }
    if (const json* s = r.child("scorer")) {
      ObjectReader sr(*s, "scorer");
      sr.get("sigma", c.scoring.sigma);
      sr.get("sigma_l_en", c.scoring.sigma_l_en);
      sr.get("sigma_l_zh", c.scoring.sigma_l_zh);
      read_bounds(sr, "bounds_en", c.scoring.bounds_en);
      read_bounds(sr, "bounds_zh", c.scoring.bounds_zh);
    }
    if (const json* cl = r.child("clients")) {
      ObjectReader cr(*cl, "clients");
      read_client(cr.child("platform"), "clients.platform", c.platform);
      read_client(cr.child("transcriber"), "clients.transcriber", c.transcriber);
      read_client(cr.child("describer"), "clients.describer", c.describer);
      read_client(cr.child("embedder"), "clients.embedder", c.embedder);
      read_client(cr.child("sentiment"), "clients.sentiment", c.sentiment);
      read_client(cr.child("generator"), "clients.generator", c.generator);
      read_encyclopedia(cr.child("regeng_baike"), "clients.regeng_baike", c.regeng_baike);
      read_encyclopedia(cr.child("urban_dictionary"), "clients.urban_dictionary", c.urban_dictionary);
      read_encyclopedia(cr.child("know_your_meme"), "clients.know_your_meme", c.know_your_meme);
    }
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = fs::read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  auto j = json::parse(text, nullptr, false, true);
  if (j.is_discarded()) throw ConfigError(path.string() + ": not valid JSON");
  try {
    return config_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ordered_json config_to_json(const PipelineConfig& c) {
  ordered_json j;
  j["mock"] = c.mock;
  j["seed"] = c.seed;
  j["concurrency"] = c.concurrency;
  j["paths"] = {{"work_dir", c.paths.work_dir.string()},
                {"dataset", c.paths.dataset.string()},
                {"seed_dataset", c.paths.seed_dataset.string()},
                {"benchmark", c.paths.benchmark.string()},
                {"store", c.paths.store.string()},
                {"meme_cache", c.paths.meme_cache.string()},
                {"rules_dir", c.paths.rules_dir.string()},
                {"lexicon_dir", c.paths.lexicon_dir.string()},
                {"templates_dir", c.paths.templates_dir.string()},
                {"fixture_dir", c.paths.fixture_dir.string()},
                {"encyclopedia_dir", c.paths.encyclopedia_dir.string()}};
  j["fetch"] = {{"tags", c.fetch_tags}, {"count", c.fetch_count}};
  j["labeler"] = {{"similarity_threshold", c.cascade.similarity_threshold},
                  {"knn_k", c.cascade.knn_k},
                  {"knn_min_similarity", c.cascade.knn_min_similarity}};
  j["media"] = {{"normal_fps", c.media.rates.normal_fps},   {"climax_fps", c.media.rates.climax_fps},
                {"z_threshold", c.media.climax.z_threshold}, {"min_gap_s", c.media.climax.min_gap_s},
                {"signal_window_s", c.media.signal_window_s}, {"cell_width", c.media.cell_width},
                {"cell_height", c.media.cell_height},         {"max_cols", c.media.max_cols}};
  j["retrieval"] = {{"k", c.retrieval_k}, {"embedding_dim", c.embedding_dim}};
  j["generation"] = {{"temperature", c.generation.temperature},
                     {"top_p", c.generation.top_p},
                     {"repetition_penalty", c.generation.repetition_penalty},
                     {"max_tokens", c.generation.max_tokens},
                     {"keyword_count", c.keyword_count}};
  j["scorer"] = {{"sigma", c.scoring.sigma},
                 {"sigma_l_en", c.scoring.sigma_l_en},
                 {"sigma_l_zh", c.scoring.sigma_l_zh},
                 {"bounds_en", {c.scoring.bounds_en.min, c.scoring.bounds_en.max}},
                 {"bounds_zh", {c.scoring.bounds_zh.min, c.scoring.bounds_zh.max}}};
  j["clients"] = {{"platform", client_json(c.platform)},
                  {"transcriber", client_json(c.transcriber)},
                  {"describer", client_json(c.describer)},
                  {"embedder", client_json(c.embedder)},
                  {"sentiment", client_json(c.sentiment)},
                  {"generator", client_json(c.generator)},
                  {"regeng_baike", encyclopedia_json(c.regeng_baike)},
                  {"urban_dictionary", encyclopedia_json(c.urban_dictionary)},
                  {"know_your_meme", encyclopedia_json(c.know_your_meme)}};
  return j;
}

// ---- clients ---------------------------------------------------------------------------

namespace {

std::unique_ptr<EncyclopediaClient> mock_encyclopedia(MemeSource source, const std::filesystem::path& file) {
  if (std::filesystem::exists(file)) return MockEncyclopedia::from_file(source, file);
  return std::make_unique<MockEncyclopedia>(source);
}

}  // namespace

ClientStack make_clients(const PipelineConfig& c) {
  ClientStack s;
  s.decoder = std::make_unique<RoutingDecoder>();
  if (c.mock) {
    s.platform = std::make_unique<MockPlatformClient>(c.paths.fixture_dir);
    s.transcriber = std::make_unique<MockTranscriber>(c.seed);
    s.describer = std::make_unique<MockDescriber>(c.seed);
    s.embedder = std::make_unique<MockEmbedder>(c.seed, c.embedding_dim);
    s.sentiment = std::make_unique<MockSentiment>(c.seed);
    s.generator = std::make_unique<MockGenerator>(c.seed);
    const auto& dir = c.paths.encyclopedia_dir;
    s.encyclopedia_owners.push_back(mock_encyclopedia(MemeSource::RegengBaike, dir / "regeng_baike.tsv"));
    s.encyclopedia_owners.push_back(mock_encyclopedia(MemeSource::UrbanDictionary, dir / "urban_dictionary.tsv"));
    s.encyclopedia_owners.push_back(mock_encyclopedia(MemeSource::KnowYourMeme, dir / "know_your_meme.tsv"));
  } else {
    s.platform = std::make_unique<HttpPlatformClient>(c.platform);
    s.transcriber = std::make_unique<HttpTranscriber>(c.transcriber);
    s.describer = std::make_unique<HttpDescriber>(c.describer);
    s.embedder = std::make_unique<HttpEmbedder>(c.embedder, c.embedding_dim);
    s.sentiment = std::make_unique<HttpSentiment>(c.sentiment);
    s.generator = std::make_unique<HttpGenerator>(c.generator);
    auto add = [&](MemeSource src, const EncyclopediaConfig& e) {
      s.encyclopedia_owners.push_back(std::make_unique<HttpEncyclopedia>(src, e.client, e.url_template, e.name_pointer,
                                                                         e.definition_pointer));
    };
    add(MemeSource::RegengBaike, c.regeng_baike);
    add(MemeSource::UrbanDictionary, c.urban_dictionary);
    add(MemeSource::KnowYourMeme, c.know_your_meme);
  }
  s.encyclopedias.zh = {s.encyclopedia_owners[0].get()};
  s.encyclopedias.en = {s.encyclopedia_owners[1].get(), s.encyclopedia_owners[2].get()};
  return s;
}

namespace {

void require_endpoint(const PipelineConfig& c, const ClientConfig& client, const char* name) {
  if (!c.mock && client.endpoint.empty()) {
    throw ConfigError(std::string("clients.") + name + ".endpoint is not set (or pass --mock)");
  }
}

void require_encyclopedias(const PipelineConfig& c) {
  if (c.mock) return;
  for (auto [e, name] : {std::pair{&c.regeng_baike, "regeng_baike"}, std::pair{&c.urban_dictionary, "urban_dictionary"},
                         std::pair{&c.know_your_meme, "know_your_meme"}}) {
    if (e->url_template.empty()) throw ConfigError(std::string("clients.") + name + ".url_template is not set");
  }
}

}  // namespace

// ---- video processing ----------------------------------------------------------------

namespace {

VideoRecord base_record(const RawVideo& raw) {
  VideoRecord r;
  r.id = raw.id;
  r.platform = raw.platform;
  r.language = language_of(raw.platform);
  r.category = raw.category;
  r.tags = raw.tags;
  r.introduction = raw.introduction;
  if (!raw.source_url.empty()) r.source_url = raw.source_url;
  return r;
}

Image composite_of(std::vector<Image> frames, const MediaSettings& m) {
  if (frames.empty()) throw Error("no frames to composite");
  for (auto& f : frames) {
    if (f.width() != m.cell_width || f.height() != m.cell_height) f = resize_nearest(f, m.cell_width, m.cell_height);
  }
  auto layout = composite_layout(frames.size(), m.cell_width, m.cell_height, m.max_cols);
  return stitch(frames, layout);
}

void transcribe_and_describe(ProcessedVideo& out, const RawVideo& raw, const PipelineConfig& config,
                             ClientStack& clients) {
  Language lang = out.record.language;
  out.record.transcription = with_retries("transcription of " + raw.id, config.transcriber.max_retries,
                                          [&] { return clients.transcriber->transcribe(raw.media_ref, lang); });
  out.record.description = with_retries("description of " + raw.id, config.describer.max_retries, [&] {
    return clients.describer->describe(out.composite, out.record.transcription, raw.tags, lang);
  });
}

}  // namespace

ProcessedVideo build_record(const RawVideo& raw, const PipelineConfig& config, ClientStack& clients) {
  ProcessedVideo out;
  out.record = base_record(raw);
  out.record.comments = top_five_comments(raw.comments);
  if (raw.media_ref.empty()) throw Error("video " + raw.id + " has no media reference");

  MediaInfo info = clients.decoder->probe(raw.media_ref);
  out.plan = plan_frames(info.frame_count);
  std::vector<Image> frames;
  for (std::size_t idx : out.plan.chosen_indices) frames.push_back(clients.decoder->frame_at_index(raw.media_ref, idx));
  out.composite = composite_of(std::move(frames), config.media);

  transcribe_and_describe(out, raw, config, clients);
  validate(out.record);
  return out;
}

ProcessedVideo process_target(const RawVideo& raw, const PipelineConfig& config, ClientStack& clients) {
  ProcessedVideo out;
  out.record = base_record(raw);
  if (raw.media_ref.empty()) throw Error("video " + raw.id + " has no media reference");

  const auto& m = config.media;
  MediaInfo info = clients.decoder->probe(raw.media_ref);
  auto audio = clients.decoder->audio_envelope(raw.media_ref, m.signal_window_s);
  auto luma = clients.decoder->luma_series(raw.media_ref, m.signal_window_s);
  out.climaxes = detect_climax(audio, luma, m.climax);
  for (auto& c : out.climaxes) c.end_s = std::min(c.end_s, info.duration_s);
  std::erase_if(out.climaxes, [](const ClimaxInterval& c) { return c.end_s <= c.start_s; });
  out.schedule = dual_rate_sample(info.duration_s, out.climaxes, m.rates);

  std::vector<Image> frames;
  for (double t : out.schedule->timestamps_s) frames.push_back(clients.decoder->frame_at_time(raw.media_ref, t));
  out.composite = composite_of(std::move(frames), m);

  transcribe_and_describe(out, raw, config, clients);
  validate(out.record);
  return out;
}

// ---- workflows -------------------------------------------------------------------------

std::string safe_file_name(std::string_view id) {
  bool ok = !id.empty() && id.size() <= 80 && id != "." && id != "..";
  for (char c : id) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) ok = false;
  }
  if (ok) return std::string(id);
  return "id-" + hex64(fnv1a64(id));
}

void write_config_echo(const PipelineConfig& config, std::string_view command, const ordered_json& extra) {
  ordered_json j;
  j["command"] = command;
  j["config"] = config_to_json(config);
  j["options"] = extra;
  std::filesystem::create_directories(config.paths.work_dir);
  fs::write_atomic(config.paths.work_dir / (std::string(command) + ".config.json"), j.dump(2) + "\n");
}

namespace {

void ensure_parent(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
}

Dataset load_seed(const PipelineConfig& c) {
  if (c.paths.seed_dataset.empty() || !std::filesystem::exists(c.paths.seed_dataset)) {
    log::warn("seed dataset ", c.paths.seed_dataset.string(), " not found; annotating without it");
    return {};
  }
  return load_dataset(c.paths.seed_dataset);
}

void annotate_and_save(Dataset& dataset, const PipelineConfig& c) {
  LabelerConfig lc = load_labeler_config(c.paths.rules_dir, c.paths.lexicon_dir);
  lc.options = c.cascade;
  Dataset seed = load_seed(c);
  auto entries = annotate_dataset(dataset, seed, lc);
  ensure_parent(c.paths.dataset_file());
  save_dataset(dataset, c.paths.dataset_file());
  std::filesystem::create_directories(c.paths.work_dir);
  fs::write_atomic(c.paths.work_dir / "label_audit.tsv", format_audit_log(entries));
  std::array<std::size_t, 6> per_tier{};
  for (const auto& e : entries) ++per_tier[static_cast<std::size_t>(e.decision.tier)];
  log::info("labeled ", entries.size(), " comments (rule ", per_tier[0], ", similarity ", per_tier[1], ", lexicon ",
            per_tier[2], ", knn ", per_tier[3], ", prior ", per_tier[4], ")");
}

ordered_json plan_json(const FramePlan& p) {
  return {{"total_frames", p.total_frames}, {"chosen_indices", p.chosen_indices}};
}

}  // namespace

RunStatus cmd_dataset_build(const PipelineConfig& config, ClientStack& clients, const BuildOptions& options) {
  require_endpoint(config, config.platform, "platform");
  require_endpoint(config, config.transcriber, "transcriber");
  require_endpoint(config, config.describer, "describer");

  const auto work = config.paths.work_dir;
  const auto records_dir = work / "records";
  const auto composites_dir = work / "composites";
  std::filesystem::create_directories(records_dir);
  std::filesystem::create_directories(composites_dir);

  // Stage 1: selection.
  std::vector<RawVideo> raws;
  if (!options.urls.empty()) {
    for (const auto& url : options.urls) raws.push_back(clients.platform->fetch_by_url(url));
  } else {
    raws = clients.platform->fetch_videos(config.fetch_tags, config.fetch_count);
  }
  std::vector<std::string> ids;
  std::map<std::string, const RawVideo*> by_id;
  for (const auto& r : raws) {
    if (!by_id.emplace(r.id, &r).second) {
      log::warn("duplicate video id ", r.id, " ignored");
      continue;
    }
    ids.push_back(r.id);
  }
  log::info("dataset-build: ", ids.size(), " videos selected");

  // Stages 2-5 per video, resumable.
  WorkQueue queue = WorkQueue::open(work / "status.tsv");
  auto summary = run_queue(queue, ids, config.concurrency, [&](const std::string& id) {
    ProcessedVideo pv = build_record(*by_id.at(id), config, clients);
    std::string name = safe_file_name(id);
    fs::write_atomic(composites_dir / (name + ".png"), encode_png(pv.composite));
    ordered_json j;
    j["record"] = ordered_json::parse(serialize_record(pv.record));
    j["plan"] = plan_json(pv.plan);
    fs::write_atomic(records_dir / (name + ".json"), j.dump() + "\n");
  });
  log::info("dataset-build: ", summary.described, " described, ", summary.failed, " failed, ", summary.skipped,
            " already done");

  // Assemble in selection order from persisted records.
  Dataset dataset;
  ordered_json plans = ordered_json::object();
  std::size_t failed = 0;
  for (const auto& id : ids) {
    auto item = queue.find(id);
    auto file = records_dir / (safe_file_name(id) + ".json");
    if (!item || item->status != WorkStatus::Described || !std::filesystem::exists(file)) {
      ++failed;
      continue;
    }
    auto j = json::parse(fs::read_file(file));
    dataset.add(parse_record(j.at("record").dump()));
    plans[id] = j.at("plan");
  }
  fs::write_atomic(work / "plan.json", plans.dump(2) + "\n");

  // Stage 6.
  if (dataset.empty()) throw Error("dataset-build: no video was processed successfully");
  annotate_and_save(dataset, config);
  log::info("dataset-build: wrote ", dataset.size(), " records to ", config.paths.dataset_file().string());
  return failed ? RunStatus::PartialFailure : RunStatus::Ok;
}

RunStatus cmd_annotate(const PipelineConfig& config) {
  Dataset dataset = load_dataset(config.paths.dataset_file());
  annotate_and_save(dataset, config);
  return RunStatus::Ok;
}

RunStatus cmd_embed(const PipelineConfig& config, ClientStack& clients) {
  require_endpoint(config, config.embedder, "embedder");
  if (!std::filesystem::exists(config.paths.dataset_file())) {
    throw Error("dataset " + config.paths.dataset_file().string() + " not found; run `quip dataset-build` first");
  }
  Dataset dataset = load_dataset(config.paths.dataset_file());
  VectorStore store = embed_and_index(dataset, *clients.embedder);
  if (store.empty()) throw Error("embed: no record could be embedded");
  ensure_parent(config.paths.store_file());
  save_store(store, config.paths.store_file());
  log::info("embed: indexed ", store.size(), " of ", dataset.size(), " records into ", config.paths.store_file().string());
  return store.size() == dataset.size() ? RunStatus::Ok : RunStatus::PartialFailure;
}

std::vector<std::string> cmd_generate(const PipelineConfig& config, ClientStack& clients,
                                      const GenerateOptions& options) {
  require_endpoint(config, config.embedder, "embedder");
  require_endpoint(config, config.generator, "generator");
  require_encyclopedias(config);

  if (!std::filesystem::exists(config.paths.dataset_file())) {
    throw Error("dataset " + config.paths.dataset_file().string() + " not found; run `quip dataset-build` first");
  }
  if (!std::filesystem::exists(config.paths.store_file())) {
    throw Error("vector store " + config.paths.store_file().string() + " not found; run `quip embed` first");
  }
  Dataset dataset = load_dataset(config.paths.dataset_file());
  VectorStore store = load_store(config.paths.store_file());

  std::vector<VideoRecord> targets;
  if (!options.target_records.empty()) {
    Dataset t = load_dataset(options.target_records);
    targets = t.records();
  }
  if (!options.target_url.empty()) {
    require_endpoint(config, config.platform, "platform");
    RawVideo raw = clients.platform->fetch_by_url(options.target_url);
    targets.push_back(process_target(raw, config, clients).record);
  }
  if (targets.empty()) throw ConfigError("generate: no target given (use --target or --url)");

  ensure_parent(config.paths.meme_cache_file());
  MemeCache memes = MemeCache::open(config.paths.meme_cache_file());
  std::map<Language, PromptTemplate> templates;
  for (const auto& t : targets) {
    if (templates.count(t.language)) continue;
    auto path = template_path(config.paths.templates_dir, t.platform);
    try {
      templates.emplace(t.language, PromptTemplate::load(path));
    } catch (const IoError& e) {
      throw ConfigError(std::string("prompt template: ") + e.what());
    }
  }

  GenerationResources res;
  res.dataset = &dataset;
  res.store = &store;
  res.embedder = clients.embedder.get();
  res.generator = clients.generator.get();
  res.memes = &memes;
  res.encyclopedias = clients.encyclopedias;
  res.zh_template = templates.count(Language::Zh) ? &templates.at(Language::Zh) : nullptr;
  res.en_template = templates.count(Language::En) ? &templates.at(Language::En) : nullptr;
  res.retrieval_k = config.retrieval_k;
  res.keyword_count = config.keyword_count;
  res.config = config.generation;
  res.max_retries = config.generator.max_retries;

  std::filesystem::create_directories(options.out_dir);
  std::vector<std::string> comments;
  std::string comments_jsonl;
  // Sequential on purpose: meme expressions are appended in target order.
  for (const auto& target : targets) {
    GenerationOutcome outcome = generate_for_video(target, res);
    std::string name = safe_file_name(target.id);
    ordered_json report = provenance_json(target, outcome);
    report["config"] = config_to_json(config);
    fs::write_atomic(options.out_dir / (name + ".provenance.json"), report.dump(2) + "\n");
    fs::write_atomic(options.out_dir / (name + ".comment.txt"), outcome.comment + "\n");
    ordered_json line{{"model", options.model_name}, {"video_id", target.id}, {"comment", outcome.comment}};
    comments_jsonl += line.dump() + "\n";
    comments.push_back(outcome.comment);
    log::info("generate: ", target.id, " -> ", to_string(outcome.decision.style),
              outcome.retrieval.category_filtered ? " (category retrieval)" : " (global retrieval)");
  }
  fs::write_atomic(options.out_dir / "comments.jsonl", comments_jsonl);
  return comments;
}

std::string cmd_score(const PipelineConfig& config, ClientStack& clients, const ScoreOptions& options) {
  require_endpoint(config, config.sentiment, "sentiment");
  Dataset benchmark = load_dataset(config.paths.benchmark);
  Dataset training;
  if (std::filesystem::exists(config.paths.dataset_file())) {
    training = load_dataset(config.paths.dataset_file());
  } else {
    log::warn("training dataset ", config.paths.dataset_file().string(), " not found; originality uses the benchmark only");
  }
  ScoringContext ctx(std::move(benchmark), std::move(training), config.scoring);

  std::vector<ScoredComment> comments;
  for (const auto& file : options.comment_files) {
    auto part = parse_comments_file(fs::read_file(file), file.string());
    comments.insert(comments.end(), part.begin(), part.end());
  }
  auto rows = score_comments(comments, ctx, *clients.sentiment);
  std::string report = format_score_report(rows, ctx);
  ensure_parent(options.out);
  fs::write_atomic(options.out, report);
  return report;
}

}  // namespace quip
