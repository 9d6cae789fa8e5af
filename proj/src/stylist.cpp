#include "quip/stylist.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "quip/error.hpp"
#include "quip/fsutil.hpp"
#include "quip/log.hpp"
#include "quip/unicode.hpp"

namespace quip {

StyleDecision decide_style(std::span<const RetrievedSample> retrieved) {
  StyleDecision d{};
  std::size_t labeled = 0;
  for (const auto& s : retrieved) {
    for (const auto& c : s.comments) {
      if (!c.c_label) continue;
      ++d.vote_counts[index_of(*c.c_label)];
      ++labeled;
    }
  }
  if (labeled == 0) throw Error("style decision: retrieved samples carry no labeled comments; annotate the dataset first");
  std::size_t best = 0;
  for (std::size_t l = 1; l < d.vote_counts.size(); ++l) {
    if (d.vote_counts[l] > d.vote_counts[best]) best = l;
  }
  d.style = kAllStyles[best];
  for (const auto& s : retrieved) {
    std::size_t taken = 0;
    for (const auto& c : s.comments) {
      if (taken == kExamplesPerSample) break;
      if (c.c_label == d.style) {
        d.examples.push_back({c.text, s.sample_id});
        ++taken;
      }
    }
  }
  return d;
}

std::vector<std::string> extract_keywords(std::string_view text, Language language, const TfIdfModel& model,
                                          std::size_t n) {
  struct Scored {
    std::string token;
    double weight;
    std::size_t first;
  };
  std::vector<Scored> scored;
  auto tokens = tokenize(text, language).tokens;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto dim = model.lookup(tokens[i]);
    if (!dim) continue;
    auto it = std::find_if(scored.begin(), scored.end(), [&](const Scored& s) { return s.token == tokens[i]; });
    if (it == scored.end()) {
      scored.push_back({tokens[i], model.idf(*dim), i});
    } else {
      it->weight += model.idf(*dim);
    }
  }
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.first < b.first;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scored.size() && i < n; ++i) out.push_back(scored[i].token);
  return out;
}

// ---- meme cache --------------------------------------------------------------------

std::string MemeCache::normalize_name(std::string_view name) {
  // Collapse inner whitespace runs so "No  Cap" and "no cap" agree.
  std::string folded = utf8::normalize(utf8::trim(name));
  std::string out;
  bool space = false;
  for (char32_t cp : utf8::decode(folded)) {
    if (utf8::is_space(cp)) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out.push_back(' ');
    space = false;
    utf8::append(out, cp);
  }
  return out;
}

MemeCache MemeCache::open(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    MemeCache c;
    c.path_ = path;
    return c;
  }
  return parse(fs::read_file(path), path);
}

const MemeEntry* MemeCache::find(std::string_view name) const {
  auto it = entries_.find(normalize_name(name));
  return it == entries_.end() ? nullptr : &it->second;
}

const MemeEntry& MemeCache::insert(MemeEntry entry) {
  std::string key = normalize_name(entry.name);
  if (key.empty()) throw Error("meme name is empty");
  auto [it, inserted] = entries_.try_emplace(key, entry);
  if (!inserted) {
    MemeEntry& existing = it->second;
    if (existing.definition.empty()) existing.definition = entry.definition;
    for (auto& e : entry.expressions) {
      if (std::find(existing.expressions.begin(), existing.expressions.end(), e) == existing.expressions.end()) {
        existing.expressions.push_back(std::move(e));
      }
    }
  }
  save();
  return it->second;
}

void MemeCache::append_expression(std::string_view name, std::string expression) {
  auto it = entries_.find(normalize_name(name));
  if (it == entries_.end()) throw Error("meme '" + std::string(name) + "' is not in the cache");
  auto& ex = it->second.expressions;
  if (std::find(ex.begin(), ex.end(), expression) != ex.end()) return;
  ex.push_back(std::move(expression));
  save();
}

std::string MemeCache::serialize() const {
  std::string out;
  for (const auto& [key, e] : entries_) {
    nlohmann::ordered_json j;
    j["name"] = e.name;
    j["definition"] = e.definition;
    j["source"] = to_string(e.source);
    j["expressions"] = e.expressions;
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

MemeCache MemeCache::parse(std::string_view text, std::filesystem::path path) {
  MemeCache c;
  c.path_ = std::move(path);
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw SchemaError(n, "meme entry is not a JSON object", c.path_.string());
    try {
      MemeEntry e;
      e.name = j.at("name").get<std::string>();
      e.definition = j.at("definition").get<std::string>();
      auto src = parse_meme_source(j.at("source").get<std::string>());
      if (!src) throw SchemaError(n, "unknown meme source", c.path_.string());
      e.source = *src;
      e.expressions = j.at("expressions").get<std::vector<std::string>>();
      std::string key = normalize_name(e.name);
      if (key.empty()) throw SchemaError(n, "meme name is empty", c.path_.string());
      c.entries_[key] = std::move(e);
    } catch (const nlohmann::json::exception& ex) {
      throw SchemaError(n, ex.what(), c.path_.string());
    }
  }
  return c;
}

void MemeCache::save() const {
  if (path_.empty()) return;
  fs::FileLock lock(path_);
  fs::write_atomic(path_, serialize());
}

std::optional<MemeLookup> augment_with_memes(std::span<const std::string> keywords, MemeCache& cache,
                                             const EncyclopediaSet& encyclopedias, Language language) {
  unsigned calls = 0;
  for (const auto& kw : keywords) {
    if (const MemeEntry* hit = cache.find(kw)) return MemeLookup{*hit, kw, true, calls};
    for (EncyclopediaClient* client : encyclopedias.for_language(language)) {
      ++calls;
      std::optional<MemeDefinition> def;
      try {
        def = client->lookup(kw);
      } catch (const ClientError& e) {
        log::warn("meme lookup for '", kw, "' via ", to_string(client->source()), " failed: ", e.what());
        continue;
      }
      if (!def) continue;
      MemeEntry entry{def->name.empty() ? kw : def->name, def->definition, {}, client->source()};
      const MemeEntry& stored = cache.insert(std::move(entry));
      return MemeLookup{stored, kw, false, calls};
    }
  }
  return std::nullopt;
}

void record_meme_usage(MemeCache& cache, std::string_view meme_name, std::string generated_comment) {
  cache.append_expression(meme_name, std::move(generated_comment));
}

}  // namespace quip
