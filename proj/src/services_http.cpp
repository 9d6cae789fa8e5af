#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "quip/fsutil.hpp"
#include "quip/services.hpp"

namespace quip {
namespace http {
namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // path + query, at least "/"
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ClientError("not an absolute URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

httplib::Client make_client(const ClientConfig& config, const std::string& origin) {
  httplib::Client cli(origin);
  auto secs = static_cast<time_t>(config.timeout_s);
  auto usecs = static_cast<time_t>((config.timeout_s - static_cast<double>(secs)) * 1e6);
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  if (auto key = read_credential(config)) cli.set_bearer_token_auth(*key);
  return cli;
}

Response finish(const httplib::Result& res, const std::string& url) {
  if (!res) throw ClientError("request to " + url + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw ClientError("request to " + url + " returned HTTP " + std::to_string(res->status));
  }
  return {res->status, res->body};
}

}  // namespace

Response post_json(const ClientConfig& config, const std::string& url, const std::string& body) {
  auto [origin, path] = split_url(url);
  auto cli = make_client(config, origin);
  return finish(cli.Post(path, body, "application/json"), url);
}

Response post_bytes(const ClientConfig& config, const std::string& url, const std::string& body,
                    const std::string& content_type, const std::vector<std::pair<std::string, std::string>>& headers) {
  auto [origin, path] = split_url(url);
  auto cli = make_client(config, origin);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  return finish(cli.Post(path, h, body, content_type), url);
}

Response get(const ClientConfig& config, const std::string& url) {
  auto [origin, path] = split_url(url);
  auto cli = make_client(config, origin);
  return finish(cli.Get(path), url);
}

std::string url_encode(std::string_view s) { return httplib::detail::encode_query_param(std::string(s)); }

}  // namespace http

namespace {

nlohmann::json parse_json(const std::string& body, const std::string& what) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) throw ClientError(what + ": response is not JSON");
  return j;
}

std::string join_path(const std::string& endpoint, std::string_view suffix) {
  std::string out = endpoint;
  while (!out.empty() && out.back() == '/') out.pop_back();
  out += suffix;
  return out;
}

std::string chat_completion(const ClientConfig& config, nlohmann::json content, const GenerationConfig* gen) {
  nlohmann::json req;
  if (!config.model.empty()) req["model"] = config.model;
  req["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", std::move(content)}}});
  if (gen) {
    req["temperature"] = gen->temperature;
    req["top_p"] = gen->top_p;
    req["repetition_penalty"] = gen->repetition_penalty;
    req["max_tokens"] = gen->max_tokens;
  }
  auto res = http::post_json(config, config.endpoint, req.dump());
  auto j = parse_json(res.body, "chat completion");
  try {
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ClientError("chat completion: missing choices[0].message.content");
  }
}

}  // namespace

std::vector<RawVideo> HttpPlatformClient::fetch_videos(std::span<const std::string> tags, std::size_t count) {
  if (count == 0) return {};
  std::string joined;
  for (const auto& t : tags) {
    if (!joined.empty()) joined.push_back(',');
    joined += t;
  }
  std::string url = join_path(config_.endpoint, "/videos?tags=") + http::url_encode(joined) +
                    "&count=" + std::to_string(count);
  return with_retries("platform fetch", config_.max_retries, [&] {
    auto j = parse_json(http::get(config_, url).body, "platform fetch");
    if (!j.is_array()) throw ClientError("platform fetch: expected a JSON array");
    std::vector<RawVideo> out;
    for (const auto& item : j) {
      if (out.size() >= count) break;
      out.push_back(parse_raw_video(item.dump()));
    }
    return out;
  });
}

RawVideo HttpPlatformClient::fetch_by_url(std::string_view url) {
  std::string req = join_path(config_.endpoint, "/video?url=") + http::url_encode(url);
  return with_retries("platform lookup", config_.max_retries,
                      [&] { return parse_raw_video(http::get(config_, req).body); });
}

std::string HttpTranscriber::transcribe(std::string_view media_ref, Language language) {
  std::string bytes = fs::read_file(std::filesystem::path(std::string(media_ref)));
  return with_retries("transcription", config_.max_retries, [&] {
    auto res = http::post_bytes(config_, config_.endpoint, bytes, "application/octet-stream",
                                {{"X-Language", std::string(to_string(language))}});
    auto j = parse_json(res.body, "transcription");
    if (!j.contains("text") || !j["text"].is_string()) throw ClientError("transcription: missing 'text'");
    return j["text"].get<std::string>();
  });
}

std::string HttpDescriber::describe(const Image& composite, std::string_view transcription,
                                    std::span<const std::string> tags, Language language) {
  std::string tag_list;
  for (const auto& t : tags) {
    if (!tag_list.empty()) tag_list += ", ";
    tag_list += t;
  }
  std::ostringstream instr;
  if (language == Language::Zh) {
    instr << "这是一段短视频按时间顺序拼接的关键帧。请结合语音转写和标签，用中文详细描述视频内容。\n"
          << "标签：" << tag_list << "\n语音转写：" << transcription;
  } else {
    instr << "These are keyframes of a short video stitched in temporal order. Using the transcript and tags, "
             "describe the video content in detail.\nTags: "
          << tag_list << "\nTranscript: " << transcription;
  }
  std::string data_uri = "data:image/png;base64," + httplib::detail::base64_encode(encode_png(composite));
  nlohmann::json content = nlohmann::json::array(
      {{{"type", "text"}, {"text", instr.str()}}, {{"type", "image_url"}, {"image_url", {{"url", data_uri}}}}});
  return with_retries("video description", config_.max_retries,
                      [&] { return chat_completion(config_, content, nullptr); });
}

std::vector<double> HttpEmbedder::embed(std::string_view text) {
  nlohmann::json req;
  if (!config_.model.empty()) req["model"] = config_.model;
  req["input"] = std::string(text);
  return with_retries("embedding", config_.max_retries, [&] {
    auto j = parse_json(http::post_json(config_, config_.endpoint, req.dump()).body, "embedding");
    std::vector<double> v;
    try {
      v = j.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw ClientError("embedding: missing data[0].embedding");
    }
    if (v.size() != dim_) {
      throw ClientError("embedding: got dimension " + std::to_string(v.size()) + ", expected " + std::to_string(dim_));
    }
    return v;
  });
}

std::string HttpSentiment::classify(std::string_view text, Language language) {
  nlohmann::json req = {{"text", std::string(text)}, {"language", std::string(to_string(language))}};
  return with_retries("sentiment", config_.max_retries, [&] {
    auto j = parse_json(http::post_json(config_, config_.endpoint, req.dump()).body, "sentiment");
    // Either {"label": ...} or a score list; take the top-1 label.
    std::string label;
    if (j.is_object() && j.contains("label")) {
      label = j["label"].get<std::string>();
    } else if (j.is_array() && !j.empty()) {
      const nlohmann::json* best = nullptr;
      for (const auto& item : j) {
        if (!best || item.value("score", 0.0) > best->value("score", 0.0)) best = &item;
      }
      label = best->value("label", "");
    }
    if (label.empty()) throw ClientError("sentiment: response has no label");
    for (auto& c : label) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return label;
  });
}

std::string HttpGenerator::complete(std::string_view prompt, const GenerationConfig& config) {
  return chat_completion(config_, std::string(prompt), &config);
}

HttpEncyclopedia::HttpEncyclopedia(MemeSource source, ClientConfig config, std::string url_template,
                                   std::string name_pointer, std::string definition_pointer)
    : source_(source),
      config_(std::move(config)),
      url_template_(std::move(url_template)),
      name_pointer_(std::move(name_pointer)),
      definition_pointer_(std::move(definition_pointer)) {}

std::optional<MemeDefinition> HttpEncyclopedia::lookup(std::string_view term) {
  std::string url = url_template_;
  auto pos = url.find("{term}");
  if (pos == std::string::npos) throw ConfigError("encyclopedia URL template lacks {term}");
  url.replace(pos, 6, http::url_encode(term));

  auto res = http::get(config_, url);
  auto j = parse_json(res.body, "encyclopedia");
  nlohmann::json::json_pointer name_ptr(name_pointer_);
  nlohmann::json::json_pointer def_ptr(definition_pointer_);
  if (!j.contains(name_ptr) || !j.contains(def_ptr)) return std::nullopt;
  const auto& name = j[name_ptr];
  const auto& def = j[def_ptr];
  if (!name.is_string() || !def.is_string() || def.get<std::string>().empty()) return std::nullopt;
  return MemeDefinition{name.get<std::string>(), def.get<std::string>()};
}

}  // namespace quip
