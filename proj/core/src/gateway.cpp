#include "metaforge/llm/gateway.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <functional>
#include <thread>

#include <nlohmann/json.hpp>

#include "metaforge/util/hash.hpp"
#include "metaforge/util/io.hpp"
#include "metaforge/util/strings.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace metaforge::llm {

using json = nlohmann::json;            // sorted keys, used for fingerprints
using ordered_json = nlohmann::ordered_json;

namespace {

/// Normalize prompt whitespace per line so cosmetics cannot invalidate a
/// cassette: trailing spaces dropped, runs of blank lines collapsed.
std::string normalize_prompt(std::string_view text) {
  std::string out;
  std::string line;
  int blank_run = 0;
  auto flush = [&] {
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
      line.pop_back();
    if (line.empty()) {
      ++blank_run;
    } else {
      if (!out.empty()) {
        out += '\n';
        if (blank_run > 0) out += '\n';
      }
      blank_run = 0;
      out += line;
    }
    line.clear();
  };
  for (char c : text) {
    if (c == '\n') {
      flush();
    } else {
      line += c;
    }
  }
  flush();
  return out;
}

}  // namespace

std::string fingerprint(const ChatRequest& req) {
  json j;
  j["kind"] = "chat";
  j["system"] = normalize_prompt(req.system_prompt);
  j["user"] = normalize_prompt(req.user_prompt);
  if (req.seed) j["seed"] = *req.seed;
  j["temperature"] = strings::canonical_real(req.temperature);
  j["tag"] = req.tag;
  return hash::sha256_hex(j.dump());
}

std::string embed_fingerprint(std::string_view text) {
  json j;
  j["kind"] = "embed";
  j["text"] = normalize_prompt(text);
  return hash::sha256_hex(j.dump());
}

CassetteMode cassette_mode_from_string(std::string_view name) {
  if (name == "record") return CassetteMode::record;
  if (name == "replay") return CassetteMode::replay;
  if (name == "live") return CassetteMode::live;
  throw Error(ErrorKind::config, "unknown cassette mode: " + std::string(name));
}

Cassette Cassette::load(const std::filesystem::path& path, CassetteMode mode) {
  Cassette cassette;
  cassette.mode_ = mode;
  cassette.path_ = path;
  if (std::filesystem::exists(path)) {
    std::optional<std::size_t> dimension;
    for (const auto& line : io::read_lines(path)) {
      if (strings::trim(line).empty()) continue;
      auto j = json::parse(line);
      auto fp = j.at("fingerprint").get<std::string>();
      if (j.contains("embedding")) {
        auto vec = j.at("embedding").get<std::vector<double>>();
        if (dimension && vec.size() != *dimension) {
          throw Error(ErrorKind::config,
                      "cassette embedding dimension mismatch in " + path.string());
        }
        dimension = vec.size();
        cassette.embeddings_[fp] = std::move(vec);
      } else {
        cassette.chat_[fp] = j.at("response").get<std::string>();
      }
    }
  } else if (mode == CassetteMode::replay) {
    throw Error(ErrorKind::not_found, "cassette not found: " + path.string());
  }
  return cassette;
}

Cassette Cassette::in_memory(CassetteMode mode) {
  Cassette cassette;
  cassette.mode_ = mode;
  return cassette;
}

std::optional<std::string> Cassette::find_chat(const std::string& fp) const {
  auto it = chat_.find(fp);
  if (it == chat_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::vector<double>> Cassette::find_embedding(const std::string& fp) const {
  auto it = embeddings_.find(fp);
  if (it == embeddings_.end()) return std::nullopt;
  return it->second;
}

void Cassette::put_chat(const std::string& fp, const std::string& tag,
                        const std::string& response) {
  std::lock_guard lock(*write_mutex_);
  auto it = chat_.find(fp);
  if (it != chat_.end() && it->second == response) return;  // already recorded
  chat_[fp] = response;
  if (!path_.empty()) {
    ordered_json j;
    j["fingerprint"] = fp;
    j["tag"] = tag;
    j["response"] = response;
    io::append_line(path_, j.dump());
  }
}

void Cassette::put_embedding(const std::string& fp, const std::string& tag,
                             const std::vector<double>& embedding) {
  std::lock_guard lock(*write_mutex_);
  auto it = embeddings_.find(fp);
  if (it != embeddings_.end() && it->second == embedding) return;  // already recorded
  embeddings_[fp] = embedding;
  if (!path_.empty()) {
    ordered_json j;
    j["fingerprint"] = fp;
    j["tag"] = tag;
    j["embedding"] = embedding;
    io::append_line(path_, j.dump());
  }
}

std::size_t Cassette::size() const { return chat_.size() + embeddings_.size(); }

/// Bounds concurrent in-flight transport requests.
class Gateway::Slot {
 public:
  explicit Slot(int limit) : available_(limit) {}
  void acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return available_ > 0; });
    --available_;
  }
  void release() {
    {
      std::lock_guard lock(mutex_);
      ++available_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  int available_;
};

Gateway::~Gateway() = default;
Gateway::Gateway(Gateway&&) noexcept = default;

Gateway::Gateway(std::shared_ptr<Cassette> cassette, std::shared_ptr<ChatTransport> transport,
                 GatewayConfig config)
    : cassette_(std::move(cassette)),
      transport_(std::move(transport)),
      config_(config),
      slots_(std::make_unique<Slot>(std::max(1, config.max_in_flight))) {
  if (!cassette_) throw Error(ErrorKind::config, "gateway requires a cassette");
  if (cassette_->mode() != CassetteMode::replay && !transport_) {
    throw Error(ErrorKind::config, "record/live mode requires a transport");
  }
}

std::string Gateway::with_retries(const std::string& /*what*/,
                                  const std::function<std::string()>& fn) {
  int delay_ms = config_.backoff_initial_ms;
  for (int attempt = 1;; ++attempt) {
    try {
      slots_->acquire();
      struct Releaser {
        Slot* s;
        ~Releaser() { s->release(); }
      } releaser{slots_.get()};
      return fn();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::transport || attempt >= config_.max_attempts) throw;
      std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
      delay_ms *= 4;
    }
  }
}

std::string Gateway::chat(const ChatRequest& req) {
  if (req.tag.empty() || req.user_prompt.empty()) {
    throw Error(ErrorKind::config, "chat request requires a tag and a non-empty prompt");
  }
  auto fp = fingerprint(req);
  if (cassette_->mode() == CassetteMode::replay) {
    auto hit = cassette_->find_chat(fp);
    if (!hit) {
      throw Error(ErrorKind::cassette_miss,
                  "no recorded response for tag '" + req.tag + "' fingerprint " + fp);
    }
    return *hit;
  }
  auto response = with_retries(req.tag, [&] { return transport_->complete(req); });
  if (cassette_->mode() == CassetteMode::record) {
    cassette_->put_chat(fp, req.tag, response);
  }
  return response;
}

std::vector<double> Gateway::embed(const std::string& text, const std::string& tag) {
  if (text.empty()) throw Error(ErrorKind::config, "cannot embed empty text");
  auto fp = embed_fingerprint(text);
  if (cassette_->mode() == CassetteMode::replay) {
    auto hit = cassette_->find_embedding(fp);
    if (!hit) {
      throw Error(ErrorKind::cassette_miss,
                  "no recorded embedding for tag '" + tag + "' fingerprint " + fp);
    }
    return *hit;
  }
  std::vector<double> result;
  with_retries(tag, [&] {
    result = transport_->embed(text);
    return std::string();
  });
  if (cassette_->mode() == CassetteMode::record) {
    cassette_->put_embedding(fp, tag, result);
  }
  return result;
}

namespace {

class HttpTransport : public ChatTransport {
 public:
  explicit HttpTransport(HttpTransportConfig config) : config_(std::move(config)) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    api_key_ = key ? key : "";
  }

  std::string complete(const ChatRequest& req) override {
    ordered_json body;
    body["model"] = config_.chat_model;
    body["messages"] = ordered_json::array();
    if (!req.system_prompt.empty()) {
      body["messages"].push_back({{"role", "system"}, {"content", req.system_prompt}});
    }
    body["messages"].push_back({{"role", "user"}, {"content", req.user_prompt}});
    body["temperature"] = req.temperature;
    if (req.seed) body["seed"] = *req.seed;
    auto response = post("/v1/chat/completions", body.dump());
    return response.at("choices").at(0).at("message").at("content").get<std::string>();
  }

  std::vector<double> embed(const std::string& text) override {
    ordered_json body;
    body["model"] = config_.embed_model;
    body["input"] = text;
    auto response = post("/v1/embeddings", body.dump());
    return response.at("data").at(0).at("embedding").get<std::vector<double>>();
  }

 private:
  json post(const std::string& path, const std::string& body) {
    httplib::Client client(config_.endpoint);
    client.set_read_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto result = client.Post(path, headers, body, "application/json");
    if (!result) {
      throw Error(ErrorKind::transport, "request to " + path + " failed: " +
                                            httplib::to_string(result.error()));
    }
    if (result->status < 200 || result->status >= 300) {
      throw Error(ErrorKind::transport,
                  "request to " + path + " returned " + std::to_string(result->status));
    }
    return json::parse(result->body);
  }

  HttpTransportConfig config_;
  std::string api_key_;
};

}  // namespace

std::shared_ptr<ChatTransport> make_http_transport(const HttpTransportConfig& config) {
  if (config.endpoint.empty()) {
    throw Error(ErrorKind::config, "transport endpoint not configured");
  }
  return std::make_shared<HttpTransport>(config);
}

}  // namespace metaforge::llm
