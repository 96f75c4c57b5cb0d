#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "metaforge/common.hpp"

namespace metaforge::llm {

struct ChatRequest {
  std::string system_prompt;
  std::string user_prompt;
  std::optional<std::int64_t> seed;
  double temperature = 0.0;
  std::string tag;  // names the calling operation
};

/// Stable fingerprint of a canonicalized request: sorted-key JSON with
/// whitespace-normalized prompts, hashed with SHA-256. Prompt cosmetics
/// (indentation, trailing spaces) do not change the fingerprint.
std::string fingerprint(const ChatRequest& req);
std::string embed_fingerprint(std::string_view text);

enum class CassetteMode { record, replay, live };

CassetteMode cassette_mode_from_string(std::string_view name);

/// Transport actually talking to a model service. Replay mode never touches
/// one; tests plug in scripted implementations.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string complete(const ChatRequest& req) = 0;
  virtual std::vector<double> embed(const std::string& text) = 0;
};

struct HttpTransportConfig {
  std::string endpoint;  // e.g. https://api.openai.com
  std::string chat_model;
  std::string embed_model;
  std::string api_key_env = "METAFORGE_API_KEY";
  int timeout_seconds = 120;
};

/// OpenAI-style chat-completions + embeddings client.
std::shared_ptr<ChatTransport> make_http_transport(const HttpTransportConfig& config);

/// JSON-lines store, one {fingerprint, tag, response|embedding} per line.
class Cassette {
 public:
  Cassette() = default;

  /// Loads existing entries (record mode appends to the same file).
  /// Validates that all embedding entries share one dimension.
  static Cassette load(const std::filesystem::path& path, CassetteMode mode);
  /// An in-memory cassette, useful for record-then-replay tests.
  static Cassette in_memory(CassetteMode mode);

  CassetteMode mode() const { return mode_; }
  void set_mode(CassetteMode mode) { mode_ = mode; }

  std::optional<std::string> find_chat(const std::string& fp) const;
  std::optional<std::vector<double>> find_embedding(const std::string& fp) const;

  void put_chat(const std::string& fp, const std::string& tag, const std::string& response);
  void put_embedding(const std::string& fp, const std::string& tag,
                     const std::vector<double>& embedding);

  std::size_t size() const;

 private:
  CassetteMode mode_ = CassetteMode::replay;
  std::filesystem::path path_;  // empty for in-memory
  std::map<std::string, std::string> chat_;
  std::map<std::string, std::vector<double>> embeddings_;
  std::unique_ptr<std::mutex> write_mutex_ = std::make_unique<std::mutex>();
};

struct GatewayConfig {
  int max_in_flight = 4;
  int max_attempts = 3;
  int backoff_initial_ms = 200;
};

/// The single boundary for model calls. Every other module goes through
/// chat()/embed(), so a cassette makes the whole pipeline hermetic.
class Gateway {
 public:
  Gateway(std::shared_ptr<Cassette> cassette, std::shared_ptr<ChatTransport> transport,
          GatewayConfig config = {});
  ~Gateway();
  Gateway(Gateway&&) noexcept;
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;
  Gateway& operator=(Gateway&&) = delete;

  /// replay: recorded response, byte-identical; miss is an error naming the
  /// tag and fingerprint. record: transport response, persisted. live:
  /// transport response. Transport failures retry with exponential backoff.
  std::string chat(const ChatRequest& req);

  std::vector<double> embed(const std::string& text, const std::string& tag = "embed");

  const Cassette& cassette() const { return *cassette_; }

 private:
  std::string with_retries(const std::string& what, const std::function<std::string()>& fn);

  std::shared_ptr<Cassette> cassette_;
  std::shared_ptr<ChatTransport> transport_;
  GatewayConfig config_;
  class Slot;
  std::unique_ptr<Slot> slots_;
};

}  // namespace metaforge::llm
