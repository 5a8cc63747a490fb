#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <string>
#include <unordered_map>

#include "policylens/llm/provider.hpp"

namespace policylens::llm {

/// Connection settings for an OpenAI-compatible endpoint
/// (POST {endpoint}/chat/completions and {endpoint}/embeddings).
struct ProviderConfig {
  std::string endpoint;  ///< e.g. "https://api.openai.com/v1"
  std::string model;
  std::string embedding_model;
  std::string api_key;  ///< resolved credential; empty means no Authorization header
  std::chrono::seconds timeout{120};
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::size_t concurrency = 4;
};

/// Bounded counting semaphore for in-flight requests.
class ConcurrencyLimit {
 public:
  explicit ConcurrencyLimit(std::size_t slots) : free_(slots == 0 ? 1 : slots) {}

  void acquire();
  void release();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::size_t free_;
};

class OpenAiChatProvider : public ChatProvider {
 public:
  explicit OpenAiChatProvider(ProviderConfig config);

  std::string complete(const ChatRequest& request) override;
  [[nodiscard]] std::string describe() const override;

 private:
  ProviderConfig config_;
  ConcurrencyLimit limit_;
};

class OpenAiEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit OpenAiEmbeddingProvider(ProviderConfig config);

  EmbeddingVector embed(std::string_view text) override;
  [[nodiscard]] std::size_t dimension() const override;
  [[nodiscard]] std::string describe() const override;

 private:
  ProviderConfig config_;
  ConcurrencyLimit limit_;
  mutable std::mutex mu_;
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, EmbeddingVector> cache_;
};

/// Builds the chat-completions request body (system, alternating few-shot
/// user/assistant turns, final user turn).
std::string chat_request_body(const ChatRequest& request, const std::string& model);

/// Extracts the completion text; throws ResponseTooLong when finish_reason is
/// "length" and ProviderUnavailable for malformed bodies.
std::string parse_chat_response(const std::string& body);

}  // namespace policylens::llm
