#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace policylens::llm {

enum class ResponseFormat { FreeText, JsonArray };

struct FewShotExample {
  std::string input;
  std::string output;

  friend bool operator==(const FewShotExample&, const FewShotExample&) = default;
};

struct ChatRequest {
  std::string system_prompt;
  std::vector<FewShotExample> few_shot;
  std::string user_content;
  ResponseFormat response_format = ResponseFormat::FreeText;
  std::optional<double> temperature;  ///< unset: provider default

  friend bool operator==(const ChatRequest&, const ChatRequest&) = default;
};

/// Stable SHA-256 over a canonical encoding of every request field.
std::string request_hash(const ChatRequest& request);

/// Chat-completion backend. Implementations must be safe to call concurrently.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;

  /// Raw completion text. Throws Error(ProviderUnavailable) on transport
  /// failure and Error(ResponseTooLong) when the reply was truncated.
  virtual std::string complete(const ChatRequest& request) = 0;

  /// Identifier recorded in run metadata.
  [[nodiscard]] virtual std::string describe() const = 0;
};

/// Unit-norm embedding vector.
struct EmbeddingVector {
  std::vector<double> values;

  [[nodiscard]] std::size_t dimension() const noexcept { return values.size(); }
};

/// Scales v to unit Euclidean norm; a zero vector is returned unchanged.
EmbeddingVector normalized(std::vector<double> v);

double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

/// Text-embedding backend. Implementations must be safe to call concurrently.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual EmbeddingVector embed(std::string_view text) = 0;

  [[nodiscard]] virtual std::size_t dimension() const = 0;
  [[nodiscard]] virtual std::string describe() const = 0;
};

}  // namespace policylens::llm
