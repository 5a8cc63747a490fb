#pragma once

// Deterministic offline providers used by tests and the CLI's --mock mode.

#include <atomic>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>

#include "policylens/llm/provider.hpp"

namespace policylens::llm {

/// Replies from a fixed {request_hash -> reply} table. Requests without an
/// entry go to the fallback, or fail with ProviderUnavailable when none is set.
class CannedChatProvider : public ChatProvider {
 public:
  using Fallback = std::function<std::string(const ChatRequest&)>;

  explicit CannedChatProvider(std::map<std::string, std::string> replies = {},
                              Fallback fallback = nullptr);

  void add(const ChatRequest& request, std::string reply);

  std::string complete(const ChatRequest& request) override;
  [[nodiscard]] std::string describe() const override { return "mock:canned"; }

  [[nodiscard]] std::size_t calls() const noexcept { return calls_.load(); }

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::string> replies_;
  Fallback fallback_;
  std::atomic<std::size_t> calls_{0};
};

/// Returns queued replies in order, regardless of the request. Throws
/// ProviderUnavailable once the queue is exhausted.
class SequenceChatProvider : public ChatProvider {
 public:
  explicit SequenceChatProvider(std::deque<std::string> replies);

  std::string complete(const ChatRequest& request) override;
  [[nodiscard]] std::string describe() const override { return "mock:sequence"; }

  [[nodiscard]] std::vector<ChatRequest> requests() const;

 private:
  mutable std::mutex mu_;
  std::deque<std::string> replies_;
  std::vector<ChatRequest> seen_;
};

/// Rule-based stand-in for a real model. Recognises the three request kinds
/// (policy detection, annotation, self-correction) from the user content and
/// answers them with a small phrase lexicon. Pure function of the request.
class HeuristicChatProvider : public ChatProvider {
 public:
  std::string complete(const ChatRequest& request) override;
  [[nodiscard]] std::string describe() const override { return "mock:heuristic"; }
};

/// Feature-hashing bag-of-words embedder: each lowercase alphanumeric token
/// increments bucket fnv1a64(token) % dimension, then the vector is normalized.
class HashingEmbedder : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(std::size_t dimension = 1024);

  EmbeddingVector embed(std::string_view text) override;
  [[nodiscard]] std::size_t dimension() const override { return dimension_; }
  [[nodiscard]] std::string describe() const override;

  /// Bucket a token lands in; exposed so tests can pick collision-free tokens.
  [[nodiscard]] std::size_t bucket(std::string_view token) const;

 private:
  std::size_t dimension_;
};

/// Exact-match embedder: every distinct text gets its own basis vector, so the
/// cosine is 1 for identical texts and 0 otherwise.
class OrthogonalEmbedder : public EmbeddingProvider {
 public:
  explicit OrthogonalEmbedder(std::size_t capacity = 4096);

  EmbeddingVector embed(std::string_view text) override;
  [[nodiscard]] std::size_t dimension() const override { return capacity_; }
  [[nodiscard]] std::string describe() const override { return "mock:orthogonal"; }

 private:
  std::size_t capacity_;
  std::mutex mu_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Embedder backed by an explicit text -> vector table.
class TableEmbedder : public EmbeddingProvider {
 public:
  explicit TableEmbedder(std::map<std::string, std::vector<double>> table);

  EmbeddingVector embed(std::string_view text) override;
  [[nodiscard]] std::size_t dimension() const override { return dimension_; }
  [[nodiscard]] std::string describe() const override { return "mock:table"; }

 private:
  std::map<std::string, EmbeddingVector, std::less<>> table_;
  std::size_t dimension_ = 0;
};

/// Memoizing wrapper; identical input yields the identical vector within a session.
class CachingEmbedder : public EmbeddingProvider {
 public:
  explicit CachingEmbedder(EmbeddingProvider& inner) : inner_(inner) {}

  EmbeddingVector embed(std::string_view text) override;
  [[nodiscard]] std::size_t dimension() const override { return inner_.dimension(); }
  [[nodiscard]] std::string describe() const override { return inner_.describe(); }

 private:
  EmbeddingProvider& inner_;
  std::mutex mu_;
  std::unordered_map<std::string, EmbeddingVector> cache_;
};

}  // namespace policylens::llm
