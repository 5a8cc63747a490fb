#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "policylens/evaluate/metrics.hpp"
#include "policylens/llm/provider.hpp"
#include "policylens/preprocess/types.hpp"
#include "policylens/review/service.hpp"
#include "policylens/sampler/sampler.hpp"

namespace policylens::cli {

struct ProviderSettings {
  std::string kind = "openai";  ///< "openai" or "mock"
  std::string endpoint = "https://api.openai.com/v1";
  std::string model = "gpt-4o";
  std::string embedding_model = "text-embedding-3-small";
  std::string api_key_env = "OPENAI_API_KEY";  ///< empty: send no key
  int timeout_s = 120;
  int max_attempts = 3;
  std::size_t concurrency = 4;
};

struct ReviewerSettings {
  std::string id;
  review::Role role = review::Role::Reviewer;
  std::string token;      ///< literal token, or
  std::string token_env;  ///< environment variable holding it
};

struct ReviewSettings {
  std::optional<std::filesystem::path> event_log;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> static_dir;
  std::vector<ReviewerSettings> reviewers;
  int lease_minutes = 30;
};

struct EvalSettings {
  double tau = 0.5;
  bool strict_performed = false;
};

struct Config {
  ProviderSettings provider;
  preprocess::FilterConfig filter;
  EvalSettings eval;
  sampler::SamplerConfig sampler;
  ReviewSettings review;
  std::size_t concurrency = 4;

  /// Throws ConfigError with the offending key path.
  void validate() const;
};

/// Parses the JSON config. Unknown keys and mistyped values raise ConfigError
/// with a dotted path; relative paths are resolved against base_dir.
Config parse_config(const nlohmann::json& json, const std::filesystem::path& base_dir = {});
Config load_config(const std::filesystem::path& path);

/// Effective configuration without secrets (token values are redacted).
nlohmann::ordered_json config_snapshot(const Config& config);

/// Chat provider for the configured kind. Throws ConfigError when credentials
/// are missing.
std::unique_ptr<llm::ChatProvider> make_chat_provider(const ProviderSettings& settings);
std::unique_ptr<llm::EmbeddingProvider> make_embedding_provider(const ProviderSettings& settings);

/// Reviewers with tokens resolved from the environment.
std::vector<review::Reviewer> resolve_reviewers(const ReviewSettings& settings);

}  // namespace policylens::cli
