#include "policylens/cli/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "policylens/core/error.hpp"
#include "policylens/llm/http_provider.hpp"
#include "policylens/llm/mock.hpp"

namespace policylens::cli {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_object(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (allowed.count(key) == 0) throw ConfigError(join(path, key), "unknown key");
  }
}

template <typename T>
void read(const json& j, const std::string& path, const char* key, T& out) {
  if (!j.contains(key)) return;
  const json& v = j[key];
  const std::string at = join(path, key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError(at, "expected a boolean");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw ConfigError(at, "expected an integer");
    if (std::is_unsigned_v<T> && v.get<long long>() < 0) throw ConfigError(at, "must not be negative");
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw ConfigError(at, "expected a number");
  } else {
    if (!v.is_string()) throw ConfigError(at, "expected a string");
  }
  out = v.get<T>();
}

std::optional<std::filesystem::path> read_path(const json& j, const std::string& path, const char* key,
                                               const std::filesystem::path& base) {
  std::string raw;
  read(j, path, key, raw);
  if (raw.empty()) return std::nullopt;
  std::filesystem::path p(raw);
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::string env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  return v == nullptr ? std::string() : std::string(v);
}

llm::ProviderConfig http_config(const ProviderSettings& s) {
  llm::ProviderConfig c;
  c.endpoint = s.endpoint;
  c.model = s.model;
  c.embedding_model = s.embedding_model;
  c.timeout = std::chrono::seconds(s.timeout_s);
  c.max_attempts = s.max_attempts;
  c.concurrency = s.concurrency;
  if (!s.api_key_env.empty()) {
    c.api_key = env(s.api_key_env);
    if (c.api_key.empty()) {
      throw ConfigError("provider.api_key_env", "environment variable " + s.api_key_env + " is not set");
    }
  }
  return c;
}

}  // namespace

void Config::validate() const {
  if (provider.kind != "openai" && provider.kind != "mock") {
    throw ConfigError("provider.kind", "expected \"openai\" or \"mock\", got \"" + provider.kind + "\"");
  }
  if (provider.kind == "openai" && provider.endpoint.find("://") == std::string::npos) {
    throw ConfigError("provider.endpoint", "must include a scheme");
  }
  if (provider.timeout_s < 1) throw ConfigError("provider.timeout_s", "must be at least 1");
  if (provider.max_attempts < 1) throw ConfigError("provider.max_attempts", "must be at least 1");
  if (provider.concurrency < 1) throw ConfigError("provider.concurrency", "must be at least 1");
  if (concurrency < 1) throw ConfigError("concurrency", "must be at least 1");
  filter.validate();
  if (!(eval.tau >= 0.0 && eval.tau <= 1.0)) throw ConfigError("eval.tau", "must be in [0, 1]");
  sampler.validate();
  if (review.port < 0 || review.port > 65535) throw ConfigError("review.port", "out of range");
  if (review.lease_minutes < 1) throw ConfigError("review.lease_minutes", "must be at least 1");
}

Config parse_config(const json& j, const std::filesystem::path& base) {
  Config c;
  check_object(j, "", {"provider", "filter", "eval", "sampler", "review", "concurrency"});
  read(j, "", "concurrency", c.concurrency);

  if (j.contains("provider")) {
    const json& p = j["provider"];
    check_object(p, "provider",
                 {"kind", "endpoint", "model", "embedding_model", "api_key_env", "timeout_s", "max_attempts",
                  "concurrency"});
    read(p, "provider", "kind", c.provider.kind);
    read(p, "provider", "endpoint", c.provider.endpoint);
    read(p, "provider", "model", c.provider.model);
    read(p, "provider", "embedding_model", c.provider.embedding_model);
    read(p, "provider", "api_key_env", c.provider.api_key_env);
    read(p, "provider", "timeout_s", c.provider.timeout_s);
    read(p, "provider", "max_attempts", c.provider.max_attempts);
    read(p, "provider", "concurrency", c.provider.concurrency);
  }
  if (j.contains("filter")) {
    const json& f = j["filter"];
    check_object(f, "filter",
                 {"target_language", "min_words", "max_words", "keywords", "dedup", "min_language_confidence"});
    read(f, "filter", "target_language", c.filter.target_language);
    read(f, "filter", "min_words", c.filter.min_words);
    read(f, "filter", "max_words", c.filter.max_words);
    read(f, "filter", "dedup", c.filter.dedup_enabled);
    read(f, "filter", "min_language_confidence", c.filter.min_language_confidence);
    if (f.contains("keywords")) {
      const json& k = f["keywords"];
      if (!k.is_array()) throw ConfigError("filter.keywords", "expected an array of strings");
      for (std::size_t i = 0; i < k.size(); ++i) {
        if (!k[i].is_string()) throw ConfigError("filter.keywords[" + std::to_string(i) + "]", "expected a string");
        c.filter.keyword_requirements.push_back(k[i].get<std::string>());
      }
    }
  }
  if (j.contains("eval")) {
    const json& e = j["eval"];
    check_object(e, "eval", {"tau", "strict_performed"});
    read(e, "eval", "tau", c.eval.tau);
    read(e, "eval", "strict_performed", c.eval.strict_performed);
  }
  if (j.contains("sampler")) {
    const json& s = j["sampler"];
    check_object(s, "sampler", {"k", "k_min", "k_max", "sample_size", "seed", "bins"});
    if (s.contains("k")) {
      if (s["k"].is_string() && s["k"] == "auto") {
        c.sampler.k.reset();
      } else if (s["k"].is_number_integer() && s["k"].get<long long>() >= 1) {
        c.sampler.k = s["k"].get<std::size_t>();
      } else {
        throw ConfigError("sampler.k", "expected a positive integer or \"auto\"");
      }
    }
    read(s, "sampler", "k_min", c.sampler.k_min);
    read(s, "sampler", "k_max", c.sampler.k_max);
    read(s, "sampler", "sample_size", c.sampler.sample_size);
    read(s, "sampler", "seed", c.sampler.seed);
    read(s, "sampler", "bins", c.sampler.bins);
  }
  if (j.contains("review")) {
    const json& r = j["review"];
    check_object(r, "review", {"event_log", "host", "port", "static_dir", "reviewers", "lease_minutes"});
    c.review.event_log = read_path(r, "review", "event_log", base);
    c.review.static_dir = read_path(r, "review", "static_dir", base);
    read(r, "review", "host", c.review.host);
    read(r, "review", "port", c.review.port);
    read(r, "review", "lease_minutes", c.review.lease_minutes);
    if (r.contains("reviewers")) {
      const json& list = r["reviewers"];
      if (!list.is_array()) throw ConfigError("review.reviewers", "expected an array");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string at = "review.reviewers[" + std::to_string(i) + "]";
        check_object(list[i], at, {"id", "role", "token", "token_env"});
        ReviewerSettings rs;
        read(list[i], at, "id", rs.id);
        if (rs.id.empty()) throw ConfigError(at + ".id", "required");
        std::string role = "reviewer";
        read(list[i], at, "role", role);
        auto parsed = review::role_from_string(role);
        if (!parsed) throw ConfigError(at + ".role", "expected \"reviewer\" or \"jury\"");
        rs.role = *parsed;
        read(list[i], at, "token", rs.token);
        read(list[i], at, "token_env", rs.token_env);
        c.review.reviewers.push_back(std::move(rs));
      }
    }
  }
  c.sampler.concurrency = c.concurrency;
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read " + path.string());
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("--config", path.string() + " is not valid JSON");
  return parse_config(j, path.parent_path());
}

nlohmann::ordered_json config_snapshot(const Config& c) {
  nlohmann::ordered_json j;
  j["provider"] = {{"kind", c.provider.kind},
                   {"endpoint", c.provider.endpoint},
                   {"model", c.provider.model},
                   {"embedding_model", c.provider.embedding_model},
                   {"api_key_env", c.provider.api_key_env},
                   {"timeout_s", c.provider.timeout_s},
                   {"max_attempts", c.provider.max_attempts},
                   {"concurrency", c.provider.concurrency}};
  j["filter"] = {{"target_language", c.filter.target_language},
                 {"min_words", c.filter.min_words},
                 {"max_words", c.filter.max_words},
                 {"keywords", c.filter.keyword_requirements},
                 {"dedup", c.filter.dedup_enabled},
                 {"min_language_confidence", c.filter.min_language_confidence}};
  j["eval"] = {{"tau", c.eval.tau}, {"strict_performed", c.eval.strict_performed}};
  j["sampler"] = {{"k", c.sampler.k ? nlohmann::ordered_json(*c.sampler.k) : nlohmann::ordered_json("auto")},
                  {"k_min", c.sampler.k_min},
                  {"k_max", c.sampler.k_max},
                  {"sample_size", c.sampler.sample_size},
                  {"seed", c.sampler.seed},
                  {"bins", c.sampler.bins}};
  auto reviewers = nlohmann::ordered_json::array();
  for (const auto& r : c.review.reviewers) {
    reviewers.push_back({{"id", r.id}, {"role", review::to_string(r.role)}, {"token_env", r.token_env}});
  }
  j["review"] = {{"event_log", c.review.event_log ? c.review.event_log->string() : ""},
                 {"host", c.review.host},
                 {"port", c.review.port},
                 {"lease_minutes", c.review.lease_minutes},
                 {"reviewers", std::move(reviewers)}};
  j["concurrency"] = c.concurrency;
  return j;
}

std::unique_ptr<llm::ChatProvider> make_chat_provider(const ProviderSettings& s) {
  if (s.kind == "mock") return std::make_unique<llm::HeuristicChatProvider>();
  return std::make_unique<llm::OpenAiChatProvider>(http_config(s));
}

std::unique_ptr<llm::EmbeddingProvider> make_embedding_provider(const ProviderSettings& s) {
  if (s.kind == "mock") return std::make_unique<llm::HashingEmbedder>(1024);
  return std::make_unique<llm::OpenAiEmbeddingProvider>(http_config(s));
}

std::vector<review::Reviewer> resolve_reviewers(const ReviewSettings& settings) {
  if (settings.reviewers.empty()) throw ConfigError("review.reviewers", "at least one reviewer is required");
  std::vector<review::Reviewer> out;
  for (std::size_t i = 0; i < settings.reviewers.size(); ++i) {
    const auto& r = settings.reviewers[i];
    std::string token = r.token;
    if (!r.token_env.empty()) {
      token = env(r.token_env);
      if (token.empty()) {
        throw ConfigError("review.reviewers[" + std::to_string(i) + "].token_env",
                          "environment variable " + r.token_env + " is not set");
      }
    }
    out.push_back({r.id, r.role, token});
  }
  return out;
}

}  // namespace policylens::cli
