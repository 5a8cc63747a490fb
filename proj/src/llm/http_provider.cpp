#include "policylens/llm/http_provider.hpp"

#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "policylens/core/error.hpp"

namespace policylens::llm {

namespace {

struct Endpoint {
  std::string origin;     // scheme://host[:port]
  std::string base_path;  // "/v1" or ""
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::ConfigError, "provider endpoint must include a scheme: '" + url + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = url.substr(0, path_start);
  e.base_path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!e.base_path.empty() && e.base_path.back() == '/') e.base_path.pop_back();
  return e;
}

class SlotGuard {
 public:
  explicit SlotGuard(ConcurrencyLimit& limit) : limit_(limit) { limit_.acquire(); }
  ~SlotGuard() { limit_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  ConcurrencyLimit& limit_;
};

// POSTs JSON with retries on transport errors, 429 and 5xx. Other statuses fail
// immediately.
std::string post_json(const ProviderConfig& config, const std::string& route,
                      const std::string& body) {
  const Endpoint ep = split_endpoint(config.endpoint);
  httplib::Headers headers;
  if (!config.api_key.empty()) headers.emplace("Authorization", "Bearer " + config.api_key);

  auto backoff = config.initial_backoff;
  std::string last_error;
  int made = 0;
  const int attempts = config.max_attempts < 1 ? 1 : config.max_attempts;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    made = attempt;
    httplib::Client client(ep.origin);
    client.set_connection_timeout(config.timeout);
    client.set_read_timeout(config.timeout);
    client.set_write_timeout(config.timeout);
    auto res = client.Post(ep.base_path + route, headers, body, "application/json");
    if (res) {
      if (res->status >= 200 && res->status < 300) return res->body;
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
      if (res->status != 429 && res->status < 500) break;
    } else {
      last_error = httplib::to_string(res.error());
    }
    if (attempt < attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw Error(ErrorCode::ProviderUnavailable,
              "request to " + config.endpoint + route + " failed after " + std::to_string(made) +
                  (made == 1 ? " attempt: " : " attempts: ") + last_error);
}

}  // namespace

void ConcurrencyLimit::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return free_ > 0; });
  --free_;
}

void ConcurrencyLimit::release() {
  {
    std::lock_guard lock(mu_);
    ++free_;
  }
  cv_.notify_one();
}

std::string chat_request_body(const ChatRequest& request, const std::string& model) {
  nlohmann::ordered_json body;
  body["model"] = model;
  auto messages = nlohmann::ordered_json::array();
  messages.push_back({{"role", "system"}, {"content", request.system_prompt}});
  for (const auto& shot : request.few_shot) {
    messages.push_back({{"role", "user"}, {"content", shot.input}});
    messages.push_back({{"role", "assistant"}, {"content", shot.output}});
  }
  messages.push_back({{"role", "user"}, {"content", request.user_content}});
  body["messages"] = std::move(messages);
  if (request.temperature) body["temperature"] = *request.temperature;
  return body.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

std::string parse_chat_response(const std::string& body) {
  const auto json = nlohmann::json::parse(body, nullptr, false);
  if (!json.is_object() || !json.contains("choices") || !json["choices"].is_array() ||
      json["choices"].empty()) {
    throw Error(ErrorCode::ProviderUnavailable, "malformed chat completion response");
  }
  const auto& choice = json["choices"][0];
  if (choice.value("finish_reason", std::string()) == "length") {
    throw Error(ErrorCode::ResponseTooLong, "completion truncated (finish_reason=length)");
  }
  if (!choice.contains("message") || !choice["message"].contains("content") ||
      !choice["message"]["content"].is_string()) {
    throw Error(ErrorCode::ProviderUnavailable, "chat completion without text content");
  }
  return choice["message"]["content"].get<std::string>();
}

OpenAiChatProvider::OpenAiChatProvider(ProviderConfig config)
    : config_(std::move(config)), limit_(config_.concurrency) {
  split_endpoint(config_.endpoint);
}

std::string OpenAiChatProvider::complete(const ChatRequest& request) {
  SlotGuard slot(limit_);
  return parse_chat_response(post_json(config_, "/chat/completions", chat_request_body(request, config_.model)));
}

std::string OpenAiChatProvider::describe() const {
  return "openai-compatible:" + config_.model + "@" + config_.endpoint;
}

OpenAiEmbeddingProvider::OpenAiEmbeddingProvider(ProviderConfig config)
    : config_(std::move(config)), limit_(config_.concurrency) {
  split_endpoint(config_.endpoint);
}

EmbeddingVector OpenAiEmbeddingProvider::embed(std::string_view text) {
  const std::string key(text);
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  nlohmann::json body{{"model", config_.embedding_model}, {"input", key}};
  std::string raw;
  {
    SlotGuard slot(limit_);
    raw = post_json(config_, "/embeddings", body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
  }
  const auto json = nlohmann::json::parse(raw, nullptr, false);
  if (!json.is_object() || !json.contains("data") || !json["data"].is_array() || json["data"].empty() ||
      !json["data"][0].contains("embedding")) {
    throw Error(ErrorCode::ProviderUnavailable, "malformed embedding response");
  }
  auto vec = normalized(json["data"][0]["embedding"].get<std::vector<double>>());
  std::lock_guard lock(mu_);
  if (dimension_ == 0) dimension_ = vec.dimension();
  if (vec.dimension() != dimension_) {
    throw Error(ErrorCode::ProviderUnavailable, "embedding dimension changed between calls");
  }
  return cache_.try_emplace(key, std::move(vec)).first->second;
}

std::size_t OpenAiEmbeddingProvider::dimension() const {
  std::lock_guard lock(mu_);
  return dimension_;
}

std::string OpenAiEmbeddingProvider::describe() const {
  return "openai-compatible:" + config_.embedding_model + "@" + config_.endpoint;
}

}  // namespace policylens::llm
