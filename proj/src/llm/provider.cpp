#include "policylens/llm/provider.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "policylens/core/error.hpp"
#include "policylens/util/hash.hpp"

namespace policylens::llm {

std::string request_hash(const ChatRequest& request) {
  nlohmann::ordered_json j;
  j["system"] = request.system_prompt;
  auto shots = nlohmann::ordered_json::array();
  for (const auto& s : request.few_shot) shots.push_back({s.input, s.output});
  j["few_shot"] = std::move(shots);
  j["user"] = request.user_content;
  j["format"] = request.response_format == ResponseFormat::JsonArray ? "json_array" : "free_text";
  if (request.temperature) j["temperature"] = *request.temperature;
  return hash::sha256_hex(j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace));
}

EmbeddingVector normalized(std::vector<double> v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& x : v) x /= norm;
  }
  return EmbeddingVector{std::move(v)};
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) {
    throw Error(ErrorCode::InvalidDocument, "embedding dimensions differ");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

}  // namespace policylens::llm
