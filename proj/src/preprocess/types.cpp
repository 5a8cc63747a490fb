#include "policylens/preprocess/types.hpp"

#include <array>

#include <nlohmann/json.hpp>

#include "policylens/core/error.hpp"

namespace policylens::preprocess {

namespace {
constexpr std::array<std::string_view, 6> kStages{"main_content", "language", "length",
                                                  "duplicate",    "detector", "keyword"};
}

void FilterConfig::validate() const {
  if (min_words == 0) throw ConfigError("filter.min_words", "must be positive");
  if (min_words >= max_words) throw ConfigError("filter.max_words", "must exceed min_words");
  if (min_language_confidence < 0.0 || min_language_confidence > 1.0) {
    throw ConfigError("filter.min_language_confidence", "must lie in [0, 1]");
  }
}

std::string_view to_string(RejectionStage stage) noexcept {
  return kStages[static_cast<std::size_t>(stage)];
}

std::optional<RejectionStage> rejection_stage_from_string(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kStages.size(); ++i) {
    if (kStages[i] == s) return static_cast<RejectionStage>(i);
  }
  return std::nullopt;
}

std::string to_json_line(const RejectionRecord& record) {
  nlohmann::ordered_json j;
  j["doc_id"] = record.doc_id;
  j["stage"] = std::string(to_string(record.stage));
  j["detail"] = record.detail;
  return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

}  // namespace policylens::preprocess
