#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace policylens::preprocess {

struct RawDocument {
  std::string doc_id;
  std::optional<std::string> url;
  std::string bytes;
  std::string fetched_at;  ///< ISO-8601, informational only
};

struct FilterConfig {
  std::string target_language = "en";
  std::size_t min_words = 50;
  std::size_t max_words = 50'000;
  std::vector<std::string> keyword_requirements;
  bool dedup_enabled = true;
  double min_language_confidence = 0.7;

  /// Throws ConfigError unless 0 < min_words < max_words.
  void validate() const;
};

enum class RejectionStage { MainContent, Language, Length, Duplicate, Detector, Keyword };

std::string_view to_string(RejectionStage stage) noexcept;
std::optional<RejectionStage> rejection_stage_from_string(std::string_view s) noexcept;

struct RejectionRecord {
  std::string doc_id;
  RejectionStage stage = RejectionStage::MainContent;
  std::string detail;

  friend bool operator==(const RejectionRecord&, const RejectionRecord&) = default;
};

/// One JSON object per line: {"doc_id":..., "stage":..., "detail":...}.
std::string to_json_line(const RejectionRecord& record);

}  // namespace policylens::preprocess
