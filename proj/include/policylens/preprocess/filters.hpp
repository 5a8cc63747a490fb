#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "policylens/preprocess/types.hpp"

namespace policylens::preprocess {

struct LanguageGuess {
  std::string code;  ///< ISO 639-1, or "und" when undetermined
  double confidence = 0.0;  ///< in [0, 1]
};

/// Pluggable language identification.
class LanguageIdentifier {
 public:
  virtual ~LanguageIdentifier() = default;
  virtual LanguageGuess identify(std::string_view text) const = 0;
};

/// Stopword-frequency identifier for en, de, fr, es, it, nl and pt. Confidence is
/// the winning language's share of all stopword hits.
class StopwordLanguageIdentifier : public LanguageIdentifier {
 public:
  LanguageGuess identify(std::string_view text) const override;
};

/// Length, language and keyword filters, checked in that order. Returns the
/// rejection (with empty doc_id) or nullopt when the text passes.
std::optional<RejectionRecord> apply_filters(std::string_view main_text, const FilterConfig& config,
                                             const LanguageIdentifier& language_id);

}  // namespace policylens::preprocess
