#include "policylens/preprocess/filters.hpp"

#include <array>
#include <set>
#include <string>

#include "policylens/util/text.hpp"

namespace policylens::preprocess {

namespace {

struct StopwordList {
  std::string_view code;
  std::set<std::string_view> words;
};

// Lists avoid words shared across languages ("de", "a", "in", "die", ...).
const std::array<StopwordList, 7>& stopwords() {
  static const std::array<StopwordList, 7> kLists{{
      {"en", {"the", "and", "of", "to", "you", "your", "we", "our", "is", "are", "with",
              "for", "that", "this", "which", "or", "be", "by", "have", "will", "not", "may"}},
      {"de", {"der", "und", "den", "das", "ist", "sie", "wir", "ihre", "nicht", "mit", "von",
              "zu", "auf", "für", "werden", "oder", "dem", "des", "eine", "einer", "uns", "wird"}},
      {"fr", {"le", "les", "et", "des", "vous", "nous", "est", "pour", "une", "dans", "du",
              "vos", "sur", "pas", "sont", "avec", "ou", "au", "leurs", "votre", "qui"}},
      {"es", {"el", "los", "las", "y", "del", "para", "que", "usted", "sus", "por", "con",
              "una", "es", "su", "lo", "al", "nuestros", "se", "como", "o"}},
      {"it", {"il", "gli", "della", "delle", "che", "per", "sono", "dei", "nel", "con", "una",
              "non", "alla", "questo", "vostri", "tuoi", "i", "ai", "essere"}},
      {"nl", {"het", "een", "van", "en", "wij", "uw", "niet", "voor", "zijn", "met", "worden",
              "deze", "op", "ons", "onze", "wordt", "aan", "bij", "ook"}},
      {"pt", {"os", "as", "não", "para", "com", "uma", "seus", "dos", "das", "você", "nós",
              "são", "pelo", "pela", "ao", "em", "nossos", "mais", "seu"}},
  }};
  return kLists;
}

}  // namespace

LanguageGuess StopwordLanguageIdentifier::identify(std::string_view text_in) const {
  const std::string lower = text::to_lower_ascii(text_in);
  const auto& lists = stopwords();
  std::array<std::size_t, 7> hits{};
  for (auto tok : text::split_whitespace(lower)) {
    while (!tok.empty() && std::ispunct(static_cast<unsigned char>(tok.front()))) tok.remove_prefix(1);
    while (!tok.empty() && std::ispunct(static_cast<unsigned char>(tok.back()))) tok.remove_suffix(1);
    if (tok.empty()) continue;
    for (std::size_t i = 0; i < lists.size(); ++i) {
      if (lists[i].words.count(tok) != 0) ++hits[i];
    }
  }
  std::size_t total = 0;
  std::size_t best = 0;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    total += hits[i];
    if (hits[i] > hits[best]) best = i;
  }
  if (total == 0) return {"und", 0.0};
  return {std::string(lists[best].code), static_cast<double>(hits[best]) / static_cast<double>(total)};
}

std::optional<RejectionRecord> apply_filters(std::string_view main_text, const FilterConfig& config,
                                             const LanguageIdentifier& language_id) {
  const std::size_t words = text::word_count(main_text);
  if (words < config.min_words || words > config.max_words) {
    return RejectionRecord{{}, RejectionStage::Length,
                           std::to_string(words) + " words outside [" + std::to_string(config.min_words) +
                               ", " + std::to_string(config.max_words) + "]"};
  }
  const LanguageGuess guess = language_id.identify(main_text);
  if (guess.code != config.target_language || guess.confidence < config.min_language_confidence) {
    return RejectionRecord{{}, RejectionStage::Language,
                           "identified '" + guess.code + "' with confidence " +
                               std::to_string(guess.confidence) + ", expected '" + config.target_language + "'"};
  }
  for (const auto& keyword : config.keyword_requirements) {
    if (!text::contains_ci(main_text, keyword)) {
      return RejectionRecord{{}, RejectionStage::Keyword, "required keyword '" + keyword + "' absent"};
    }
  }
  return std::nullopt;
}

}  // namespace policylens::preprocess
