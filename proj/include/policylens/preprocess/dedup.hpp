#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "policylens/preprocess/types.hpp"

namespace policylens::preprocess {

/// Lowercase + whitespace-collapsed + trimmed form used for main-text equality.
std::string normalize_main_text(std::string_view text);

struct DedupResult {
  std::vector<RawDocument> unique;
  std::vector<RejectionRecord> rejected;
};

/// Three-stage dedup in input order: url, raw-byte hash, normalized main-text
/// hash. Documents whose main content cannot be isolated pass stage 3
/// untouched (the pipeline rejects them later).
DedupResult dedup_corpus(const std::vector<RawDocument>& docs, std::size_t min_words = 50);

}  // namespace policylens::preprocess
