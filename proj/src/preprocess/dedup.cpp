#include "policylens/preprocess/dedup.hpp"

#include <map>

#include "policylens/core/error.hpp"
#include "policylens/preprocess/main_content.hpp"
#include "policylens/util/hash.hpp"
#include "policylens/util/text.hpp"

namespace policylens::preprocess {

std::string normalize_main_text(std::string_view text) {
  return std::string(text::trim(text::collapse_whitespace(text::to_lower_ascii(text))));
}

DedupResult dedup_corpus(const std::vector<RawDocument>& docs, std::size_t min_words) {
  DedupResult result;
  std::map<std::string, std::string> first_by_url;
  std::map<std::string, std::string> first_by_raw;
  std::map<std::string, std::string> first_by_main;

  for (const auto& doc : docs) {
    if (doc.url) {
      auto [it, fresh] = first_by_url.emplace(*doc.url, doc.doc_id);
      if (!fresh) {
        result.rejected.push_back({doc.doc_id, RejectionStage::Duplicate, "url duplicate of " + it->second});
        continue;
      }
    }
    auto [rit, rfresh] = first_by_raw.emplace(hash::sha256_hex(doc.bytes), doc.doc_id);
    if (!rfresh) {
      result.rejected.push_back({doc.doc_id, RejectionStage::Duplicate, "raw-bytes duplicate of " + rit->second});
      continue;
    }
    try {
      const auto main = isolate_main_content(doc.bytes, min_words);
      const std::string key = hash::sha256_hex(normalize_main_text(html::visible_text(main)));
      auto [mit, mfresh] = first_by_main.emplace(key, doc.doc_id);
      if (!mfresh) {
        result.rejected.push_back(
            {doc.doc_id, RejectionStage::Duplicate, "main-text duplicate of " + mit->second});
        continue;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InvalidDocument) throw;
    }
    result.unique.push_back(doc);
  }
  return result;
}

}  // namespace policylens::preprocess
