#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "policylens/core/model.hpp"

namespace policylens::annotate {

struct DroppedItem {
  std::string item;    ///< compact JSON of the rejected element
  std::string reason;
};

struct ParsedAnnotations {
  AnnotationSet annotations;
  std::vector<DroppedItem> dropped;
};

/// Text of the first balanced JSON array in raw that parses, skipping prose
/// and code fences around it. Empty when there is none.
std::string extract_json_array(std::string_view raw);

/// Reads model output against passage_text. Items with an unknown requirement,
/// a non-string value, a non-boolean performed flag or a span that does not
/// validate are dropped with a reason. Throws Error(Unparseable) when raw holds
/// no JSON array.
ParsedAnnotations parse_llm_annotations(std::string_view raw, std::string_view passage_text);

}  // namespace policylens::annotate
