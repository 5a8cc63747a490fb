#pragma once

// Wire format for annotated policies: a JSON array of passage objects with
// the fields type, context[{text, type}], passage and
// annotations[{requirement, value, performed}].

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "policylens/core/model.hpp"

namespace policylens::schema {

using Json = nlohmann::ordered_json;

/// Serializes one passage object; annotations are omitted when
/// include_annotations is false.
Json passage_to_json(const AnnotatedPassage& passage, bool include_annotations = true);

Json annotations_to_json(const AnnotationSet& annotations);

Json document_to_json(const PolicyDocument& document);

/// UTF-8, 2-space indentation, keys in schema order, trailing newline.
std::string serialize_policy(const PolicyDocument& document);

std::string dump(const Json& json);

/// Strict parse: unknown fields, missing required fields, out-of-set enum
/// values, unknown requirement labels, blank texts and annotation spans absent
/// from their passage all raise SchemaViolation with a field path.
PolicyDocument parse_policy(std::string_view bytes, std::string policy_id = {});

PolicyDocument policy_from_json(const Json& json, std::string policy_id = {});

/// Parses a single passage object at `path` (e.g. "items[3]"). When
/// require_annotations is false a missing annotations field means empty.
AnnotatedPassage passage_from_json(const Json& json, const std::string& path,
                                   bool require_annotations = true);

/// Parses an annotations array and validates every span against passage_text.
AnnotationSet annotations_from_json(const Json& json, const std::string& path,
                                    std::string_view passage_text);

}  // namespace policylens::schema
