#include "policylens/core/model.hpp"

#include <algorithm>
#include <cstdio>

#include "policylens/core/error.hpp"
#include "policylens/util/text.hpp"

namespace policylens {

AnnotationSet::AnnotationSet(std::initializer_list<Annotation> items) {
  for (const auto& a : items) insert(a);
}

AnnotationSet::AnnotationSet(const std::vector<Annotation>& items) {
  for (const auto& a : items) insert(a);
}

bool AnnotationSet::insert(Annotation a) {
  if (contains(a)) return false;
  items_.push_back(std::move(a));
  return true;
}

bool AnnotationSet::erase(const Annotation& a) {
  auto it = std::find(items_.begin(), items_.end(), a);
  if (it == items_.end()) return false;
  items_.erase(it);
  return true;
}

bool AnnotationSet::contains(const Annotation& a) const {
  return std::find(items_.begin(), items_.end(), a) != items_.end();
}

std::vector<Annotation> AnnotationSet::sorted() const {
  auto out = items_;
  std::sort(out.begin(), out.end());
  return out;
}

bool operator==(const AnnotationSet& a, const AnnotationSet& b) {
  return a.size() == b.size() && a.sorted() == b.sorted();
}

std::vector<std::string_view> span_segments(std::string_view span) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t hit = span.find(kDiscontinuity, pos);
    if (hit == std::string_view::npos) {
      out.push_back(text::trim(span.substr(pos)));
      break;
    }
    out.push_back(text::trim(span.substr(pos, hit - pos)));
    pos = hit + kDiscontinuity.size();
  }
  return out;
}

std::vector<CharRange> validate_annotation(const Annotation& annotation,
                                           std::string_view passage_text) {
  if (text::trim(annotation.span).empty()) {
    throw Error(ErrorCode::InvalidAnnotation, "annotation span is empty");
  }
  std::vector<CharRange> ranges;
  std::size_t cursor = 0;
  for (const auto segment : span_segments(annotation.span)) {
    if (segment.empty()) {
      throw Error(ErrorCode::InvalidAnnotation,
                  "empty segment around \"[...]\" in span '" + annotation.span + "'");
    }
    const std::size_t hit = passage_text.find(segment, cursor);
    if (hit == std::string_view::npos) {
      throw Error(ErrorCode::SpanNotFound, "segment '" + std::string(segment) +
                                               "' not found in passage text");
    }
    ranges.push_back({hit, hit + segment.size()});
    cursor = hit + segment.size();
  }
  return ranges;
}

std::optional<std::string> annotation_problem(const Annotation& annotation,
                                              std::string_view passage_text) {
  try {
    validate_annotation(annotation, passage_text);
    return std::nullopt;
  } catch (const Error& e) {
    return std::string(to_string(e.code())) + ": " + e.what();
  }
}

LabelVector labels_of(const AnnotationSet& annotations) {
  LabelVector v;
  for (const auto& a : annotations) v.set(index_of(a.label));
  return v;
}

LabelVector labels_of(const AnnotatedPassage& annotated) {
  return labels_of(annotated.annotations);
}

std::string passage_id_for(std::size_t index) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "p%04zu", index);
  return buf;
}

}  // namespace policylens
