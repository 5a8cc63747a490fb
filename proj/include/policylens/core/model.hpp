#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "policylens/core/labels.hpp"

namespace policylens {

/// Placeholder that stands in for an irrelevant clause inside an annotated span.
inline constexpr std::string_view kDiscontinuity = "[...]";

struct ContextElement {
  std::string text;
  ContextTag tag = ContextTag::Div;

  friend bool operator==(const ContextElement&, const ContextElement&) = default;
};

/// A self-contained unit of policy text: element type, context, and text.
struct Passage {
  std::string id;
  ElementType type = ElementType::Text;
  std::vector<ContextElement> context;
  std::string text;

  friend bool operator==(const Passage&, const Passage&) = default;
};

/// A labelled span. `performed` is false when the span states the absence of
/// the disclosed information ("we do not collect ...").
struct Annotation {
  std::string span;
  Requirement label = Requirement::DataCategories;
  bool performed = true;

  friend bool operator==(const Annotation&, const Annotation&) = default;
  friend auto operator<=>(const Annotation&, const Annotation&) = default;
};

/// Set of annotations that remembers first-insertion order. Duplicates
/// (equal span, label and performed) collapse to one; equality is set equality.
class AnnotationSet {
 public:
  using const_iterator = std::vector<Annotation>::const_iterator;

  AnnotationSet() = default;
  AnnotationSet(std::initializer_list<Annotation> items);
  explicit AnnotationSet(const std::vector<Annotation>& items);

  /// Returns false when an equal annotation was already present.
  bool insert(Annotation a);
  bool erase(const Annotation& a);
  [[nodiscard]] bool contains(const Annotation& a) const;

  [[nodiscard]] std::size_t size() const noexcept { return items_.size(); }
  [[nodiscard]] bool empty() const noexcept { return items_.empty(); }
  [[nodiscard]] const_iterator begin() const noexcept { return items_.begin(); }
  [[nodiscard]] const_iterator end() const noexcept { return items_.end(); }
  [[nodiscard]] const std::vector<Annotation>& items() const noexcept { return items_; }

  /// Items in canonical (sorted) order; use for order-independent comparison.
  [[nodiscard]] std::vector<Annotation> sorted() const;

  friend bool operator==(const AnnotationSet& a, const AnnotationSet& b);

 private:
  std::vector<Annotation> items_;
};

struct AnnotatedPassage {
  Passage passage;
  AnnotationSet annotations;

  friend bool operator==(const AnnotatedPassage&, const AnnotatedPassage&) = default;
};

struct PolicyDocument {
  std::string policy_id;
  std::optional<std::string> source_url;
  std::vector<AnnotatedPassage> passages;
};

/// Half-open byte range [begin, end) into a passage text.
struct CharRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const CharRange&, const CharRange&) = default;
};

/// Splits a span at every "[...]" placeholder; segments are whitespace-trimmed.
std::vector<std::string_view> span_segments(std::string_view span);

/// Locates every segment of the annotation span in passage_text: exact
/// substring match, each segment at its leftmost occurrence after the previous
/// segment's end. Throws Error(SpanNotFound) when a segment cannot be placed and
/// Error(InvalidAnnotation) for an empty span or empty segment.
std::vector<CharRange> validate_annotation(const Annotation& annotation,
                                           std::string_view passage_text);

/// Non-throwing variant; returns the failure reason or nullopt when valid.
std::optional<std::string> annotation_problem(const Annotation& annotation,
                                              std::string_view passage_text);

/// Bit i is set iff some annotation carries requirement i.
LabelVector labels_of(const AnnotationSet& annotations);
LabelVector labels_of(const AnnotatedPassage& annotated);

/// Default passage id for the passage at position index within its document.
std::string passage_id_for(std::size_t index);

}  // namespace policylens
