#pragma once

#include <cstddef>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include "policylens/annotate/parse.hpp"
#include "policylens/annotate/prompt.hpp"
#include "policylens/core/model.hpp"
#include "policylens/llm/provider.hpp"

namespace policylens::annotate {

enum class Outcome { Ok, Repaired, Failed };

std::string_view to_string(Outcome outcome) noexcept;

struct AnnotationRunRecord {
  std::string policy_id;
  std::string passage_id;
  Layer layer = Layer::Annotation;
  std::string raw_reply;  ///< last reply received
  Outcome outcome = Outcome::Ok;
  std::string error;      ///< non-empty when outcome is Failed
  std::vector<DroppedItem> dropped;
};

/// One JSON object per record, no trailing newline.
std::string to_json_line(const AnnotationRunRecord& record);

struct LayerResult {
  AnnotatedPassage passage;
  AnnotationRunRecord record;
};

/// Annotation layer. An unreadable reply (or a truncated one) is retried once
/// with the repair instruction; a second failure yields an empty set and a
/// Failed record. ProviderUnavailable propagates.
LayerResult annotate_passage(const Passage& passage, llm::ChatProvider& llm);

/// Self-correction layer. The reply replaces the annotation set; after two
/// unreadable replies the input annotations are kept.
LayerResult self_correct(const AnnotatedPassage& annotated, llm::ChatProvider& llm);

/// Appends records as JSON lines under a lock.
class RunRecordSink {
 public:
  explicit RunRecordSink(std::ostream& out) : out_(out) {}
  void write(const AnnotationRunRecord& record);
  void write(const std::vector<AnnotationRunRecord>& records);

 private:
  std::mutex mu_;
  std::ostream& out_;
};

struct DocumentRun {
  PolicyDocument document;
  std::vector<AnnotationRunRecord> records;  ///< passage order, one per passage and layer
};

/// Runs the given layers over every passage of document, up to concurrency
/// passages at a time. For one passage the layers run in order. Results are
/// in passage order regardless of scheduling.
DocumentRun run_layers(const PolicyDocument& document, const std::vector<Layer>& layers, llm::ChatProvider& llm,
                       std::size_t concurrency = 4);

}  // namespace policylens::annotate
