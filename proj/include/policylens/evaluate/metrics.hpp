#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "policylens/core/labels.hpp"
#include "policylens/core/model.hpp"
#include "policylens/llm/provider.hpp"

namespace policylens::evaluate {

struct EvalConfig {
  double tau = 0.5;
  /// Also require equal performed flags for a match.
  bool strict_performed = false;
  llm::EmbeddingProvider* embedder = nullptr;
  std::size_t concurrency = 4;

  /// Throws ConfigError unless tau is in [0, 1] and an embedder is set.
  void validate() const;
};

struct EvalCounts {
  std::vector<Annotation> tp_o;   ///< predictions with a matching ground truth
  std::vector<Annotation> tp_gt;  ///< ground truths with a matching prediction
  std::vector<Annotation> fp;
  std::vector<Annotation> fn;
};

/// Existential matching: a prediction is a true positive when some ground
/// truth with the same label has span similarity strictly above tau, and vice
/// versa. No one-to-one assignment.
EvalCounts match_annotations(const AnnotationSet& predicted, const AnnotationSet& ground_truth,
                             const EvalConfig& config);

struct Scores {
  std::size_t tp_o = 0;
  std::size_t fp = 0;
  std::size_t tp_gt = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_degenerate = false;  ///< tp_o + fp == 0
  bool recall_degenerate = false;     ///< tp_gt + fn == 0

  [[nodiscard]] std::size_t support() const noexcept { return tp_gt + fn; }
};

/// Fills precision/recall/f1 and the degenerate flags from the counts.
Scores finish_scores(std::size_t tp_o, std::size_t fp, std::size_t tp_gt, std::size_t fn);

enum class Level { Label, Span };

struct MetricsReport {
  Level level = Level::Span;
  std::string layer;  ///< e.g. "annotation", "self_correction"
  double tau = 0.5;
  bool strict_performed = false;
  std::size_t passages = 0;
  Scores overall;
  std::array<Scores, kRequirementCount> per_label{};
};

/// (predicted, ground truth) for one passage.
using PassagePair = std::pair<AnnotationSet, AnnotationSet>;

/// Corpus-level micro aggregation of match_annotations over every pair.
MetricsReport span_metrics(const std::vector<PassagePair>& pairs, const EvalConfig& config);

/// Multi-label micro metrics over (passage, label) cells of labels_of.
MetricsReport label_metrics(const std::vector<PassagePair>& pairs);

/// Pairs passages of a prediction and a ground-truth document by position.
/// Throws Error(AlignmentMismatch) when passage counts or texts differ.
std::vector<PassagePair> align(const PolicyDocument& predicted, const PolicyDocument& ground_truth);

}  // namespace policylens::evaluate
