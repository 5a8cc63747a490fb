#include "policylens/evaluate/metrics.hpp"

#include "policylens/core/error.hpp"
#include "policylens/evaluate/similarity.hpp"
#include "policylens/util/parallel.hpp"

namespace policylens::evaluate {

void EvalConfig::validate() const {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("eval.tau", "must be within [0, 1]");
  if (embedder == nullptr) throw ConfigError("eval.embedder", "an embedding provider is required");
}

EvalCounts match_annotations(const AnnotationSet& predicted, const AnnotationSet& ground_truth,
                             const EvalConfig& config) {
  config.validate();
  const auto& pred = predicted.items();
  const auto& gt = ground_truth.items();
  std::vector<bool> pred_hit(pred.size(), false);
  std::vector<bool> gt_hit(gt.size(), false);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = 0; j < gt.size(); ++j) {
      if (pred_hit[i] && gt_hit[j]) continue;
      if (pred[i].label != gt[j].label) continue;
      if (config.strict_performed && pred[i].performed != gt[j].performed) continue;
      if (exceeds_threshold(span_similarity(pred[i].span, gt[j].span, *config.embedder), config.tau)) {
        pred_hit[i] = true;
        gt_hit[j] = true;
      }
    }
  }
  EvalCounts out;
  for (std::size_t i = 0; i < pred.size(); ++i) (pred_hit[i] ? out.tp_o : out.fp).push_back(pred[i]);
  for (std::size_t j = 0; j < gt.size(); ++j) (gt_hit[j] ? out.tp_gt : out.fn).push_back(gt[j]);
  return out;
}

Scores finish_scores(std::size_t tp_o, std::size_t fp, std::size_t tp_gt, std::size_t fn) {
  Scores s;
  s.tp_o = tp_o;
  s.fp = fp;
  s.tp_gt = tp_gt;
  s.fn = fn;
  s.precision_degenerate = tp_o + fp == 0;
  s.recall_degenerate = tp_gt + fn == 0;
  s.precision = s.precision_degenerate ? 0.0 : static_cast<double>(tp_o) / static_cast<double>(tp_o + fp);
  s.recall = s.recall_degenerate ? 0.0 : static_cast<double>(tp_gt) / static_cast<double>(tp_gt + fn);
  s.f1 = (s.precision == 0.0 || s.recall == 0.0) ? 0.0 : 2.0 / (1.0 / s.precision + 1.0 / s.recall);
  return s;
}

namespace {

struct Tally {
  std::size_t tp_o = 0, fp = 0, tp_gt = 0, fn = 0;
};

MetricsReport finish(Level level, const Tally& total, const std::array<Tally, kRequirementCount>& per_label,
                     std::size_t passages) {
  MetricsReport r;
  r.level = level;
  r.passages = passages;
  r.overall = finish_scores(total.tp_o, total.fp, total.tp_gt, total.fn);
  for (std::size_t i = 0; i < kRequirementCount; ++i) {
    const auto& t = per_label[i];
    r.per_label[i] = finish_scores(t.tp_o, t.fp, t.tp_gt, t.fn);
  }
  return r;
}

}  // namespace

MetricsReport span_metrics(const std::vector<PassagePair>& pairs, const EvalConfig& config) {
  config.validate();
  std::vector<EvalCounts> counts(pairs.size());
  util::parallel_for(pairs.size(), config.concurrency, [&](std::size_t i) {
    counts[i] = match_annotations(pairs[i].first, pairs[i].second, config);
  });
  Tally total;
  std::array<Tally, kRequirementCount> per_label{};
  for (const auto& c : counts) {
    total.tp_o += c.tp_o.size();
    total.fp += c.fp.size();
    total.tp_gt += c.tp_gt.size();
    total.fn += c.fn.size();
    for (const auto& a : c.tp_o) ++per_label[index_of(a.label)].tp_o;
    for (const auto& a : c.fp) ++per_label[index_of(a.label)].fp;
    for (const auto& a : c.tp_gt) ++per_label[index_of(a.label)].tp_gt;
    for (const auto& a : c.fn) ++per_label[index_of(a.label)].fn;
  }
  MetricsReport r = finish(Level::Span, total, per_label, pairs.size());
  r.tau = config.tau;
  r.strict_performed = config.strict_performed;
  return r;
}

MetricsReport label_metrics(const std::vector<PassagePair>& pairs) {
  Tally total;
  std::array<Tally, kRequirementCount> per_label{};
  for (const auto& [pred, gt] : pairs) {
    const LabelVector p = labels_of(pred);
    const LabelVector g = labels_of(gt);
    for (std::size_t i = 0; i < kRequirementCount; ++i) {
      auto& t = per_label[i];
      if (p[i] && g[i]) {
        ++t.tp_o;
        ++t.tp_gt;
      } else if (p[i]) {
        ++t.fp;
      } else if (g[i]) {
        ++t.fn;
      }
    }
  }
  for (const auto& t : per_label) {
    total.tp_o += t.tp_o;
    total.tp_gt += t.tp_gt;
    total.fp += t.fp;
    total.fn += t.fn;
  }
  return finish(Level::Label, total, per_label, pairs.size());
}

std::vector<PassagePair> align(const PolicyDocument& predicted, const PolicyDocument& ground_truth) {
  if (predicted.passages.size() != ground_truth.passages.size()) {
    throw Error(ErrorCode::AlignmentMismatch,
                "policy '" + predicted.policy_id + "': " + std::to_string(predicted.passages.size()) +
                    " predicted passages vs " + std::to_string(ground_truth.passages.size()) + " ground truth");
  }
  std::vector<PassagePair> pairs;
  pairs.reserve(predicted.passages.size());
  for (std::size_t i = 0; i < predicted.passages.size(); ++i) {
    const auto& p = predicted.passages[i];
    const auto& g = ground_truth.passages[i];
    if (p.passage.text != g.passage.text) {
      throw Error(ErrorCode::AlignmentMismatch,
                  "policy '" + predicted.policy_id + "': passage " + std::to_string(i) + " text differs");
    }
    pairs.emplace_back(p.annotations, g.annotations);
  }
  return pairs;
}

}  // namespace policylens::evaluate
