#include "policylens/annotate/pipeline.hpp"

#include <optional>

#include <nlohmann/json.hpp>

#include "policylens/core/error.hpp"
#include "policylens/util/parallel.hpp"

namespace policylens::annotate {

namespace {

struct Attempt {
  std::string raw;
  std::optional<ParsedAnnotations> parsed;
  std::string error;
};

Attempt try_once(const llm::ChatRequest& req, std::string_view passage_text, llm::ChatProvider& llm) {
  Attempt a;
  try {
    a.raw = llm.complete(req);
    a.parsed = parse_llm_annotations(a.raw, passage_text);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Unparseable && e.code() != ErrorCode::ResponseTooLong) throw;
    a.error = std::string(to_string(e.code())) + ": " + e.what();
  }
  return a;
}

// Shared by both layers: first attempt, then one repair attempt.
std::optional<ParsedAnnotations> run_with_repair(llm::ChatRequest req, std::string_view passage_text,
                                                 llm::ChatProvider& llm, AnnotationRunRecord& record) {
  Attempt first = try_once(req, passage_text, llm);
  if (first.parsed) {
    record.raw_reply = std::move(first.raw);
    record.outcome = Outcome::Ok;
    record.dropped = first.parsed->dropped;
    return first.parsed;
  }
  req.system_prompt += "\n\n";
  req.system_prompt += repair_instruction();
  Attempt second = try_once(req, passage_text, llm);
  record.raw_reply = std::move(second.raw);
  if (second.parsed) {
    record.outcome = Outcome::Repaired;
    record.dropped = second.parsed->dropped;
    return second.parsed;
  }
  record.outcome = Outcome::Failed;
  record.error = second.error.empty() ? first.error : second.error;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Outcome outcome) noexcept {
  switch (outcome) {
    case Outcome::Ok: return "ok";
    case Outcome::Repaired: return "repaired";
    case Outcome::Failed: return "failed";
  }
  return "failed";
}

std::string to_json_line(const AnnotationRunRecord& r) {
  nlohmann::ordered_json j;
  j["policy_id"] = r.policy_id;
  j["passage_id"] = r.passage_id;
  j["layer"] = to_string(r.layer);
  j["outcome"] = to_string(r.outcome);
  if (!r.error.empty()) j["error"] = r.error;
  auto dropped = nlohmann::ordered_json::array();
  for (const auto& d : r.dropped) dropped.push_back({{"item", d.item}, {"reason", d.reason}});
  j["dropped"] = std::move(dropped);
  j["raw_reply"] = r.raw_reply;
  return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

LayerResult annotate_passage(const Passage& passage, llm::ChatProvider& llm) {
  LayerResult out{AnnotatedPassage{passage, {}}, {}};
  out.record.passage_id = passage.id;
  out.record.layer = Layer::Annotation;
  if (auto parsed = run_with_repair(build_prompt(Layer::Annotation, passage), passage.text, llm, out.record)) {
    out.passage.annotations = std::move(parsed->annotations);
  }
  return out;
}

LayerResult self_correct(const AnnotatedPassage& annotated, llm::ChatProvider& llm) {
  LayerResult out{annotated, {}};
  out.record.passage_id = annotated.passage.id;
  out.record.layer = Layer::SelfCorrection;
  if (auto parsed = run_with_repair(build_prompt(Layer::SelfCorrection, annotated), annotated.passage.text, llm,
                                    out.record)) {
    out.passage.annotations = std::move(parsed->annotations);
  }
  return out;
}

void RunRecordSink::write(const AnnotationRunRecord& record) {
  std::lock_guard lock(mu_);
  out_ << to_json_line(record) << '\n';
}

void RunRecordSink::write(const std::vector<AnnotationRunRecord>& records) {
  std::lock_guard lock(mu_);
  for (const auto& r : records) out_ << to_json_line(r) << '\n';
}

DocumentRun run_layers(const PolicyDocument& document, const std::vector<Layer>& layers, llm::ChatProvider& llm,
                       std::size_t concurrency) {
  const std::size_t n = document.passages.size();
  std::vector<AnnotatedPassage> passages(document.passages);
  std::vector<std::vector<AnnotationRunRecord>> records(n);
  util::parallel_for(n, concurrency, [&](std::size_t i) {
    for (Layer layer : layers) {
      LayerResult r = layer == Layer::Annotation ? annotate_passage(passages[i].passage, llm)
                                                 : self_correct(passages[i], llm);
      r.record.policy_id = document.policy_id;
      passages[i] = std::move(r.passage);
      records[i].push_back(std::move(r.record));
    }
  });

  DocumentRun out;
  out.document.policy_id = document.policy_id;
  out.document.source_url = document.source_url;
  out.document.passages = std::move(passages);
  for (auto& rs : records) {
    for (auto& r : rs) out.records.push_back(std::move(r));
  }
  return out;
}

}  // namespace policylens::annotate
