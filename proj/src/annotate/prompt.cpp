#include "policylens/annotate/prompt.hpp"

#include "policylens/core/error.hpp"
#include "policylens/core/labels.hpp"
#include "policylens/core/schema.hpp"

namespace policylens::annotate {

namespace data {
extern const std::string_view kBackground;
extern const std::string_view kTaskAnnotation;
extern const std::string_view kTaskSelfCorrection;
extern const std::string_view kGuidelinesIntroAnnotation;
extern const std::string_view kGuidelinesIntroSelfCorrection;
extern const std::string_view kGuidelines;
extern const std::string_view kLinguistic;
extern const std::string_view kOutputFormat;
extern const std::string_view kRepair;
extern const std::string_view kFewShotAnnotation;
extern const std::string_view kFewShotSelfCorrection;
}  // namespace data

namespace {

std::string trimmed(std::string_view s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

std::string label_list() {
  std::string out;
  std::size_t n = 1;
  for (const auto& r : all_requirements()) {
    out += std::to_string(n++) + ". \"" + std::string(r.name) + "\": Article " + std::string(r.article) +
           ", e.g. \"" + std::string(r.example) + "\"\n";
  }
  out.pop_back();
  return out;
}

std::vector<llm::FewShotExample> load_few_shot(std::string_view text, Layer layer) {
  const auto pairs = schema::Json::parse(text);
  std::vector<llm::FewShotExample> out;
  for (const auto& pair : pairs) {
    // Run the input through the schema so it matches what passage_user_content emits.
    const auto passage = schema::passage_from_json(pair.at("input"), "fewshot", layer == Layer::SelfCorrection);
    out.push_back({passage_user_content(passage, layer), schema::dump(pair.at("output"))});
  }
  if (out.size() != 3) throw Error(ErrorCode::ConfigError, "expected three few-shot pairs");
  return out;
}

PromptBundle make_bundle(Layer layer) {
  const bool annotation = layer == Layer::Annotation;
  PromptBundle b;
  b.layer = layer;
  b.schema_text = output_schema_text();
  b.system_prompt = trimmed(data::kBackground) + "\n\n" +
                    trimmed(annotation ? data::kTaskAnnotation : data::kTaskSelfCorrection) + "\n\n" +
                    label_list() + "\n\n" +
                    trimmed(annotation ? data::kGuidelinesIntroAnnotation : data::kGuidelinesIntroSelfCorrection) +
                    "\n\n" + trimmed(data::kGuidelines) + "\n\n" + trimmed(data::kLinguistic) + "\n\n" +
                    trimmed(data::kOutputFormat) + "\n\n" + b.schema_text;
  b.few_shot = load_few_shot(annotation ? data::kFewShotAnnotation : data::kFewShotSelfCorrection, layer);
  return b;
}

}  // namespace

std::string_view to_string(Layer layer) noexcept {
  return layer == Layer::Annotation ? "annotation" : "self_correction";
}

const std::string& output_schema_text() {
  static const std::string kText = [] {
    schema::Json labels = schema::Json::array();
    for (const auto& r : all_requirements()) labels.push_back(std::string(r.name));
    schema::Json s = {
        {"type", "array"},
        {"items",
         {{"type", "object"},
          {"properties",
           {{"requirement", {{"type", "string"}, {"enum", labels}}},
            {"value", {{"type", "string"}}},
            {"performed", {{"type", "boolean"}}}}},
          {"required", {"requirement", "value", "performed"}},
          {"additionalProperties", false}}}};
    return schema::dump(s);
  }();
  return kText;
}

const PromptBundle& prompt_bundle(Layer layer) {
  static const PromptBundle kAnnotation = make_bundle(Layer::Annotation);
  static const PromptBundle kSelfCorrection = make_bundle(Layer::SelfCorrection);
  return layer == Layer::Annotation ? kAnnotation : kSelfCorrection;
}

std::string passage_user_content(const AnnotatedPassage& passage, Layer layer) {
  return schema::dump(schema::passage_to_json(passage, layer == Layer::SelfCorrection));
}

llm::ChatRequest build_prompt(Layer layer, const AnnotatedPassage& passage) {
  const PromptBundle& b = prompt_bundle(layer);
  llm::ChatRequest req;
  req.system_prompt = b.system_prompt;
  req.few_shot = b.few_shot;
  req.user_content = passage_user_content(passage, layer);
  req.response_format = llm::ResponseFormat::JsonArray;
  return req;
}

llm::ChatRequest build_prompt(Layer layer, const Passage& passage) {
  return build_prompt(layer, AnnotatedPassage{passage, {}});
}

std::string_view repair_instruction() { return data::kRepair; }

}  // namespace policylens::annotate
