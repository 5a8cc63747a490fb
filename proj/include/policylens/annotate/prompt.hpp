#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "policylens/core/model.hpp"
#include "policylens/llm/provider.hpp"

namespace policylens::annotate {

enum class Layer { Annotation, SelfCorrection };

std::string_view to_string(Layer layer) noexcept;

struct PromptBundle {
  Layer layer = Layer::Annotation;
  std::string system_prompt;
  std::vector<llm::FewShotExample> few_shot;
  std::string schema_text;
};

/// JSON schema of the expected reply (array of requirement/value/performed).
const std::string& output_schema_text();

/// Prompt components and worked examples for one layer. The system prompt is
/// background, task definition, label list, guidelines, linguistic rules and
/// output format followed by the schema.
const PromptBundle& prompt_bundle(Layer layer);

/// Single-item passage JSON sent as user content. Annotations are included
/// only for the self-correction layer.
std::string passage_user_content(const AnnotatedPassage& passage, Layer layer);

llm::ChatRequest build_prompt(Layer layer, const AnnotatedPassage& passage);
llm::ChatRequest build_prompt(Layer layer, const Passage& passage);

/// Instruction appended to the system prompt on the repair attempt.
std::string_view repair_instruction();

}  // namespace policylens::annotate
