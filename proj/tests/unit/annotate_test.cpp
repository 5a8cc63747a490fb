#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "policylens/annotate/parse.hpp"
#include "policylens/annotate/pipeline.hpp"
#include "policylens/annotate/prompt.hpp"
#include "policylens/core/error.hpp"
#include "policylens/core/labels.hpp"
#include "policylens/llm/mock.hpp"

using namespace policylens;
using namespace policylens::annotate;

namespace {

Passage passage(std::string text, ElementType type = ElementType::Text, std::vector<ContextElement> ctx = {}) {
  Passage p;
  p.id = "p0000";
  p.type = type;
  p.context = std::move(ctx);
  p.text = std::move(text);
  return p;
}

const char* kOneValid = R"([{"requirement":"Data Categories","value":"your name","performed":true}])";

}  // namespace

TEST(Prompt, SystemPromptListsAllLabels) {
  for (Layer layer : {Layer::Annotation, Layer::SelfCorrection}) {
    const auto& b = prompt_bundle(layer);
    for (const auto& r : all_requirements()) {
      EXPECT_NE(b.system_prompt.find("\"" + std::string(r.name) + "\""), std::string::npos) << r.name;
    }
    EXPECT_NE(b.system_prompt.find("Right to Lodge Complaint"), std::string::npos);
    EXPECT_NE(b.system_prompt.find(b.schema_text), std::string::npos);
    EXPECT_EQ(b.few_shot.size(), 3u);
  }
  EXPECT_NE(prompt_bundle(Layer::Annotation).system_prompt, prompt_bundle(Layer::SelfCorrection).system_prompt);
}

TEST(Prompt, AnnotationLayerOmitsAnnotations) {
  const auto req = build_prompt(Layer::Annotation,
                                passage("We collect your name.", ElementType::Text, {{"Data", ContextTag::H2}}));
  const auto j = nlohmann::ordered_json::parse(req.user_content);
  EXPECT_EQ(j["passage"], "We collect your name.");
  EXPECT_EQ(j["context"][0]["text"], "Data");
  EXPECT_EQ(j["type"], "text");
  EXPECT_FALSE(j.contains("annotations"));
  EXPECT_EQ(req.user_content.substr(0, 14), "{\n  \"type\": \"t");
}

TEST(Prompt, SelfCorrectionIncludesAnnotations) {
  AnnotatedPassage ap{passage("We collect your name."), {Annotation{"your name", Requirement::DataCategories, true}}};
  const auto j = nlohmann::ordered_json::parse(build_prompt(Layer::SelfCorrection, ap).user_content);
  ASSERT_TRUE(j.contains("annotations"));
  EXPECT_EQ(j["annotations"][0]["value"], "your name");
}

TEST(Prompt, FewShotOutputsAreValidForTheirInputs) {
  for (Layer layer : {Layer::Annotation, Layer::SelfCorrection}) {
    for (const auto& ex : prompt_bundle(layer).few_shot) {
      const auto in = nlohmann::json::parse(ex.input);
      const auto parsed = parse_llm_annotations(ex.output, in["passage"].get<std::string>());
      EXPECT_TRUE(parsed.dropped.empty()) << ex.output;
      EXPECT_EQ(parsed.annotations.size(), nlohmann::json::parse(ex.output).size());
    }
  }
}

TEST(Parse, DirectArray) {
  const auto r = parse_llm_annotations(kOneValid, "We collect your name.");
  ASSERT_EQ(r.annotations.size(), 1u);
  EXPECT_EQ(r.annotations.items()[0], (Annotation{"your name", Requirement::DataCategories, true}));
}

TEST(Parse, UnknownLabelDropped) {
  const auto r = parse_llm_annotations(
      R"([{"requirement":"Contact Info","value":"your name","performed":true}])", "We collect your name.");
  EXPECT_TRUE(r.annotations.empty());
  ASSERT_EQ(r.dropped.size(), 1u);
  EXPECT_NE(r.dropped[0].reason.find("unknown requirement"), std::string::npos);
}

TEST(Parse, AbsentSpanDroppedWithSpanNotFound) {
  const auto r = parse_llm_annotations(
      R"([{"requirement":"Data Categories","value":"your address","performed":true}])", "We collect your name.");
  EXPECT_TRUE(r.annotations.empty());
  ASSERT_EQ(r.dropped.size(), 1u);
  EXPECT_NE(r.dropped[0].reason.find("SpanNotFound"), std::string::npos);
}

TEST(Parse, ToleratesProseAndFences) {
  const std::string raw = std::string("Sure! [see below]\n```json\n") + kOneValid + "\n```\nHope this helps.";
  EXPECT_EQ(parse_llm_annotations(raw, "We collect your name.").annotations.size(), 1u);
  EXPECT_EQ(extract_json_array("x [1, \"]\", [2]] y"), "[1, \"]\", [2]]");
}

TEST(Parse, TypeErrorsDropped) {
  const auto r = parse_llm_annotations(
      R"([1, {"requirement":"Data Categories","value":"your name","performed":"yes"},
          {"requirement":"Data Categories","value":7,"performed":true},
          {"value":"your name","performed":true}])",
      "We collect your name.");
  EXPECT_TRUE(r.annotations.empty());
  EXPECT_EQ(r.dropped.size(), 4u);
}

TEST(Parse, NoArrayIsUnparseable) {
  try {
    parse_llm_annotations("I cannot help with that.", "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Unparseable);
  }
  EXPECT_THROW(parse_llm_annotations("[{\"a\": 1", "x"), Error);
}

TEST(Parse, EmptyArrayIsValid) {
  const auto r = parse_llm_annotations("[]", "x");
  EXPECT_TRUE(r.annotations.empty());
  EXPECT_TRUE(r.dropped.empty());
}

TEST(AnnotatePassage, FixedReplyDeterministic) {
  for (int i = 0; i < 2; ++i) {
    llm::SequenceChatProvider llm({kOneValid});
    const auto r = annotate_passage(passage("We collect your name."), llm);
    EXPECT_EQ(r.passage.annotations.size(), 1u);
    EXPECT_EQ(r.record.outcome, Outcome::Ok);
    EXPECT_EQ(r.record.layer, Layer::Annotation);
  }
}

TEST(AnnotatePassage, TwoRefusalsFailSoft) {
  llm::SequenceChatProvider llm({"I cannot help", "I cannot help"});
  const auto r = annotate_passage(passage("We collect your name."), llm);
  EXPECT_TRUE(r.passage.annotations.empty());
  EXPECT_EQ(r.record.outcome, Outcome::Failed);
  EXPECT_FALSE(r.record.error.empty());
  const auto reqs = llm.requests();
  ASSERT_EQ(reqs.size(), 2u);
  EXPECT_NE(reqs[1].system_prompt.find(std::string(repair_instruction())), std::string::npos);
  EXPECT_EQ(reqs[0].user_content, reqs[1].user_content);
}

TEST(AnnotatePassage, RepairSucceeds) {
  llm::SequenceChatProvider llm({"nope", kOneValid});
  const auto r = annotate_passage(passage("We collect your name."), llm);
  EXPECT_EQ(r.record.outcome, Outcome::Repaired);
  EXPECT_EQ(r.passage.annotations.size(), 1u);
}

TEST(AnnotatePassage, OneValidOneUnknownLabel) {
  llm::SequenceChatProvider llm({R"([{"requirement":"Data Categories","value":"your name","performed":true},
                                    {"requirement":"Contact Info","value":"name","performed":true}])"});
  const auto r = annotate_passage(passage("We collect your name."), llm);
  EXPECT_EQ(r.passage.annotations.size(), 1u);
  EXPECT_EQ(r.record.dropped.size(), 1u);
  EXPECT_EQ(r.record.outcome, Outcome::Ok);
}

TEST(AnnotatePassage, ProviderFailurePropagates) {
  llm::SequenceChatProvider llm({});
  EXPECT_THROW(annotate_passage(passage("x"), llm), Error);
}

TEST(SelfCorrect, IdentityReply) {
  AnnotatedPassage in{passage("We collect your name and email."),
                      {Annotation{"your name", Requirement::DataCategories, true}}};
  llm::SequenceChatProvider llm({kOneValid});
  EXPECT_EQ(self_correct(in, llm).passage, in);
}

TEST(SelfCorrect, SupersetReply) {
  AnnotatedPassage in{passage("We collect your name and email."),
                      {Annotation{"your name", Requirement::DataCategories, true}}};
  llm::SequenceChatProvider llm({R"([{"requirement":"Data Categories","value":"your name","performed":true},
                                    {"requirement":"Data Categories","value":"your [...] email","performed":true}])"});
  const auto out = self_correct(in, llm).passage.annotations;
  EXPECT_EQ(out.size(), 2u);
  for (const auto& a : in.annotations) EXPECT_TRUE(out.contains(a));
}

TEST(SelfCorrect, ReplacementCanRemove) {
  AnnotatedPassage in{passage("We collect your name."), {Annotation{"your name", Requirement::DataCategories, true}}};
  llm::SequenceChatProvider llm({"[]"});
  EXPECT_TRUE(self_correct(in, llm).passage.annotations.empty());
}

TEST(SelfCorrect, DoubleFailureKeepsInput) {
  AnnotatedPassage in{passage("We collect your name."), {Annotation{"your name", Requirement::DataCategories, true}}};
  llm::SequenceChatProvider llm({"garbage", "more garbage"});
  const auto r = self_correct(in, llm);
  EXPECT_EQ(r.passage, in);
  EXPECT_EQ(r.record.outcome, Outcome::Failed);
}

TEST(RunLayers, OneRecordPerPassagePerLayerInOrder) {
  PolicyDocument doc;
  doc.policy_id = "doc";
  for (int i = 0; i < 20; ++i) {
    Passage p = passage("We collect your name and email address, passage " + std::to_string(i) + ".");
    p.id = passage_id_for(static_cast<std::size_t>(i));
    doc.passages.push_back({p, {}});
  }
  llm::HeuristicChatProvider llm;
  const auto a = run_layers(doc, {Layer::Annotation, Layer::SelfCorrection}, llm, 8);
  const auto b = run_layers(doc, {Layer::Annotation, Layer::SelfCorrection}, llm, 1);
  ASSERT_EQ(a.records.size(), 40u);
  for (std::size_t i = 0; i < 20; ++i) {
    EXPECT_EQ(a.records[2 * i].passage_id, doc.passages[i].passage.id);
    EXPECT_EQ(a.records[2 * i].layer, Layer::Annotation);
    EXPECT_EQ(a.records[2 * i + 1].layer, Layer::SelfCorrection);
    EXPECT_EQ(a.records[2 * i].policy_id, "doc");
  }
  std::ostringstream sa;
  std::ostringstream sb;
  RunRecordSink(sa).write(a.records);
  RunRecordSink(sb).write(b.records);
  EXPECT_EQ(sa.str(), sb.str());
  for (std::size_t i = 0; i < 20; ++i) {
    EXPECT_EQ(a.document.passages[i], b.document.passages[i]);
    EXPECT_FALSE(a.document.passages[i].annotations.empty());
    for (const auto& ann : a.document.passages[i].annotations) {
      EXPECT_FALSE(annotation_problem(ann, a.document.passages[i].passage.text).has_value());
    }
  }
}

TEST(RunRecord, JsonLine) {
  AnnotationRunRecord r;
  r.policy_id = "d";
  r.passage_id = "p0001";
  r.layer = Layer::SelfCorrection;
  r.outcome = Outcome::Failed;
  r.error = "Unparseable: x";
  r.raw_reply = "oops";
  const auto j = nlohmann::json::parse(to_json_line(r));
  EXPECT_EQ(j["layer"], "self_correction");
  EXPECT_EQ(j["outcome"], "failed");
  EXPECT_EQ(j["error"], "Unparseable: x");
}
