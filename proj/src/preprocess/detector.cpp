#include "policylens/preprocess/detector.hpp"

#include "policylens/util/text.hpp"

namespace policylens::preprocess {

std::string_view to_string(PolicyVerdict v) noexcept {
  switch (v) {
    case PolicyVerdict::True: return "true";
    case PolicyVerdict::False: return "false";
    case PolicyVerdict::Unknown: return "unknown";
  }
  return "unknown";
}

const std::string& detector_prompt() {
  static const std::string kPrompt =
      "Your task is to analyse a given text snippet and determine if the excerpt is likely part of a "
      "privacy policy.\n\n"
      "Respond with only a single word, omit any additional explanations or context:\n"
      "- 'true' if the excerpt is likely to be from a privacy policy,\n"
      "- 'false' if it likely is not, and\n"
      "- 'unknown' if there's not enough information to decide.";
  return kPrompt;
}

llm::ChatRequest detector_request(std::string_view main_text) {
  llm::ChatRequest req;
  req.system_prompt = detector_prompt();
  req.user_content = std::string(text::utf8_prefix(main_text, kDetectorSegmentChars));
  req.response_format = llm::ResponseFormat::FreeText;
  return req;
}

PolicyVerdict normalize_verdict(std::string_view reply) {
  const std::string v = text::to_lower_ascii(text::trim(reply));
  if (v == "true") return PolicyVerdict::True;
  if (v == "false") return PolicyVerdict::False;
  return PolicyVerdict::Unknown;
}

PolicyVerdict detect_privacy_policy(std::string_view main_text, llm::ChatProvider& llm) {
  return normalize_verdict(llm.complete(detector_request(main_text)));
}

}  // namespace policylens::preprocess
