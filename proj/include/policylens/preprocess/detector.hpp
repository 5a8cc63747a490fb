#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "policylens/llm/provider.hpp"

namespace policylens::preprocess {

enum class PolicyVerdict { True, False, Unknown };

std::string_view to_string(PolicyVerdict v) noexcept;

inline constexpr std::size_t kDetectorSegmentChars = 1500;

/// System prompt of the privacy-policy detector.
const std::string& detector_prompt();

/// Builds the detector request for the first kDetectorSegmentChars code points.
llm::ChatRequest detector_request(std::string_view main_text);

/// trim + lowercase; anything but "true"/"false"/"unknown" maps to Unknown.
PolicyVerdict normalize_verdict(std::string_view reply);

/// Asks the model whether main_text is part of a privacy policy.
/// ProviderUnavailable propagates.
PolicyVerdict detect_privacy_policy(std::string_view main_text, llm::ChatProvider& llm);

}  // namespace policylens::preprocess
