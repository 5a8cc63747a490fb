#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "policylens/llm/provider.hpp"

namespace policylens::evaluate {

/// Lowercased whitespace tokens with leading/trailing punctuation stripped;
/// "[...]" placeholders and tokens that become empty are dropped.
std::vector<std::string> span_tokens(std::string_view span);

/// Token-set Jaccard index. Two empty token sets give 1, exactly one gives 0.
double jaccard(std::string_view a, std::string_view b);

/// (jaccard + max(0, cosine of embeddings)) / 2, in [0, 1].
double span_similarity(std::string_view a, std::string_view b, llm::EmbeddingProvider& embedder);

/// Slack for floating-point rounding when comparing a similarity to tau.
inline constexpr double kTieTolerance = 1e-9;

/// Strictly above tau. A similarity within rounding of tau is a tie and does
/// not match.
inline bool exceeds_threshold(double similarity, double tau) noexcept { return similarity > tau + kTieTolerance; }

}  // namespace policylens::evaluate
