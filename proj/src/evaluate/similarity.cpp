#include "policylens/evaluate/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "policylens/core/model.hpp"
#include "policylens/util/text.hpp"

namespace policylens::evaluate {

std::vector<std::string> span_tokens(std::string_view span) {
  std::vector<std::string> out;
  const std::string lower = text::to_lower_ascii(span);
  for (auto tok : text::split_whitespace(lower)) {
    if (tok == kDiscontinuity) continue;
    while (!tok.empty() && std::ispunct(static_cast<unsigned char>(tok.front()))) tok.remove_prefix(1);
    while (!tok.empty() && std::ispunct(static_cast<unsigned char>(tok.back()))) tok.remove_suffix(1);
    if (!tok.empty()) out.emplace_back(tok);
  }
  return out;
}

double jaccard(std::string_view a, std::string_view b) {
  const auto ta = span_tokens(a);
  const auto tb = span_tokens(b);
  const std::set<std::string> sa(ta.begin(), ta.end());
  const std::set<std::string> sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 1.0;
  if (sa.empty() || sb.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& t : sa) common += sb.count(t);
  return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

double span_similarity(std::string_view a, std::string_view b, llm::EmbeddingProvider& embedder) {
  // Unit-norm embeddings make this exact; skips rounding in the dot product.
  if (a == b) return 1.0;
  const double cos = llm::cosine(embedder.embed(a), embedder.embed(b));
  return (jaccard(a, b) + std::max(0.0, cos)) / 2.0;
}

}  // namespace policylens::evaluate
