#include "policylens/preprocess/main_content.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "policylens/core/error.hpp"
#include "policylens/html/parser.hpp"
#include "policylens/util/text.hpp"

namespace policylens::preprocess {

namespace {

constexpr std::array<std::string_view, 11> kBlockedTags{
    "head", "header", "footer", "nav", "aside", "script",
    "style", "noscript", "iframe", "form", "button"};

constexpr std::array<std::string_view, 7> kBlockedPatterns{
    "nav", "menu", "footer", "header", "sidebar", "cookie-banner", "breadcrumb"};

constexpr std::array<std::string_view, 3> kContentPatterns{"content", "policy", "privacy"};

constexpr std::array<std::string_view, 4> kExemptTags{"html", "body", "main", "article"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view v) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

std::string id_and_class(const html::Node& el) {
  std::string out;
  if (auto id = el.attribute("id")) out.append(*id);
  out.push_back(' ');
  if (auto cls = el.attribute("class")) out.append(*cls);
  return text::to_lower_ascii(out);
}

template <std::size_t N>
bool matches_any(const std::string& attrs, const std::array<std::string_view, N>& patterns) {
  return std::any_of(patterns.begin(), patterns.end(),
                     [&](std::string_view p) { return attrs.find(p) != std::string::npos; });
}

bool is_boilerplate(const html::Node& node) {
  if (node.kind == html::NodeKind::Comment) return true;
  if (!node.is_element()) return false;
  if (contains(kBlockedTags, node.name)) return true;
  if (contains(kExemptTags, node.name)) return false;
  const std::string attrs = id_and_class(node);
  return matches_any(attrs, kBlockedPatterns) && !matches_any(attrs, kContentPatterns);
}

struct Candidate {
  const html::Node* node = nullptr;
  int score = 0;
  std::size_t text_length = 0;
};

void collect_candidates(const html::Node& node, std::size_t min_words, Candidate& best) {
  if (node.is_element() && html::classify_tag(node.name) == html::TagClass::Block) {
    const std::string text = html::visible_text(node);
    if (text::word_count(text) >= min_words) {
      const Candidate c{&node, container_score(node), text.size()};
      if (best.node == nullptr || c.score > best.score ||
          (c.score == best.score && c.text_length > best.text_length)) {
        best = c;
      }
    } else {
      return;  // descendants hold even less text
    }
  }
  for (const auto& child : node.children) collect_candidates(child, min_words, best);
}

}  // namespace

void remove_boilerplate(html::Node& root) {
  auto& kids = root.children;
  kids.erase(std::remove_if(kids.begin(), kids.end(), is_boilerplate), kids.end());
  for (auto& child : kids) remove_boilerplate(child);
}

int container_score(const html::Node& element) {
  int score = 0;
  if (element.name == "main") score += 3;
  if (element.name == "article") score += 2;
  if (matches_any(id_and_class(element), kContentPatterns)) score += 2;
  return score;
}

html::Node isolate_main_content(std::string_view html_bytes, std::size_t min_words) {
  html::Node doc = html::parse(html_bytes);
  remove_boilerplate(doc);
  Candidate best;
  collect_candidates(doc, min_words, best);
  if (best.node == nullptr) {
    // bare text with no block container at all
    if (text::word_count(html::visible_text(doc)) >= min_words) {
      return html::Node::element("div", std::move(doc.children));
    }
    throw Error(ErrorCode::InvalidDocument,
                "no content container with at least " + std::to_string(min_words) + " visible words");
  }
  return *best.node;
}

}  // namespace policylens::preprocess
