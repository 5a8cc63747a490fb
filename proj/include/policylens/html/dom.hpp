#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace policylens::html {

enum class NodeKind : std::uint8_t { Document, Element, Text, Comment };

/// Value-semantic DOM node. Element names are lowercase; attribute names are
/// lowercase and keep document order.
struct Node {
  NodeKind kind = NodeKind::Element;
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string text;  ///< Text and Comment payload
  std::vector<Node> children;

  static Node element(std::string name, std::vector<Node> children = {});
  static Node text_node(std::string text);

  [[nodiscard]] bool is_element() const noexcept { return kind == NodeKind::Element; }
  [[nodiscard]] bool is_element(std::string_view tag) const noexcept {
    return kind == NodeKind::Element && name == tag;
  }
  [[nodiscard]] bool is_text() const noexcept { return kind == NodeKind::Text; }

  [[nodiscard]] std::optional<std::string_view> attribute(std::string_view key) const;

  friend bool operator==(const Node&, const Node&) = default;
};

/// How a tag participates in text flow.
enum class TagClass : std::uint8_t {
  Inline,     ///< contributes text without a boundary (b, span, a, ...)
  Block,      ///< starts a new text block (p, div, li, td, unknown tags, ...)
  LineBreak,  ///< br: a boundary without structure
  Hidden,     ///< never visible (script, style, head, ...)
};

TagClass classify_tag(std::string_view tag) noexcept;

bool is_heading(std::string_view tag) noexcept;

/// 1..6 for h1..h6, 0 otherwise.
int heading_level(std::string_view tag) noexcept;

bool is_void_element(std::string_view tag) noexcept;

/// Visible text with a space at every block boundary; whitespace collapsed
/// and trimmed.
std::string visible_text(const Node& node);

/// Whitespace-separated tokens of visible_text(node).
std::vector<std::string> visible_tokens(const Node& node);

/// Serializes back to HTML (attributes double-quoted, text escaped).
std::string to_html(const Node& node);

}  // namespace policylens::html
