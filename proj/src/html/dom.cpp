#include "policylens/html/dom.hpp"

#include <array>
#include <algorithm>

#include "policylens/util/text.hpp"

namespace policylens::html {

namespace {

constexpr std::array<std::string_view, 33> kInlineTags{
    "a",    "abbr", "b",     "bdi",  "bdo",  "big",    "cite", "code", "data",
    "del",  "dfn",  "em",    "font", "i",    "ins",    "kbd",  "label", "mark",
    "nobr", "q",    "s",     "samp", "small", "span",  "strike", "strong", "sub",
    "sup",  "time", "tt",    "u",    "var",  "wbr"};

constexpr std::array<std::string_view, 14> kHiddenTags{
    "head",   "script", "style",  "noscript", "template", "iframe", "object",
    "embed",  "svg",    "canvas", "meta",     "link",     "title",  "img"};

constexpr std::array<std::string_view, 14> kVoidTags{
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta",
    "param", "source", "track", "wbr"};

template <std::size_t N>
bool in(const std::array<std::string_view, N>& set, std::string_view tag) {
  return std::find(set.begin(), set.end(), tag) != set.end();
}

void collect_text(const Node& node, std::string& out) {
  switch (node.kind) {
    case NodeKind::Text:
      out += node.text;
      return;
    case NodeKind::Comment:
      return;
    case NodeKind::Document:
      for (const auto& c : node.children) collect_text(c, out);
      return;
    case NodeKind::Element:
      break;
  }
  switch (classify_tag(node.name)) {
    case TagClass::Hidden:
      return;
    case TagClass::LineBreak:
      out += ' ';
      return;
    case TagClass::Inline:
      for (const auto& c : node.children) collect_text(c, out);
      return;
    case TagClass::Block:
      out += ' ';
      for (const auto& c : node.children) collect_text(c, out);
      out += ' ';
      return;
  }
}

void escape_into(std::string& out, std::string_view s, bool attribute) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) {
          out += "&quot;";
          break;
        }
        [[fallthrough]];
      default: out += c;
    }
  }
}

void write_html(const Node& node, std::string& out) {
  switch (node.kind) {
    case NodeKind::Text:
      escape_into(out, node.text, false);
      return;
    case NodeKind::Comment:
      out += "<!--" + node.text + "-->";
      return;
    case NodeKind::Document:
      for (const auto& c : node.children) write_html(c, out);
      return;
    case NodeKind::Element:
      break;
  }
  out += '<';
  out += node.name;
  for (const auto& [k, v] : node.attributes) {
    out += ' ';
    out += k;
    out += "=\"";
    escape_into(out, v, true);
    out += '"';
  }
  out += '>';
  if (is_void_element(node.name)) return;
  for (const auto& c : node.children) write_html(c, out);
  out += "</" + node.name + ">";
}

}  // namespace

Node Node::element(std::string name, std::vector<Node> children) {
  Node n;
  n.kind = NodeKind::Element;
  n.name = std::move(name);
  n.children = std::move(children);
  return n;
}

Node Node::text_node(std::string text) {
  Node n;
  n.kind = NodeKind::Text;
  n.text = std::move(text);
  return n;
}

std::optional<std::string_view> Node::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return std::string_view(v);
  }
  return std::nullopt;
}

TagClass classify_tag(std::string_view tag) noexcept {
  if (tag == "br") return TagClass::LineBreak;
  if (in(kInlineTags, tag)) return TagClass::Inline;
  if (in(kHiddenTags, tag)) return TagClass::Hidden;
  return TagClass::Block;
}

int heading_level(std::string_view tag) noexcept {
  if (tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6') return tag[1] - '0';
  return 0;
}

bool is_heading(std::string_view tag) noexcept { return heading_level(tag) != 0; }

bool is_void_element(std::string_view tag) noexcept { return in(kVoidTags, tag); }

std::string visible_text(const Node& node) {
  std::string raw;
  collect_text(node, raw);
  return std::string(text::trim(text::collapse_whitespace(raw)));
}

std::vector<std::string> visible_tokens(const Node& node) {
  std::string raw;
  collect_text(node, raw);
  std::vector<std::string> out;
  for (auto t : text::split_whitespace(raw)) out.emplace_back(t);
  return out;
}

std::string to_html(const Node& node) {
  std::string out;
  write_html(node, out);
  return out;
}

}  // namespace policylens::html
