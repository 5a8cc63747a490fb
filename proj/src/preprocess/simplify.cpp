#include "policylens/preprocess/simplify.hpp"

#include <algorithm>
#include <array>

#include "policylens/util/text.hpp"

namespace policylens::preprocess {

namespace {

constexpr std::array<std::string_view, 19> kVocabulary{
    "div", "p",  "h1", "h2", "h3",    "h4",    "h5",    "h6", "ul", "ol",
    "li",  "table", "thead", "tbody", "tfoot", "tr", "td", "th", "caption"};

bool in_vocabulary(std::string_view tag) {
  return std::find(kVocabulary.begin(), kVocabulary.end(), tag) != kVocabulary.end();
}

void append_text(std::vector<html::Node>& out, std::string_view raw) {
  if (raw.empty()) return;
  if (!out.empty() && out.back().is_text()) {
    out.back().text = text::collapse_whitespace(out.back().text + std::string(raw));
  } else {
    out.push_back(html::Node::text_node(text::collapse_whitespace(raw)));
  }
}

void emit(const html::Node& node, std::vector<html::Node>& out);

html::Node simplify_block(const html::Node& node) {
  html::Node el = html::Node::element(in_vocabulary(node.name) ? node.name : "div");
  if (el.name == "td" || el.name == "th") {
    for (const auto& [k, v] : node.attributes) {
      if (k == "colspan" || k == "rowspan") el.attributes.emplace_back(k, v);
    }
  }
  for (const auto& child : node.children) emit(child, el.children);
  auto& kids = el.children;
  kids.erase(std::remove_if(kids.begin(), kids.end(),
                            [](const html::Node& n) { return n.is_text() && text::trim(n.text).empty(); }),
             kids.end());
  return el;
}

void emit(const html::Node& node, std::vector<html::Node>& out) {
  switch (node.kind) {
    case html::NodeKind::Comment:
      return;
    case html::NodeKind::Text:
      append_text(out, node.text);
      return;
    case html::NodeKind::Document:
      for (const auto& c : node.children) emit(c, out);
      return;
    case html::NodeKind::Element:
      break;
  }
  switch (html::classify_tag(node.name)) {
    case html::TagClass::Hidden:
      return;
    case html::TagClass::LineBreak:
      append_text(out, " ");
      return;
    case html::TagClass::Inline:
      for (const auto& c : node.children) emit(c, out);
      return;
    case html::TagClass::Block: {
      html::Node el = simplify_block(node);
      // redundant nesting: the lone child takes the wrapper's place
      if (el.name == "div" && el.children.size() == 1 && el.children.front().is_element()) {
        html::Node only = std::move(el.children.front());
        out.push_back(std::move(only));
      } else {
        out.push_back(std::move(el));
      }
      return;
    }
  }
}

}  // namespace

html::Node simplify_html(const html::Node& subtree) {
  std::vector<html::Node> out;
  emit(subtree, out);
  if (out.size() == 1 && out.front().is_element()) return std::move(out.front());
  html::Node wrapper = html::Node::element("div", std::move(out));
  wrapper.children.erase(
      std::remove_if(wrapper.children.begin(), wrapper.children.end(),
                     [](const html::Node& n) { return n.is_text() && text::trim(n.text).empty(); }),
      wrapper.children.end());
  return wrapper;
}

}  // namespace policylens::preprocess
