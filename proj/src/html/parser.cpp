#include "policylens/html/parser.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "policylens/util/text.hpp"

namespace policylens::html {

namespace {

struct NamedEntity {
  std::string_view name;
  char32_t cp;
};

constexpr std::array<NamedEntity, 62> kEntities{{
    {"amp", '&'},       {"lt", '<'},         {"gt", '>'},         {"quot", '"'},
    {"apos", '\''},     {"nbsp", ' '},       {"copy", 0xA9},      {"reg", 0xAE},
    {"trade", 0x2122},  {"mdash", 0x2014},   {"ndash", 0x2013},   {"hellip", 0x2026},
    {"lsquo", 0x2018},  {"rsquo", 0x2019},   {"ldquo", 0x201C},   {"rdquo", 0x201D},
    {"sbquo", 0x201A},  {"bdquo", 0x201E},   {"laquo", 0xAB},     {"raquo", 0xBB},
    {"bull", 0x2022},   {"middot", 0xB7},    {"euro", 0x20AC},    {"pound", 0xA3},
    {"yen", 0xA5},      {"cent", 0xA2},      {"sect", 0xA7},      {"para", 0xB6},
    {"deg", 0xB0},      {"plusmn", 0xB1},    {"times", 0xD7},     {"divide", 0xF7},
    {"auml", 0xE4},     {"ouml", 0xF6},      {"uuml", 0xFC},      {"Auml", 0xC4},
    {"Ouml", 0xD6},     {"Uuml", 0xDC},      {"szlig", 0xDF},     {"eacute", 0xE9},
    {"egrave", 0xE8},   {"ecirc", 0xEA},     {"Eacute", 0xC9},    {"aacute", 0xE1},
    {"agrave", 0xE0},   {"acirc", 0xE2},     {"iacute", 0xED},    {"oacute", 0xF3},
    {"uacute", 0xFA},   {"ntilde", 0xF1},    {"ccedil", 0xE7},    {"ocirc", 0xF4},
    {"thinsp", ' '},    {"ensp", ' '},       {"emsp", ' '},       {"zwnj", 0x200C},
    {"zwj", 0x200D},    {"shy", 0xAD},       {"iexcl", 0xA1},     {"iquest", 0xBF},
    {"rarr", 0x2192},   {"larr", 0x2190},
}};

// Windows-1252 code points for bytes 0x80..0x9F (0 = undefined).
constexpr std::array<char16_t, 32> kCp1252High{
    0x20AC, 0,      0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
    0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0,      0x017D, 0,
    0,      0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
    0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,      0x017E, 0x0178};

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_alnum(char c) { return is_alpha(c) || (c >= '0' && c <= '9'); }

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; }

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (lower(s[pos + i]) != prefix[i]) return false;
  }
  return true;
}

char32_t remap_numeric(char32_t cp) {
  if (cp >= 0x80 && cp <= 0x9F && kCp1252High[cp - 0x80] != 0) return kCp1252High[cp - 0x80];
  if (cp == 0 || cp > 0x10FFFF) return 0xFFFD;
  if (cp == 0xA0) return ' ';
  return cp;
}

// Decodes one reference starting at s[pos] == '&'. Returns consumed length (0 if
// not a reference).
std::size_t decode_reference(std::string_view s, std::size_t pos, std::string& out) {
  const std::size_t semi = s.find(';', pos + 1);
  if (semi == std::string_view::npos || semi - pos > 33) return 0;
  std::string_view body = s.substr(pos + 1, semi - pos - 1);
  if (body.empty()) return 0;
  if (body[0] == '#') {
    char32_t cp = 0;
    bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
    std::string_view digits = body.substr(hex ? 2 : 1);
    if (digits.empty() || digits.size() > 8) return 0;
    for (char c : digits) {
      int d = -1;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
      else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
      if (d < 0) return 0;
      cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(d);
    }
    text::append_utf8(out, remap_numeric(cp));
    return semi - pos + 1;
  }
  for (const auto& e : kEntities) {
    if (e.name == body) {
      text::append_utf8(out, e.cp);
      return semi - pos + 1;
    }
  }
  return 0;
}

// U+00A0 behaves like an ordinary space for tokenization.
std::string normalize_nbsp(std::string s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\xC2' && i + 1 < s.size() && s[i + 1] == '\xA0') {
      out.push_back(' ');
      ++i;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

bool in_list(std::string_view tag, std::initializer_list<std::string_view> list) {
  return std::find(list.begin(), list.end(), tag) != list.end();
}

bool closes_paragraph(std::string_view tag) {
  return is_heading(tag) ||
         in_list(tag, {"address", "article", "aside", "blockquote", "center", "dd", "details",
                       "dialog", "dir", "div", "dl", "dt", "fieldset", "figcaption", "figure",
                       "footer", "form", "header", "hgroup", "hr", "li", "main", "menu", "nav",
                       "ol", "p", "pre", "section", "summary", "table", "ul"});
}

bool is_raw_text(std::string_view tag) {
  return in_list(tag, {"script", "style", "xmp", "iframe", "noembed", "noframes", "noscript"});
}

bool is_rcdata(std::string_view tag) { return tag == "title" || tag == "textarea"; }

class TreeBuilder {
 public:
  TreeBuilder() {
    Node doc;
    doc.kind = NodeKind::Document;
    stack_.push_back(std::move(doc));
  }

  void text(std::string s) {
    if (s.empty()) return;
    auto& children = stack_.back().children;
    if (!children.empty() && children.back().is_text()) {
      children.back().text += s;
    } else {
      children.push_back(Node::text_node(std::move(s)));
    }
  }

  void comment(std::string s) {
    Node n;
    n.kind = NodeKind::Comment;
    n.text = std::move(s);
    stack_.back().children.push_back(std::move(n));
  }

  void start_tag(Node element, bool self_closing) {
    const std::string& tag = element.name;
    if (closes_paragraph(tag)) close_in_scope("p", {"table", "td", "th", "caption", "button", "object"});
    if (tag == "li") close_in_scope("li", {"ul", "ol", "table", "td", "th"});
    if (tag == "dt" || tag == "dd") {
      close_in_scope("dt", {"dl", "table", "td", "th"});
      close_in_scope("dd", {"dl", "table", "td", "th"});
    }
    if (is_heading(tag) && is_heading(current_name())) pop();
    if (tag == "tr" || tag == "thead" || tag == "tbody" || tag == "tfoot") {
      for (auto cell : {"td", "th"}) close_in_scope(cell, {"table", "tr"});
      close_in_scope("tr", {"table"});
      if (tag != "tr") {
        for (auto sec : {"thead", "tbody", "tfoot"}) close_in_scope(sec, {"table"});
      }
    }
    if (tag == "td" || tag == "th") {
      for (auto cell : {"td", "th"}) close_in_scope(cell, {"table", "tr"});
    }
    if (tag == "option" && current_name() == "option") pop();

    if (self_closing || is_void_element(tag)) {
      stack_.back().children.push_back(std::move(element));
    } else {
      stack_.push_back(std::move(element));
    }
  }

  void end_tag(std::string_view tag) {
    if (tag == "br") {
      stack_.back().children.push_back(Node::element("br"));
      return;
    }
    const bool table_part = in_list(tag, {"table", "td", "th", "tr", "thead", "tbody", "tfoot", "caption"});
    for (std::size_t i = stack_.size(); i-- > 1;) {
      const std::string& name = stack_[i].name;
      if (name == tag) {
        while (stack_.size() > i) pop();
        return;
      }
      if (!table_part && in_list(name, {"table", "td", "th", "caption"})) return;
      if (tag != "table" && table_part && name == "table") return;
    }
  }

  Node finish() {
    while (stack_.size() > 1) pop();
    return std::move(stack_.front());
  }

  [[nodiscard]] std::string_view current_name() const { return stack_.back().name; }

 private:
  void pop() {
    Node done = std::move(stack_.back());
    stack_.pop_back();
    stack_.back().children.push_back(std::move(done));
  }

  // Pops up to and including the nearest `tag`, unless a boundary element is
  // found first.
  void close_in_scope(std::string_view tag, std::initializer_list<std::string_view> boundary) {
    for (std::size_t i = stack_.size(); i-- > 1;) {
      const std::string& name = stack_[i].name;
      if (name == tag) {
        while (stack_.size() > i) pop();
        return;
      }
      if (in_list(name, boundary)) return;
    }
  }

  std::vector<Node> stack_;
};

class Tokenizer {
 public:
  Tokenizer(std::string_view input, TreeBuilder& builder) : s_(input), b_(builder) {}

  void run() {
    std::size_t text_start = 0;
    while (pos_ < s_.size()) {
      if (s_[pos_] != '<') {
        ++pos_;
        continue;
      }
      const std::size_t lt = pos_;
      if (!markup_follows()) {
        ++pos_;
        continue;
      }
      flush_text(text_start, lt);
      consume_markup();
      text_start = pos_;
    }
    flush_text(text_start, s_.size());
  }

 private:
  bool markup_follows() const {
    if (pos_ + 1 >= s_.size()) return false;
    const char c = s_[pos_ + 1];
    return is_alpha(c) || c == '!' || c == '?' || (c == '/' && pos_ + 2 < s_.size());
  }

  void flush_text(std::size_t from, std::size_t to) {
    if (to > from) b_.text(normalize_nbsp(decode_entities(s_.substr(from, to - from))));
  }

  void consume_markup() {
    if (s_.compare(pos_, 4, "<!--") == 0) {
      const std::size_t end = s_.find("-->", pos_ + 4);
      const std::size_t stop = end == std::string_view::npos ? s_.size() : end;
      b_.comment(std::string(s_.substr(pos_ + 4, stop - pos_ - 4)));
      pos_ = end == std::string_view::npos ? s_.size() : end + 3;
      return;
    }
    if (starts_with_ci(s_, pos_, "<![cdata[")) {
      const std::size_t end = s_.find("]]>", pos_);
      const std::size_t stop = end == std::string_view::npos ? s_.size() : end;
      b_.text(std::string(s_.substr(pos_ + 9, stop - pos_ - 9)));
      pos_ = end == std::string_view::npos ? s_.size() : end + 3;
      return;
    }
    if (s_[pos_ + 1] == '!' || s_[pos_ + 1] == '?') {
      const std::size_t end = s_.find('>', pos_);
      pos_ = end == std::string_view::npos ? s_.size() : end + 1;
      return;
    }
    if (s_[pos_ + 1] == '/') {
      pos_ += 2;
      if (pos_ < s_.size() && !is_alpha(s_[pos_])) {
        // "</ >" and similar: bogus comment
        const std::size_t end = s_.find('>', pos_);
        pos_ = end == std::string_view::npos ? s_.size() : end + 1;
        return;
      }
      std::string name = read_tag_name();
      const std::size_t end = s_.find('>', pos_);
      pos_ = end == std::string_view::npos ? s_.size() : end + 1;
      b_.end_tag(name);
      return;
    }
    ++pos_;
    Node element = Node::element(read_tag_name());
    bool self_closing = read_attributes(element);
    const std::string name = element.name;
    b_.start_tag(std::move(element), self_closing);
    if (!self_closing && (is_raw_text(name) || is_rcdata(name))) consume_raw(name);
  }

  std::string read_tag_name() {
    std::string name;
    while (pos_ < s_.size() && (is_alnum(s_[pos_]) || s_[pos_] == '-' || s_[pos_] == ':' ||
                                s_[pos_] == '_' || s_[pos_] == '.')) {
      name.push_back(lower(s_[pos_]));
      ++pos_;
    }
    return name;
  }

  void skip_space() {
    while (pos_ < s_.size() && text::is_space(s_[pos_])) ++pos_;
  }

  // Returns true for "/>" termination.
  bool read_attributes(Node& element) {
    while (pos_ < s_.size()) {
      skip_space();
      if (pos_ >= s_.size()) return false;
      if (s_[pos_] == '>') {
        ++pos_;
        return false;
      }
      if (s_[pos_] == '/') {
        ++pos_;
        if (pos_ < s_.size() && s_[pos_] == '>') {
          ++pos_;
          return true;
        }
        continue;
      }
      std::string key;
      while (pos_ < s_.size() && !text::is_space(s_[pos_]) && s_[pos_] != '=' &&
             s_[pos_] != '>' && s_[pos_] != '/') {
        key.push_back(lower(s_[pos_]));
        ++pos_;
      }
      if (key.empty()) {
        ++pos_;  // stray character such as a lone quote
        continue;
      }
      skip_space();
      std::string value;
      if (pos_ < s_.size() && s_[pos_] == '=') {
        ++pos_;
        skip_space();
        if (pos_ < s_.size() && (s_[pos_] == '"' || s_[pos_] == '\'')) {
          const char quote = s_[pos_++];
          const std::size_t end = s_.find(quote, pos_);
          const std::size_t stop = end == std::string_view::npos ? s_.size() : end;
          value = decode_entities(s_.substr(pos_, stop - pos_));
          pos_ = end == std::string_view::npos ? s_.size() : end + 1;
        } else {
          const std::size_t start = pos_;
          while (pos_ < s_.size() && !text::is_space(s_[pos_]) && s_[pos_] != '>') ++pos_;
          value = decode_entities(s_.substr(start, pos_ - start));
        }
      }
      const bool seen = std::any_of(element.attributes.begin(), element.attributes.end(),
                                    [&](const auto& kv) { return kv.first == key; });
      if (!seen) element.attributes.emplace_back(std::move(key), std::move(value));
    }
    return false;
  }

  void consume_raw(const std::string& name) {
    const std::string closing = "</" + name;
    std::size_t search = pos_;
    std::size_t end = std::string_view::npos;
    while (search < s_.size()) {
      const std::size_t lt = s_.find("</", search);
      if (lt == std::string_view::npos) break;
      if (starts_with_ci(s_, lt, closing)) {
        const std::size_t after = lt + closing.size();
        if (after >= s_.size() || s_[after] == '>' || text::is_space(s_[after]) || s_[after] == '/') {
          end = lt;
          break;
        }
      }
      search = lt + 2;
    }
    const std::size_t stop = end == std::string_view::npos ? s_.size() : end;
    std::string body(s_.substr(pos_, stop - pos_));
    if (is_rcdata(name)) body = normalize_nbsp(decode_entities(body));
    b_.text(std::move(body));
    pos_ = stop;
    if (end != std::string_view::npos) {
      const std::size_t gt = s_.find('>', end);
      pos_ = gt == std::string_view::npos ? s_.size() : gt + 1;
    }
    b_.end_tag(name);
  }

  std::string_view s_;
  TreeBuilder& b_;
  std::size_t pos_ = 0;
};

bool is_valid_utf8(std::string_view s) { return text::sanitize_utf8(s) == s; }

}  // namespace

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '&') {
      const std::size_t used = decode_reference(s, i, out);
      if (used > 0) {
        i += used;
        continue;
      }
    }
    out.push_back(s[i]);
    ++i;
  }
  return out;
}

std::string decode_to_utf8(std::string_view bytes) {
  if (bytes.size() >= 3 && bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
  if (is_valid_utf8(bytes)) return std::string(bytes);
  std::string out;
  out.reserve(bytes.size() + bytes.size() / 4);
  for (char c : bytes) {
    const auto b = static_cast<unsigned char>(c);
    char32_t cp = b;
    if (b >= 0x80 && b <= 0x9F) cp = kCp1252High[b - 0x80] ? kCp1252High[b - 0x80] : 0xFFFD;
    text::append_utf8(out, cp);
  }
  return out;
}

Node parse(std::string_view bytes) {
  const std::string input = decode_to_utf8(bytes);
  TreeBuilder builder;
  Tokenizer tokenizer(input, builder);
  tokenizer.run();
  return builder.finish();
}

}  // namespace policylens::html
