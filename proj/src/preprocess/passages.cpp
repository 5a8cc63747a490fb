#include "policylens/preprocess/passages.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "policylens/util/text.hpp"

namespace policylens::preprocess {

namespace {

ContextTag tag_for(std::string_view name) {
  if (auto t = context_tag_from_string(name)) return *t;
  return ContextTag::Div;
}

/// Column and row header text for every cell of one table.
struct TableHeaders {
  struct Entry {
    std::optional<ContextElement> column;
    std::optional<ContextElement> row;
  };
  std::map<const html::Node*, Entry> cells;
};

void collect_rows(const html::Node& node, std::vector<const html::Node*>& rows) {
  for (const auto& child : node.children) {
    if (child.is_element("tr")) {
      rows.push_back(&child);
    } else if (child.is_element("thead") || child.is_element("tbody") || child.is_element("tfoot")) {
      collect_rows(child, rows);
    }
  }
}

std::size_t span_attr(const html::Node& cell, std::string_view key) {
  if (auto v = cell.attribute(key)) {
    try {
      const long n = std::stol(std::string(*v));
      if (n >= 1 && n <= 100) return static_cast<std::size_t>(n);
    } catch (...) {
    }
  }
  return 1;
}

TableHeaders build_headers(const html::Node& table) {
  std::vector<const html::Node*> rows;
  collect_rows(table, rows);

  // grid[r][c] = cell covering that slot (colspan/rowspan expanded)
  std::vector<std::vector<const html::Node*>> grid(rows.size());
  std::map<const html::Node*, std::pair<std::size_t, std::size_t>> origin;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::size_t c = 0;
    for (const auto& cell : rows[r]->children) {
      if (!cell.is_element("td") && !cell.is_element("th")) continue;
      while (c < grid[r].size() && grid[r][c] != nullptr) ++c;
      origin[&cell] = {r, c};
      const std::size_t cs = span_attr(cell, "colspan");
      const std::size_t rs = span_attr(cell, "rowspan");
      for (std::size_t dr = 0; dr < rs && r + dr < rows.size(); ++dr) {
        auto& row = grid[r + dr];
        if (row.size() < c + cs) row.resize(c + cs, nullptr);
        for (std::size_t dc = 0; dc < cs; ++dc) {
          if (row[c + dc] == nullptr) row[c + dc] = &cell;
        }
      }
      c += cs;
    }
  }

  auto header_element = [](const html::Node* th) -> std::optional<ContextElement> {
    std::string t = html::visible_text(*th);
    if (t.empty()) return std::nullopt;
    return ContextElement{std::move(t), ContextTag::Th};
  };

  TableHeaders headers;
  for (const auto& [cell, pos] : origin) {
    if (!cell->is_element("td")) continue;
    const auto [r, c] = pos;
    TableHeaders::Entry entry;
    for (std::size_t up = r; up-- > 0;) {
      if (c < grid[up].size() && grid[up][c] != nullptr && grid[up][c]->is_element("th")) {
        entry.column = header_element(grid[up][c]);
        break;
      }
    }
    for (std::size_t left = 0; left < c && left < grid[r].size(); ++left) {
      const html::Node* h = grid[r][left];
      if (h != nullptr && h->is_element("th")) {
        entry.row = header_element(h);
        break;
      }
    }
    headers.cells[cell] = std::move(entry);
  }
  return headers;
}

class PassageWalker {
 public:
  std::vector<Passage> take() { return std::move(out_); }

  struct State {
    std::optional<ElementType> inherited;
    std::optional<ContextElement> list_preceding;
    std::vector<ContextElement> cell_headers;
    const TableHeaders* table = nullptr;
  };

  void visit(const html::Node& node, const State& st) {
    if (node.kind == html::NodeKind::Document) {
      walk_children(node, ElementType::Text, ContextTag::Div, st);
      return;
    }
    if (!node.is_element()) return;
    const auto cls = html::classify_tag(node.name);
    if (cls == html::TagClass::Hidden) return;

    if (const int level = html::heading_level(node.name); level > 0) {
      emit_heading(node, level);
      return;
    }

    State next = st;
    ElementType type = st.inherited.value_or(ElementType::Text);
    ContextTag tag = tag_for(node.name);
    if (node.name == "li") {
      type = ElementType::ListItem;
      next.inherited = type;
    } else if (node.name == "td") {
      type = ElementType::TableCell;
      next.inherited = type;
      next.cell_headers.clear();
      if (st.table != nullptr) {
        if (auto it = st.table->cells.find(&node); it != st.table->cells.end()) {
          if (it->second.column) next.cell_headers.push_back(*it->second.column);
          if (it->second.row) next.cell_headers.push_back(*it->second.row);
        }
      }
    } else if (node.name == "th") {
      type = ElementType::TableHeader;
      next.inherited = type;
    } else if (node.name == "ul" || node.name == "ol") {
      next.list_preceding = last_;
    } else if (node.name == "table") {
      next.list_preceding = last_;
      tables_.push_back(std::make_unique<TableHeaders>(build_headers(node)));
      next.table = tables_.back().get();
      next.inherited.reset();
    }
    walk_children(node, type, tag, next);
  }

 private:
  void walk_children(const html::Node& node, ElementType type, ContextTag tag, const State& st) {
    std::string run;
    for (const auto& child : node.children) {
      if (child.is_text()) {
        run += child.text;
        continue;
      }
      if (!child.is_element()) continue;
      const auto cls = html::classify_tag(child.name);
      if (cls == html::TagClass::Inline) {
        run += html::visible_text(child);
        continue;
      }
      if (cls == html::TagClass::LineBreak) {
        run += ' ';
        continue;
      }
      flush(run, type, tag, st);
      visit(child, st);
    }
    flush(run, type, tag, st);
  }

  void flush(std::string& run, ElementType type, ContextTag tag, const State& st) {
    std::string text(text::trim(text::collapse_whitespace(run)));
    run.clear();
    if (text.empty()) return;
    Passage p;
    p.id = passage_id_for(out_.size());
    p.type = type;
    p.text = std::move(text);
    for (const auto& [level, h] : headings_) p.context.push_back(h);
    auto add = [&](const ContextElement& c) {
      if (std::find(p.context.begin(), p.context.end(), c) == p.context.end()) p.context.push_back(c);
    };
    if ((type == ElementType::ListItem || type == ElementType::TableCell) && st.list_preceding) {
      add(*st.list_preceding);
    }
    if (type == ElementType::TableCell) {
      for (const auto& h : st.cell_headers) add(h);
    }
    last_ = ContextElement{p.text, tag};
    out_.push_back(std::move(p));
  }

  void emit_heading(const html::Node& node, int level) {
    std::string text = html::visible_text(node);
    if (text.empty()) return;
    Passage p;
    p.id = passage_id_for(out_.size());
    p.type = ElementType::Headline;
    p.text = text;
    for (const auto& [l, h] : headings_) {
      if (l < level) p.context.push_back(h);
    }
    while (!headings_.empty() && headings_.back().first >= level) headings_.pop_back();
    ContextElement self{std::move(text), tag_for(node.name)};
    headings_.emplace_back(level, self);
    last_ = std::move(self);
    out_.push_back(std::move(p));
  }

  std::vector<Passage> out_;
  std::vector<std::pair<int, ContextElement>> headings_;
  std::optional<ContextElement> last_;
  std::vector<std::unique_ptr<TableHeaders>> tables_;
};

}  // namespace

std::vector<Passage> parse_passages(const html::Node& simplified) {
  PassageWalker walker;
  walker.visit(simplified, {});
  return walker.take();
}

}  // namespace policylens::preprocess
