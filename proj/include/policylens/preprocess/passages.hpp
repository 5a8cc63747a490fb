#pragma once

#include <vector>

#include "policylens/core/model.hpp"
#include "policylens/html/dom.hpp"

namespace policylens::preprocess {

/// Splits a (simplified) subtree into passages in document order.
///
/// Headings become headline passages; every other run of text directly inside
/// an element becomes one passage typed by that element (li: list_item,
/// td: table_cell, th: table_header, otherwise text; p/div nested in a list
/// item or cell inherit its type). Context, in order:
///  - the chain of enclosing headings, outermost first;
///  - for list items and table cells, the passage emitted just before the
///    enclosing list or table;
///  - for table cells, the column header and the row's first header cell.
/// Blank runs produce no passage.
std::vector<Passage> parse_passages(const html::Node& simplified);

}  // namespace policylens::preprocess
