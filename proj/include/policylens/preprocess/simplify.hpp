#pragma once

#include <vector>

#include "policylens/core/model.hpp"
#include "policylens/html/dom.hpp"

namespace policylens::preprocess {

/// Reduces a main-content subtree to a pseudo-HTML skeleton:
///  - hidden elements and comments are dropped;
///  - inline elements are unwrapped into their parent, br becomes a space;
///  - attributes are dropped except colspan/rowspan on table cells;
///  - tags outside {div, p, h1-h6, ul, ol, li, table, thead, tbody, tfoot,
///    tr, td, th} become div;
///  - whitespace runs collapse to one space, whitespace-only text is dropped;
///  - a div with exactly one element child and no text is replaced by that child.
/// Idempotent.
html::Node simplify_html(const html::Node& subtree);

}  // namespace policylens::preprocess
