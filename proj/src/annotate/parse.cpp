#include "policylens/annotate/parse.hpp"

#include <nlohmann/json.hpp>

#include "policylens/core/error.hpp"
#include "policylens/core/labels.hpp"

namespace policylens::annotate {

namespace {

// End of the bracketed value starting at raw[open], or npos when unbalanced.
std::size_t matching_bracket(std::string_view raw, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < raw.size(); ++i) {
    const char c = raw[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '[' || c == '{') {
      ++depth;
    } else if (c == ']' || c == '}') {
      if (--depth == 0) return c == ']' ? i : std::string_view::npos;
    }
  }
  return std::string_view::npos;
}

}  // namespace

std::string extract_json_array(std::string_view raw) {
  for (std::size_t open = raw.find('['); open != std::string_view::npos; open = raw.find('[', open + 1)) {
    const std::size_t close = matching_bracket(raw, open);
    if (close == std::string_view::npos) continue;
    std::string candidate(raw.substr(open, close - open + 1));
    if (nlohmann::json::accept(candidate)) return candidate;
  }
  return {};
}

ParsedAnnotations parse_llm_annotations(std::string_view raw, std::string_view passage_text) {
  const std::string array_text = extract_json_array(raw);
  if (array_text.empty()) throw Error(ErrorCode::Unparseable, "no JSON array in model reply");
  const auto items = nlohmann::json::parse(array_text);

  ParsedAnnotations out;
  for (const auto& item : items) {
    auto drop = [&](std::string reason) { out.dropped.push_back({item.dump(), std::move(reason)}); };
    if (!item.is_object()) {
      drop("item is not an object");
      continue;
    }
    const auto req = item.find("requirement");
    const auto value = item.find("value");
    const auto performed = item.find("performed");
    if (req == item.end() || !req->is_string()) {
      drop("missing or non-string requirement");
      continue;
    }
    const auto label = requirement_from_string(req->get<std::string>());
    if (!label) {
      drop("unknown requirement '" + req->get<std::string>() + "'");
      continue;
    }
    if (value == item.end() || !value->is_string()) {
      drop("missing or non-string value");
      continue;
    }
    if (performed == item.end() || !performed->is_boolean()) {
      drop("missing or non-boolean performed");
      continue;
    }
    Annotation a{value->get<std::string>(), *label, performed->get<bool>()};
    if (auto problem = annotation_problem(a, passage_text)) {
      drop(*problem);
      continue;
    }
    out.annotations.insert(std::move(a));
  }
  return out;
}

}  // namespace policylens::annotate
