#include "policylens/core/schema.hpp"

#include <array>
#include <initializer_list>

#include "policylens/core/error.hpp"
#include "policylens/util/text.hpp"

namespace policylens::schema {

namespace {

void reject_unknown_fields(const Json& obj, const std::string& path,
                           std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw SchemaViolation(path + "." + key, "unknown field");
  }
}

const Json& require_field(const Json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaViolation(path + "." + key, "required field missing");
  return *it;
}

const std::string& require_string(const Json& value, const std::string& path) {
  if (!value.is_string()) throw SchemaViolation(path, "expected string");
  return value.get_ref<const std::string&>();
}

void require_object(const Json& value, const std::string& path) {
  if (!value.is_object()) throw SchemaViolation(path, "expected object");
}

void require_array(const Json& value, const std::string& path) {
  if (!value.is_array()) throw SchemaViolation(path, "expected array");
}

std::string indexed(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

}  // namespace

Json annotations_to_json(const AnnotationSet& annotations) {
  Json arr = Json::array();
  for (const auto& a : annotations) {
    Json item = Json::object();
    item["requirement"] = std::string(to_string(a.label));
    item["value"] = a.span;
    item["performed"] = a.performed;
    arr.push_back(std::move(item));
  }
  return arr;
}

Json passage_to_json(const AnnotatedPassage& ap, bool include_annotations) {
  Json item = Json::object();
  item["type"] = std::string(to_string(ap.passage.type));
  Json context = Json::array();
  for (const auto& c : ap.passage.context) {
    Json el = Json::object();
    el["text"] = c.text;
    el["type"] = std::string(to_string(c.tag));
    context.push_back(std::move(el));
  }
  item["context"] = std::move(context);
  item["passage"] = ap.passage.text;
  if (include_annotations) item["annotations"] = annotations_to_json(ap.annotations);
  return item;
}

Json document_to_json(const PolicyDocument& document) {
  Json arr = Json::array();
  for (const auto& p : document.passages) arr.push_back(passage_to_json(p));
  return arr;
}

std::string dump(const Json& json) {
  return json.dump(2, ' ', false, Json::error_handler_t::replace);
}

std::string serialize_policy(const PolicyDocument& document) {
  return dump(document_to_json(document)) + "\n";
}

AnnotationSet annotations_from_json(const Json& json, const std::string& path,
                                    std::string_view passage_text) {
  require_array(json, path);
  AnnotationSet out;
  for (std::size_t j = 0; j < json.size(); ++j) {
    const std::string apath = indexed(path, j);
    const Json& item = json[j];
    require_object(item, apath);
    reject_unknown_fields(item, apath, {"requirement", "value", "performed"});
    const auto& req = require_string(require_field(item, apath, "requirement"),
                                     apath + ".requirement");
    const auto& value = require_string(require_field(item, apath, "value"), apath + ".value");
    const Json& performed = require_field(item, apath, "performed");
    if (!performed.is_boolean()) throw SchemaViolation(apath + ".performed", "expected boolean");
    const auto label = requirement_from_string(req);
    if (!label) {
      throw SchemaViolation(apath + ".requirement", "unknown transparency requirement '" + req + "'");
    }
    Annotation a{value, *label, performed.get<bool>()};
    if (auto problem = annotation_problem(a, passage_text)) {
      throw SchemaViolation(apath + ".value", *problem);
    }
    out.insert(std::move(a));
  }
  return out;
}

AnnotatedPassage passage_from_json(const Json& item, const std::string& path,
                                   bool require_annotations) {
  require_object(item, path);
  reject_unknown_fields(item, path, {"type", "context", "passage", "annotations"});

  AnnotatedPassage ap;
  const auto& type = require_string(require_field(item, path, "type"), path + ".type");
  const auto et = element_type_from_string(type);
  if (!et) throw SchemaViolation(path + ".type", "value '" + type + "' not in enum");
  ap.passage.type = *et;

  const Json& context = require_field(item, path, "context");
  require_array(context, path + ".context");
  for (std::size_t k = 0; k < context.size(); ++k) {
    const std::string cpath = indexed(path + ".context", k);
    const Json& el = context[k];
    require_object(el, cpath);
    reject_unknown_fields(el, cpath, {"text", "type"});
    const auto& ctext = require_string(require_field(el, cpath, "text"), cpath + ".text");
    const auto& ctype = require_string(require_field(el, cpath, "type"), cpath + ".type");
    const auto tag = context_tag_from_string(ctype);
    if (!tag) throw SchemaViolation(cpath + ".type", "value '" + ctype + "' not in enum");
    if (text::trim(ctext).empty()) throw SchemaViolation(cpath + ".text", "empty context text");
    ap.passage.context.push_back({ctext, *tag});
  }

  ap.passage.text = require_string(require_field(item, path, "passage"), path + ".passage");
  if (text::trim(ap.passage.text).empty()) {
    throw SchemaViolation(path + ".passage", "empty passage text");
  }

  if (require_annotations || item.contains("annotations")) {
    ap.annotations = annotations_from_json(require_field(item, path, "annotations"),
                                           path + ".annotations", ap.passage.text);
  }
  return ap;
}

PolicyDocument policy_from_json(const Json& json, std::string policy_id) {
  if (!json.is_array()) throw SchemaViolation("$", "expected array of passages");
  PolicyDocument doc;
  doc.policy_id = std::move(policy_id);
  doc.passages.reserve(json.size());
  for (std::size_t i = 0; i < json.size(); ++i) {
    auto ap = passage_from_json(json[i], indexed("items", i));
    ap.passage.id = passage_id_for(i);
    doc.passages.push_back(std::move(ap));
  }
  return doc;
}

PolicyDocument parse_policy(std::string_view bytes, std::string policy_id) {
  Json json;
  try {
    json = Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::parse_error& e) {
    throw SchemaViolation("$", std::string("malformed JSON: ") + e.what());
  }
  return policy_from_json(json, std::move(policy_id));
}

}  // namespace policylens::schema
