#include "policylens/evaluate/report.hpp"

#include <cstdio>

namespace policylens::evaluate {

namespace {

nlohmann::ordered_json scores_json(const Scores& s) {
  nlohmann::ordered_json j;
  j["precision"] = s.precision;
  j["recall"] = s.recall;
  j["f1"] = s.f1;
  j["tp_o"] = s.tp_o;
  j["fp"] = s.fp;
  j["tp_gt"] = s.tp_gt;
  j["fn"] = s.fn;
  j["support"] = s.support();
  j["precision_degenerate"] = s.precision_degenerate;
  j["recall_degenerate"] = s.recall_degenerate;
  return j;
}

std::string row(std::string_view name, const Scores& s) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-36.36s %9.3f%s %9.3f%s %9.3f %8zu\n", std::string(name).c_str(), s.precision,
                s.precision_degenerate ? "*" : " ", s.recall, s.recall_degenerate ? "*" : " ", s.f1, s.support());
  return buf;
}

}  // namespace

nlohmann::ordered_json to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["level"] = r.level == Level::Span ? "span" : "label";
  j["layer"] = r.layer;
  if (r.level == Level::Span) {
    j["tau"] = r.tau;
    j["strict_performed"] = r.strict_performed;
  }
  j["passages"] = r.passages;
  j["overall"] = scores_json(r.overall);
  auto per_label = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < kRequirementCount; ++i) {
    auto entry = scores_json(r.per_label[i]);
    entry["label"] = std::string(to_string(requirement_at(i)));
    per_label.push_back(std::move(entry));
  }
  j["per_label"] = std::move(per_label);
  return j;
}

nlohmann::ordered_json reports_to_json(const std::vector<MetricsReport>& reports, const std::string& embedder) {
  nlohmann::ordered_json j;
  j["embedder"] = embedder;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  j["reports"] = std::move(arr);
  return j;
}

std::string text_summary(const std::vector<MetricsReport>& reports) {
  std::string out;
  for (const auto& r : reports) {
    out += (r.level == Level::Span ? "span-level" : "label-level");
    if (!r.layer.empty()) out += ", layer " + r.layer;
    if (r.level == Level::Span) {
      char buf[64];
      std::snprintf(buf, sizeof buf, ", tau %.2f", r.tau);
      out += buf;
      if (r.strict_performed) out += ", strict performed";
    }
    out += ", " + std::to_string(r.passages) + " passages\n";
    char head[160];
    std::snprintf(head, sizeof head, "%-36s %10s %10s %9s %8s\n", "label", "precision", "recall", "f1", "support");
    out += head;
    out += row("overall", r.overall);
    for (std::size_t i = 0; i < kRequirementCount; ++i) out += row(to_string(requirement_at(i)), r.per_label[i]);
    out += "(* no predictions or no ground truth; metric reported as 0)\n\n";
  }
  return out;
}

}  // namespace policylens::evaluate
