#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "policylens/evaluate/metrics.hpp"

namespace policylens::evaluate {

nlohmann::ordered_json to_json(const MetricsReport& report);

/// Structured report: {"embedder": ..., "reports": [...]}.
nlohmann::ordered_json reports_to_json(const std::vector<MetricsReport>& reports, const std::string& embedder);

/// Fixed-width plain-text tables, one per report.
std::string text_summary(const std::vector<MetricsReport>& reports);

}  // namespace policylens::evaluate
