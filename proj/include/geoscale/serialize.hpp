#pragma once

#include <string>

#include <json.hpp>

#include "geoscale/chart.hpp"
#include "geoscale/metric.hpp"

namespace geoscale {

// Metric files carry version "geoscale-metric-v1", charts
// "geoscale-chart-v1" (with the metric embedded).

nlohmann::json metric_to_json(const MetricField& field);
MetricField metric_from_json(const nlohmann::json& j);

nlohmann::json chart_to_json(const ScaleChart& chart,
                             const SelfTestReport* selftest = nullptr);
ScaleChart chart_from_json(const nlohmann::json& j);

void save_chart_json(const std::string& path, const ScaleChart& chart,
                     const SelfTestReport* selftest = nullptr);
ScaleChart load_chart_json(const std::string& path);

}  // namespace geoscale
