#pragma once

#include <string>
#include <vector>

#include "speedup/driver.hpp"

namespace speedup {

// System spec (JSON):
//   {"size": N, "labels": [...], "sigma": [...],
//    "group": {"type": "cyclic", "order": m}
//           | {"type": "table", "order": m, "mul": [[...]], "metric_num": [[...]],
//              "metric_den": d},
//    "base": "cycle"}          // optional; no other base encoding is accepted
// A document with a "system" member (a speedup spec) parses to that member.
// Throws ParseError (with line and field) or ValidationError.
GExtensionSystem ParseSystemSpec(const std::string& text);
GExtensionSystem LoadSystemSpec(const std::string& path);
std::string SerializeSystem(const GExtensionSystem& system);

struct SpeedupSpec {
  GExtensionSystem system;  // the untwisted source
  std::vector<int> exponent;
  std::vector<int> skew;    // sigma^(k) under the twist
  std::vector<int> labels;
  TwistFunction alpha;
  SpeedupTower tower;
};
std::string SerializeSpeedup(const PartialSpeedup& speedup, const std::vector<int>& labels,
                             const TwistFunction& alpha);
SpeedupSpec ParseSpeedupSpec(const std::string& text);

// 12 significant digits, printed through the shortest round-trip form.
double Round12(double v);

// Reports: stable field names, doubles at 12 significant digits, fixed field
// order, trailing newline.
std::string ReportToJson(const ImprovementReport& report);
std::string LogToJson(const ConstructionLog& log);
std::string RefusalToJson(const std::string& kind, const std::string& detail);
std::string MetricsToJson(int n, double distance, int target_names, int source_names);

}  // namespace speedup
