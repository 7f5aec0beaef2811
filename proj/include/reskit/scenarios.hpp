#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "reskit/resilience.hpp"

namespace reskit {

struct NamedSplit {
  std::string name;
  std::vector<int> lost;  // 0-based
};

struct Scenario {
  std::string name;
  LinearSystem system;
  std::vector<NamedSplit> default_splits;
  Vector default_x0;
  Vector default_target;
  std::string notes;
};

// Named scenarios; the default instance holds the built-in case studies.
class ScenarioLibrary {
 public:
  ScenarioLibrary() = default;
  static ScenarioLibrary builtin();

  void add(Scenario s);
  const Scenario& get(const std::string& name) const;  // LookupError if absent
  std::vector<std::string> names() const;              // sorted

 private:
  std::map<std::string, Scenario> items_;
};

Scenario load_scenario(const std::string& name);
std::vector<std::string> list_scenarios();

Scenario admire_scenario();
Scenario temperature_scenario();
Scenario double_integrator_scenario();

// Scenario JSON: {name, A, B_bar (row-major nested arrays), actuator_labels,
// state_labels, units, optional default_x0/default_target/default_splits/notes}.
nlohmann::json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);

// Resolves "3", "u_dw_1" or "3,u_hAC" (1-based indices or labels) to 0-based columns.
std::vector<int> resolve_actuators(const LinearSystem& sys, const std::string& list);

}  // namespace reskit
