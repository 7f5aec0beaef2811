#include "reskit/scenarios.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "reskit/errors.hpp"

namespace reskit {

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.begin()->size());
  Matrix M(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) M(i, j++) = v;
    ++i;
  }
  return M;
}

std::vector<NamedSplit> single_losses(const LinearSystem& sys) {
  std::vector<NamedSplit> out;
  for (std::size_t j = 0; j < sys.actuator_labels.size(); ++j)
    out.push_back({"lost_" + sys.actuator_labels[j], {static_cast<int>(j)}});
  return out;
}

Matrix matrix_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ArgumentError(std::string("scenario: ") + what + " must be a non-empty array of rows");
  const auto r = static_cast<Eigen::Index>(j.size());
  const auto c = static_cast<Eigen::Index>(j[0].size());
  Matrix M(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c)
      throw ArgumentError(std::string("scenario: ragged rows in ") + what);
    for (Eigen::Index k = 0; k < c; ++k) M(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return M;
}

nlohmann::json matrix_to_json(const Matrix& M) {
  auto out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    out.push_back(row);
  }
  return out;
}

Vector vector_from_json(const nlohmann::json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

nlohmann::json vector_to_json(const Vector& v) {
  auto out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

}  // namespace

Scenario admire_scenario() {
  Scenario s;
  s.name = "admire";
  s.system.A = from_rows({
      {-0.02, -4.65, 0.37, 0, -0.3, 0, 0, -9.81, 0},
      {0, -0.78, 0.01, 0, 0.97, 0, 0, 0, 0},
      {0, 0, -0.19, 0.12, 0, -0.98, 0, 0, 0.1},
      {0, 0, -15.47, -1.5, 0, 0.54, 0, 0, 0},
      {0, 4.18, -0.01, 0, -0.78, 0, 0, 0, 0},
      {0, 0, 0.95, -0.09, 0, -0.34, 0, 0, 0},
      {0, 0, 0, 0, 0, 1.01, 0, 0, 0},
      {0, 0, 0, 0, 1, 0, 0, 0, 0},
      {0, 0, 0, 1, 0, 0.12, 0, 0, 0},
  });
  // Stored one actuator per row and transposed below.
  const Matrix BT = from_rows({
      {-0.62, 0, 0, 0.37, 0.67, -0.19, 0, 0, 0},
      {-0.62, 0, 0, -0.37, 0.67, 0.19, 0, 0, 0},
      {-0.4, -0.02, 0, -2.27, -0.55, -0.1, 0, 0, 0},
      {-0.62, -0.04, 0.01, -1.96, -0.88, -0.22, 0, 0, 0},
      {-0.62, -0.04, -0.01, 1.96, -0.88, 0.22, 0, 0, 0},
      {-0.4, -0.02, 0, 2.27, -0.55, 0.1, 0, 0, 0},
      {-0.16, 0, 0.02, 1.59, 0, -0.96, 0, 0, 0},
      {0.08, 0, 0, 0, -0.02, 0, 0, 0, 0},
      {-0.53, 0, 0.11, -0.64, 0.01, -5.34, 0, 0, 0},
      {-1.78, -0.11, 0, 0, -6.63, 0, 0, 0, 0},
  });
  s.system.B_bar = BT.transpose();
  s.system.state_labels = {"v", "alpha", "beta", "p", "q", "r", "psi", "theta", "phi"};
  s.system.state_units = {"m/s", "rad", "rad", "rad/s", "rad/s", "rad/s", "rad", "rad", "rad"};
  s.system.actuator_labels = {"right_canard",          "left_canard",         "right_outboard_elevon",
                              "right_inboard_elevon",  "left_inboard_elevon", "left_outboard_elevon",
                              "rudder",                "leading_edge_flaps",  "yaw_thrust_vectoring",
                              "pitch_thrust_vectoring"};
  s.system.validate();
  s.default_splits = single_losses(s.system);
  s.default_x0 = Vector::Zero(9);
  s.default_target = Vector::Zero(9);
  s.notes = "ADMIRE fighter jet, linearised at Mach 0.3 and 2000 m; inputs scaled to [-1,1] per actuator.";
  return s;
}

Scenario temperature_scenario() {
  const double a = 12.0, mcp = 42186.0;
  const double Ug1 = 6.27, U12 = 5.08, U23 = 5.41, U3g = 6.27;
  const double Q_sl = 200.0, Q_dw = 300.0, Q_hac = 350.0;
  Scenario s;
  s.name = "temperature";
  s.system.A = (a / mcp) * from_rows({
                               {-Ug1 - U12, U12, 0.0},
                               {U12, -U12 - U23, U23},
                               {0.0, U23, -U23 - U3g},
                           });
  Matrix B(3, 7);
  B << Q_sl * Matrix::Identity(3, 3), Q_dw * Matrix::Identity(3, 3), Q_hac * Vector::Ones(3);
  s.system.B_bar = B / mcp;
  s.system.state_labels = {"T1", "T2", "T3"};
  s.system.state_units = {"degC", "degC", "degC"};
  s.system.actuator_labels = {"u_Sl_1", "u_Sl_2", "u_Sl_3", "u_dw_1", "u_dw_2", "u_dw_3", "u_hAC"};
  s.system.validate();
  s.default_splits = single_losses(s.system);
  s.default_x0 = Vector(3);
  s.default_x0 << 0.8, 0.7, 0.9;
  s.default_target = Vector::Zero(3);
  s.notes =
      "Three-room building temperature deviations; conductances in W/K, wall area 12 m^2, heat capacity 42186 J/K.";
  return s;
}

Scenario double_integrator_scenario() {
  Scenario s;
  s.name = "double_integrator";
  s.system.A = from_rows({{0, 1}, {0, 0}});
  s.system.B_bar = from_rows({{0, 0}, {1, 0.5}});
  s.system.state_labels = {"position", "velocity"};
  s.system.state_units = {"m", "m/s"};
  s.system.actuator_labels = {"u1", "u2"};
  s.system.validate();
  s.default_splits = {{"lost_u2", {1}}};
  s.default_x0 = Vector::Zero(2);
  s.default_x0(0) = 1.0;
  s.default_target = Vector::Zero(2);
  s.notes = "Synthetic double integrator with a weaker redundant actuator.";
  return s;
}

ScenarioLibrary ScenarioLibrary::builtin() {
  ScenarioLibrary lib;
  lib.add(admire_scenario());
  lib.add(temperature_scenario());
  lib.add(double_integrator_scenario());
  return lib;
}

void ScenarioLibrary::add(Scenario s) {
  s.system.validate();
  for (const auto& sp : s.default_splits) split_system(s.system, sp.lost);
  const std::string key = s.name;
  items_.insert_or_assign(key, std::move(s));
}

const Scenario& ScenarioLibrary::get(const std::string& name) const {
  auto it = items_.find(name);
  if (it == items_.end()) {
    std::ostringstream os;
    os << "unknown scenario '" << name << "'; available:";
    for (const auto& n : names()) os << ' ' << n;
    throw LookupError(os.str());
  }
  return it->second;
}

std::vector<std::string> ScenarioLibrary::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : items_) out.push_back(k);
  return out;
}

Scenario load_scenario(const std::string& name) { return ScenarioLibrary::builtin().get(name); }

std::vector<std::string> list_scenarios() { return ScenarioLibrary::builtin().names(); }

nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["A"] = matrix_to_json(s.system.A);
  j["B_bar"] = matrix_to_json(s.system.B_bar);
  j["actuator_labels"] = s.system.actuator_labels;
  j["state_labels"] = s.system.state_labels;
  j["units"] = s.system.state_units;
  if (s.default_x0.size()) j["default_x0"] = vector_to_json(s.default_x0);
  if (s.default_target.size()) j["default_target"] = vector_to_json(s.default_target);
  if (!s.default_splits.empty()) {
    auto arr = nlohmann::json::array();
    for (const auto& sp : s.default_splits) {
      std::vector<int> one_based;
      for (int k : sp.lost) one_based.push_back(k + 1);
      arr.push_back({{"name", sp.name}, {"lost", one_based}});
    }
    j["default_splits"] = arr;
  }
  if (!s.notes.empty()) j["notes"] = s.notes;
  return j;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ArgumentError("scenario: top level must be an object");
  for (const char* key : {"name", "A", "B_bar"})
    if (!j.contains(key)) throw ArgumentError(std::string("scenario: missing field '") + key + "'");
  Scenario s;
  try {
    s.name = j.at("name").get<std::string>();
    s.system.A = matrix_from_json(j.at("A"), "A");
    s.system.B_bar = matrix_from_json(j.at("B_bar"), "B_bar");
    if (j.contains("actuator_labels")) s.system.actuator_labels = j["actuator_labels"].get<std::vector<std::string>>();
    if (j.contains("state_labels")) s.system.state_labels = j["state_labels"].get<std::vector<std::string>>();
    if (j.contains("units")) s.system.state_units = j["units"].get<std::vector<std::string>>();
    s.system.validate();
    const auto n = s.system.A.rows();
    s.default_x0 = j.contains("default_x0") ? vector_from_json(j["default_x0"]) : Vector::Zero(n);
    s.default_target = j.contains("default_target") ? vector_from_json(j["default_target"]) : Vector::Zero(n);
    if (s.default_x0.size() != n || s.default_target.size() != n)
      throw DimensionError("scenario: default_x0/default_target length differs from the state dimension");
    if (j.contains("default_splits"))
      for (const auto& sp : j["default_splits"]) {
        NamedSplit ns{sp.at("name").get<std::string>(), {}};
        for (int k : sp.at("lost").get<std::vector<int>>()) ns.lost.push_back(k - 1);
        split_system(s.system, ns.lost);
        s.default_splits.push_back(ns);
      }
    if (j.contains("notes")) s.notes = j["notes"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("scenario: ") + e.what());
  }
  return s;
}

std::vector<int> resolve_actuators(const LinearSystem& sys, const std::string& list) {
  std::vector<int> out;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) throw ArgumentError("empty entry in actuator list '" + list + "'");
    const auto it = std::find(sys.actuator_labels.begin(), sys.actuator_labels.end(), tok);
    if (it != sys.actuator_labels.end()) {
      out.push_back(static_cast<int>(it - sys.actuator_labels.begin()));
      continue;
    }
    if (!std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); }))
      throw LookupError("unknown actuator '" + tok + "'");
    const long k = std::stol(tok);
    if (k < 1 || k > sys.B_bar.cols())
      throw ArgumentError("actuator index " + tok + " out of range 1.." + std::to_string(sys.B_bar.cols()));
    out.push_back(static_cast<int>(k - 1));
  }
  if (out.empty()) throw ArgumentError("empty actuator list");
  return out;
}

}  // namespace reskit
