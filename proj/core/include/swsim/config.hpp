#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swsim/dynamics.hpp"
#include "swsim/excitation.hpp"
#include "swsim/graph.hpp"
#include "swsim/switching.hpp"

namespace swsim {

// JSON edges use 1-based agent labels; Edge in memory is 0-based.
struct ScheduleSpec {
  enum class Kind { kExplicit, kSection4d };
  Kind kind = Kind::kSection4d;
  std::vector<SwitchEvent> events;      // kExplicit
  double t_prime = 0.0;                 // kSection4d
  std::optional<double> horizon;        // kSection4d, optional cap

  friend bool operator==(const ScheduleSpec&, const ScheduleSpec&) = default;
};

struct InitialPose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  friend bool operator==(const InitialPose&, const InitialPose&) = default;
};

struct InitSpec {
  enum class Kind { kExplicit, kRandom };
  Kind kind = Kind::kRandom;
  std::vector<InitialPose> states;  // kExplicit
  double bound = 10.0;              // kRandom: uniform in [-bound, bound] per coordinate
  std::uint64_t seed = 0;           // kRandom

  friend bool operator==(const InitSpec&, const InitSpec&) = default;
};

struct IntegratorSpec {
  std::optional<double> step;  // default_step() when absent
  double t0 = 0.0;
  double tf = 150.0;
  friend bool operator==(const IntegratorSpec&, const IntegratorSpec&) = default;
};

// Parameters of the joint-connectivity check. T is always the excitation window.
struct GujcSpec {
  std::optional<double> tau_a;    // default T/6
  std::optional<double> horizon;  // default tf - t0 (at least 2T)
  friend bool operator==(const GujcSpec&, const GujcSpec&) = default;
};

struct ScenarioConfig {
  int n = 0;
  std::map<Mode, std::vector<Edge>> graphs;
  ScheduleSpec schedule;
  ControllerParams controller;
  double excitation_window = 0.0;  // T
  double excitation_period = 0.0;  // T0
  ExcitationProfile::Shape c = ExcitationProfile::Constant{};
  IntegratorSpec integrator;
  InitSpec init;
  GujcSpec gujc;
  std::optional<std::string> output;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Structural parse only; unknown keys and type errors throw ValidationError.
ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& cfg);

// Throws ValidationError naming the first violated invariant. A phase-condition
// failure reports the offending integral and nearest k; `check_phase` = false
// skips that test for deliberate counterexamples.
void validate_config(const ScenarioConfig& cfg, bool check_phase = true);

// Read, parse and validate a JSON scenario file.
ScenarioConfig parse_config(const std::filesystem::path& path);
ScenarioConfig parse_config_text(const std::string& text);
std::string serialize_config(const ScenarioConfig& cfg);

// Four robots, chain family G1={1-2}, G2={2-3}, G3={3-4} with unit weights,
// dwell-time-free schedule with T'=pi, kv=kw=1, c=5, T=pi, T0=3pi,
// random initial poses in [-10, 10], tf=150 s, step 1e-3.
ScenarioConfig default_scenario_config(std::uint64_t seed = 1);

}  // namespace swsim
