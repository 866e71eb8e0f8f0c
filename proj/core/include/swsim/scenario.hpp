#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swsim/config.hpp"
#include "swsim/diagnostics.hpp"
#include "swsim/integrator.hpp"
#include "swsim/switching.hpp"

namespace swsim {

// Runtime objects built from a validated configuration.
struct Scenario {
  ScenarioConfig config;
  GraphFamily family;
  SwitchSchedule schedule;
  ExcitationProfile profile;
  SwarmState initial;
  double step = 0.0;
  JointGraphParams gujc;
  double gujc_horizon = 0.0;
};

struct BuildOptions {
  // Off only for deliberate counterexamples (e.g. c chosen on the k*pi lattice).
  bool enforce_phase_condition = true;
};

Scenario build_scenario(const ScenarioConfig& cfg, const BuildOptions& opts = {});

// Uniform in [-bound, bound] per coordinate, drawn in the order x, y, theta
// per agent from mt19937_64 with the 53-bit mantissa conversion
// (r >> 11) * 2^-53, so the result is identical on every platform.
SwarmState random_initial_state(int n, double bound, std::uint64_t seed);

struct RunOptions {
  bool diagnostics = true;
  std::size_t energy_windows = 20;
  double threshold = 1e-2;
};

struct RunReport {
  GujcReport gujc;
  std::optional<EpsilonBound> epsilon;
  double final_distance = 0.0;
  double threshold = 1e-2;
  std::optional<double> time_to_threshold;
  std::optional<DecayFit> decay;
  std::vector<EnergyReport> energy_h;
  std::vector<EnergyReport> energy_h1;
  double min_slack_h = 0.0;
  double min_slack_h1 = 0.0;
  std::size_t infinite_bounds = 0;
  // max over window starts s of max_{t >= s} |state(t)| - F(s); <= 0 when bounded as claimed.
  std::optional<double> boundedness_excess;
  WDerivativeCheck w_check;
  std::optional<double> first_window_energy;
  std::optional<double> last_window_energy;
  bool window_energy_decreasing = false;
  std::size_t switch_events = 0;
  std::size_t samples = 0;
  double step = 0.0;
  double t0 = 0.0;
  double tf = 0.0;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
  std::vector<std::string> notes;
};

struct RunResult {
  Trajectory trajectory;
  Channels channels;
  RunReport report;
};

RunResult run(const Scenario& sc, const RunOptions& opts = {});

// Header t,mode,x1,y1,theta1,...,xN,yN,thetaN,dist_omega,W,U,V,h1,h_norm_sq;
// 17 significant digits, LF line endings, every `stride`-th sample plus the last.
void write_csv(std::ostream& out, const Trajectory& traj, const Channels& ch, std::size_t stride = 1);
void write_csv(const std::filesystem::path& path, const Trajectory& traj, const Channels& ch,
               std::size_t stride = 1);

// Non-finite numbers are written as the strings "inf", "-inf" or "nan".
nlohmann::json report_to_json(const RunReport& report);

// build_scenario + run, writing the CSV and report when paths are given.
RunReport run_scenario(const ScenarioConfig& cfg, const std::optional<std::filesystem::path>& csv,
                       const std::optional<std::filesystem::path>& report,
                       const BuildOptions& build = {}, const RunOptions& opts = {});

// Runs independent scenarios in parallel; results are ordered like `configs`.
// Worker count: hardware concurrency, capped by SWSIM_THREADS when set.
std::vector<RunReport> run_batch(const std::vector<ScenarioConfig>& configs,
                                 const BuildOptions& build = {}, const RunOptions& opts = {});

std::size_t batch_threads(std::size_t jobs);

}  // namespace swsim
