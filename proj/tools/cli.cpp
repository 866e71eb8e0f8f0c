#include "cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "swsim/config.hpp"
#include "swsim/errors.hpp"
#include "swsim/scenario.hpp"
#include "swsim/selftest.hpp"

namespace swsim::cli {
namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "none"; }

ScenarioConfig read_structural(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: JSON syntax error: ") + e.what());
  }
  return config_from_json(j);
}

void print_summary(std::ostream& out, const RunReport& r) {
  out << "gujc: " << (r.gujc.holds ? "holds" : "fails") << " (tau_a=" << fmt(r.gujc.tau_a)
      << ", T=" << fmt(r.gujc.window) << ")\n";
  out << "epsilon: " << (r.epsilon ? fmt(r.epsilon->epsilon) : "none") << "\n";
  out << "final_distance: " << fmt(r.final_distance) << "\n";
  out << "time_to_threshold: " << fmt(r.time_to_threshold) << "\n";
  if (r.decay) out << "decay_fit: a=" << fmt(r.decay->a_hat) << " b=" << fmt(r.decay->b_hat) << "\n";
  out << "switch_events: " << r.switch_events << "\n";
  out << "samples: " << r.samples << "\n";
  out << "wall_seconds: " << fmt(r.wall_seconds) << "\n";
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
}

int print_selftest(std::ostream& out, const std::vector<SelftestLine>& lines) {
  for (const auto& l : lines) {
    out << (l.pass ? "PASS " : "FAIL ") << l.name << " (" << l.detail << ")\n";
  }
  return all_passed(lines) ? 0 : 2;
}

int simulate(std::ostream& out, const std::string& path, std::optional<std::string> csv,
             std::optional<std::string> report) {
  const ScenarioConfig cfg = parse_config(path);
  const fs::path csv_path = csv ? fs::path(*csv)
                                : fs::path(cfg.output.value_or(fs::path(path).stem().string() + ".csv"));
  const fs::path report_path = report ? fs::path(*report) : fs::path(csv_path).replace_extension(".report.json");
  const RunReport r = run_scenario(cfg, csv_path, report_path);
  print_summary(out, r);
  out << "csv: " << csv_path.string() << "\nreport: " << report_path.string() << "\n";
  return 0;
}

int check_gujc_cmd(std::ostream& out, const std::string& path, std::optional<double> horizon) {
  ScenarioConfig cfg = parse_config(path);
  if (horizon) cfg.gujc.horizon = *horizon;
  const Scenario sc = build_scenario(cfg);
  const GujcReport r = check_gujc(sc.schedule, sc.family, sc.gujc, sc.gujc_horizon);
  out << "holds: " << (r.holds ? "true" : "false") << "\n";
  out << "tau_a: " << fmt(r.tau_a) << "\nT: " << fmt(r.window) << "\n";
  out << "horizon: " << fmt(sc.gujc_horizon) << "\n";
  out << "window_starts: [" << fmt(r.t_begin) << ", " << fmt(r.t_end) << "]\n";
  out << "grid_points: " << r.grid_points << "\n";
  if (r.witness_t) out << "witness_t: " << fmt(*r.witness_t) << "\n";
  return 0;
}

int epsilon_cmd(std::ostream& out, const std::string& path) {
  const Scenario sc = build_scenario(parse_config(path));
  const EpsilonBound e = epsilon_bound(sc.family, sc.gujc.tau_a);
  out << "epsilon: " << fmt(e.epsilon) << "\nepsilon_prime: " << fmt(e.epsilon_prime)
      << "\ntau_a: " << fmt(sc.gujc.tau_a) << "\nargmin:";
  for (Mode m : e.argmin) out << " " << m;
  out << "\nconnected_subsets: " << e.connected_subsets << "\n";
  return 0;
}

int phase_check_cmd(std::ostream& out, const std::string& path) {
  const ScenarioConfig cfg = read_structural(path);
  validate_config(cfg, false);
  const ExcitationProfile prof(cfg.excitation_window, cfg.excitation_period, cfg.c);
  const PhaseCheck p = check_phase_condition(prof);
  out << "ok: " << (p.ok ? "true" : "false") << "\n";
  out << "integral: " << fmt(p.integral) << " (" << fmt(p.integral / std::numbers::pi) << " pi)\n";
  out << "nearest_k: " << p.nearest_k << "\ndistance: " << fmt(p.distance) << "\n";
  return p.ok ? 0 : 1;
}

int reproduce(std::ostream& out, double t_prime, const std::string& dir, int seeds,
              std::uint64_t first_seed, std::optional<double> tf, std::optional<double> step) {
  if (!(t_prime > 0.0)) throw ValidationError("--t-prime must be positive");
  if (seeds < 1) throw ValidationError("--seeds must be at least 1");
  std::vector<ScenarioConfig> configs;
  for (int k = 0; k < seeds; ++k) {
    ScenarioConfig cfg = default_scenario_config(first_seed + static_cast<std::uint64_t>(k));
    cfg.schedule.t_prime = t_prime;
    cfg.excitation_window = t_prime;
    cfg.excitation_period = 3.0 * t_prime;
    cfg.gujc.tau_a = t_prime / 6.0;
    if (tf) cfg.integrator.tf = *tf;
    if (step) cfg.integrator.step = *step;
    validate_config(cfg);
    configs.push_back(std::move(cfg));
  }
  fs::create_directories(dir);

  std::vector<RunReport> reports(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < configs.size(); k = next++) {
      try {
        const std::string tag = "seed" + std::to_string(configs[k].init.seed);
        std::ofstream(fs::path(dir) / ("config_" + tag + ".json")) << serialize_config(configs[k]);
        reports[k] = run_scenario(configs[k], fs::path(dir) / ("trajectory_" + tag + ".csv"),
                                  fs::path(dir) / ("report_" + tag + ".json"));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < batch_threads(configs.size()); ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  int converged = 0;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& r = reports[k];
    if (r.time_to_threshold) ++converged;
    out << "seed " << configs[k].init.seed << ": time_to_threshold=" << fmt(r.time_to_threshold)
        << " final_distance=" << fmt(r.final_distance) << " switch_events=" << r.switch_events
        << " wall_seconds=" << fmt(r.wall_seconds) << "\n";
    for (const auto& w : r.warnings) out << "  warning: " << w << "\n";
  }
  out << "converged: " << converged << "/" << reports.size() << "\n";
  out << "output: " << dir << "\n";
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Consensus simulator for unicycle swarms under switching topologies", "swsim"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::string> csv;
  std::optional<std::string> report;
  auto* sim = app.add_subcommand("simulate", "Run a scenario and write CSV and report");
  sim->add_option("config", config, "Scenario JSON")->required();
  sim->add_option("--csv", csv, "Trajectory CSV path (default: config output or <stem>.csv)");
  sim->add_option("--report", report, "Report JSON path (default: next to the CSV)");

  std::optional<double> horizon;
  auto* gujc = app.add_subcommand("check-gujc", "Check joint connectivity of the schedule");
  gujc->add_option("config", config, "Scenario JSON")->required();
  gujc->add_option("--horizon", horizon, "Horizon in seconds");

  auto* eps = app.add_subcommand("epsilon", "Connectivity bound of the graph family");
  eps->add_option("config", config, "Scenario JSON")->required();

  auto* phase = app.add_subcommand("phase-check", "Check the excitation phase condition");
  phase->add_option("config", config, "Scenario JSON")->required();

  double t_prime = std::numbers::pi;
  std::string dir = "reproduce_4d";
  int seeds = 1;
  std::uint64_t first_seed = 1;
  std::optional<double> tf;
  std::optional<double> step;
  auto* repro = app.add_subcommand("reproduce-4d", "Run the four-robot dwell-time-free scenario");
  repro->add_option("--t-prime", t_prime, "Schedule period T'");
  repro->add_option("--out", dir, "Output directory");
  repro->add_option("--seeds", seeds, "Number of seeds");
  repro->add_option("--first-seed", first_seed, "First seed");
  repro->add_option("--tf", tf, "Final time");
  repro->add_option("--step", step, "Integrator step");

  auto* gron = app.add_subcommand("gronwall-selftest", "Grönwall inequality checks");
  auto* lemma = app.add_subcommand("lemma-selftest", "Laplacian identity and connectivity checks");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (sim->parsed()) return simulate(out, config, csv, report);
    if (gujc->parsed()) return check_gujc_cmd(out, config, horizon);
    if (eps->parsed()) return epsilon_cmd(out, config);
    if (phase->parsed()) return phase_check_cmd(out, config);
    if (repro->parsed()) return reproduce(out, t_prime, dir, seeds, first_seed, tf, step);
    if (gron->parsed()) return print_selftest(out, gronwall_selftest());
    if (lemma->parsed()) return print_selftest(out, lemma_selftest());
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return 2;
  }
  err << app.help();
  return 1;
}

int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return dispatch(args, out, err);
}

}  // namespace swsim::cli
