#include "swsim/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "swsim/errors.hpp"

namespace swsim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GraphFamily family_from_config(const ScenarioConfig& cfg) {
  std::map<Mode, WeightedGraph> graphs;
  for (const auto& [mode, edges] : cfg.graphs) {
    graphs.emplace(mode, WeightedGraph::from_edges(cfg.n, edges));
  }
  return GraphFamily(std::move(graphs));
}

SwitchSchedule schedule_from_config(const ScenarioConfig& cfg) {
  if (cfg.schedule.kind == ScheduleSpec::Kind::kSection4d) {
    return SwitchSchedule::section4d(cfg.schedule.t_prime, cfg.schedule.horizon.value_or(kInf));
  }
  return SwitchSchedule::from_events(cfg.schedule.events);
}

SwarmState initial_from_config(const ScenarioConfig& cfg) {
  if (cfg.init.kind == InitSpec::Kind::kRandom) {
    return random_initial_state(cfg.n, cfg.init.bound, cfg.init.seed);
  }
  SwarmState s = SwarmState::zeros(cfg.n);
  for (int i = 0; i < cfg.n; ++i) {
    s.x(i) = cfg.init.states[i].x;
    s.y(i) = cfg.init.states[i].y;
    s.theta(i) = cfg.init.states[i].theta;
  }
  s.validate();
  return s;
}

void append_number(std::string& line, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  line.append(buf, res.ptr);
}

nlohmann::json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

nlohmann::json opt_num(const std::optional<double>& v) {
  return v ? num(*v) : nlohmann::json(nullptr);
}

nlohmann::json energy_json(const EnergyReport& e) {
  return {{"s", num(e.s)},
          {"t", num(e.t)},
          {"integral", num(e.integral)},
          {"bound", num(e.bound)},
          {"slack", num(e.slack)},
          {"fitted_constants", e.fitted_constants}};
}

}  // namespace

SwarmState random_initial_state(int n, double bound, std::uint64_t seed) {
  if (n < 2) throw ValidationError("random_initial_state: n must be at least 2");
  if (!(bound > 0.0) || !std::isfinite(bound)) {
    throw ValidationError("random_initial_state: bound must be positive");
  }
  std::mt19937_64 rng(seed);
  auto draw = [&] {
    const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
    return bound * (2.0 * u - 1.0);
  };
  SwarmState s = SwarmState::zeros(n);
  for (int i = 0; i < n; ++i) {
    s.x(i) = draw();
    s.y(i) = draw();
    s.theta(i) = draw();
  }
  return s;
}

Scenario build_scenario(const ScenarioConfig& cfg, const BuildOptions& opts) {
  validate_config(cfg, opts.enforce_phase_condition);
  Scenario sc{cfg,
              family_from_config(cfg),
              schedule_from_config(cfg),
              ExcitationProfile(cfg.excitation_window, cfg.excitation_period, cfg.c),
              initial_from_config(cfg),
              0.0,
              {},
              0.0};
  sc.step = cfg.integrator.step.value_or(
      default_step(sc.schedule, sc.profile, cfg.integrator.t0, cfg.integrator.tf));
  sc.gujc.window = cfg.excitation_window;
  sc.gujc.tau_a = cfg.gujc.tau_a.value_or(cfg.excitation_window / 6.0);
  sc.gujc.validate();
  sc.gujc_horizon = cfg.gujc.horizon.value_or(
      std::max(cfg.integrator.tf - cfg.integrator.t0, 2.0 * cfg.excitation_window));
  return sc;
}

RunResult run(const Scenario& sc, const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const ScenarioConfig& cfg = sc.config;
  const double t0 = cfg.integrator.t0;
  const double tf = cfg.integrator.tf;

  RunResult out;
  RunReport& rep = out.report;
  rep.threshold = opts.threshold;
  rep.step = sc.step;
  rep.t0 = t0;
  rep.tf = tf;

  rep.gujc = check_gujc(sc.schedule, sc.family, sc.gujc, sc.gujc_horizon);
  if (!rep.gujc.holds) {
    std::ostringstream msg;
    msg << "joint connectivity fails (tau_a=" << sc.gujc.tau_a << ", T=" << sc.gujc.window
        << ") at window start t=" << rep.gujc.witness_t.value_or(rep.gujc.t_begin)
        << "; consensus is not guaranteed";
    rep.warnings.push_back(msg.str());
  }
  try {
    rep.epsilon = epsilon_bound(sc.family, sc.gujc.tau_a);
  } catch (const ValidationError& e) {
    rep.warnings.push_back(e.what());
  }

  out.trajectory = integrate(VectorField::kOriginal, sc.schedule, sc.family, cfg.controller,
                             sc.profile, sc.initial, t0, tf, sc.step);
  const Trajectory& traj = out.trajectory;
  rep.samples = traj.size();
  rep.switch_events = traj.switch_events();

  out.channels = compute_channels(traj, sc.family, cfg.controller);
  const Channels& ch = out.channels;
  rep.final_distance = ch.dist_omega.back();
  rep.time_to_threshold = time_to_threshold(traj, ch, opts.threshold);

  if (cfg.init.kind == InitSpec::Kind::kRandom) {
    rep.notes.push_back("initial poses are seeded-random and the horizon is a chosen default");
  }

  if (opts.diagnostics) {
    try {
      rep.decay = fit_exponential_decay(traj);
    } catch (const ValidationError& e) {
      rep.warnings.push_back(std::string("decay fit unavailable: ") + e.what());
    }

    std::optional<BoundConstants> consts;
    if (rep.decay && rep.decay->b_hat > 0.0) {
      try {
        consts.emplace(sc.family, cfg.controller, sc.profile, rep.decay->a_hat, rep.decay->b_hat);
      } catch (const ValidationError& e) {
        rep.warnings.push_back(std::string("energy bound unavailable: ") + e.what());
      }
    } else if (rep.decay) {
      rep.warnings.push_back("decay fit gave a nonpositive rate; energy bound for h not evaluated");
    }
    if (consts) rep.notes.push_back("energy bound for h uses fitted decay constants (a, b)");

    const std::size_t windows = std::max<std::size_t>(opts.energy_windows, 1);
    rep.min_slack_h = kInf;
    rep.min_slack_h1 = kInf;
    for (std::size_t k = 0; k < windows; ++k) {
      const double s = t0 + (tf - t0) * static_cast<double>(k) / static_cast<double>(windows);
      rep.energy_h1.push_back(output_energy(traj, ch, OutputChannel::kH1, s, tf));
      rep.min_slack_h1 = std::min(rep.min_slack_h1, rep.energy_h1.back().slack);
      if (consts) {
        rep.energy_h.push_back(output_energy(traj, ch, OutputChannel::kH, s, tf, consts, true));
        rep.min_slack_h = std::min(rep.min_slack_h, rep.energy_h.back().slack);
        if (!std::isfinite(rep.energy_h.back().bound)) ++rep.infinite_bounds;
      }
    }

    if (consts) {
      // Suffix maxima of the state norm against F at each window start.
      const auto& times = traj.times();
      std::vector<double> suffix(traj.size());
      double running = 0.0;
      for (std::size_t k = traj.size(); k-- > 0;) {
        running = std::max(running, traj.body(k).stacked().norm());
        suffix[k] = running;
      }
      double excess = -kInf;
      for (const auto& e : rep.energy_h) {
        const std::size_t k = static_cast<std::size_t>(
            std::lower_bound(times.begin(), times.end(), e.s) - times.begin());
        if (k >= traj.size()) continue;
        excess = std::max(excess, suffix[k] - consts->f(traj.body(k)));
      }
      rep.boundedness_excess = excess;
    }

    rep.w_check = check_w_derivative(traj, sc.family, cfg.controller, sc.step);

    if (tf - t0 > sc.profile.period()) {
      const auto series = sliding_window_energy(traj, ch, OutputChannel::kH, sc.profile.period());
      if (!series.empty()) {
        rep.first_window_energy = series.front().second;
        rep.last_window_energy = series.back().second;
        rep.window_energy_decreasing = decreasing_trend(series);
      }
    } else {
      rep.warnings.push_back("horizon shorter than one excitation period; window energy skipped");
    }
  }

  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void write_csv(std::ostream& out, const Trajectory& traj, const Channels& ch, std::size_t stride) {
  if (stride == 0) throw ValidationError("write_csv: stride must be positive");
  const int n = traj.agents();
  std::string line = "t,mode";
  for (int i = 1; i <= n; ++i) {
    const std::string k = std::to_string(i);
    line += ",x" + k + ",y" + k + ",theta" + k;
  }
  line += ",dist_omega,W,U,V,h1,h_norm_sq\n";
  out << line;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (k % stride != 0 && k + 1 != traj.size()) continue;
    line.clear();
    append_number(line, traj.time(k));
    line += ',';
    line += std::to_string(traj.mode(k));
    const SwarmState s = traj.world(k);
    for (int i = 0; i < n; ++i) {
      for (double v : {s.x(i), s.y(i), s.theta(i)}) {
        line += ',';
        append_number(line, v);
      }
    }
    for (double v : {ch.dist_omega[k], ch.W[k], ch.U[k], ch.V[k], ch.h1[k], ch.h_norm_sq[k]}) {
      line += ',';
      append_number(line, v);
    }
    line += '\n';
    out << line;
  }
}

void write_csv(const std::filesystem::path& path, const Trajectory& traj, const Channels& ch,
               std::size_t stride) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  write_csv(out, traj, ch, stride);
  if (!out) throw RuntimeFailure("write failed: " + path.string());
}

nlohmann::json report_to_json(const RunReport& r) {
  nlohmann::json j;
  j["gujc"] = {{"holds", r.gujc.holds},
               {"tau_a", num(r.gujc.tau_a)},
               {"T", num(r.gujc.window)},
               {"t_begin", num(r.gujc.t_begin)},
               {"t_end", num(r.gujc.t_end)},
               {"grid_points", r.gujc.grid_points},
               {"witness_t", opt_num(r.gujc.witness_t)}};
  if (r.epsilon) {
    j["epsilon"] = {{"epsilon", num(r.epsilon->epsilon)},
                    {"epsilon_prime", num(r.epsilon->epsilon_prime)},
                    {"argmin", r.epsilon->argmin},
                    {"connected_subsets", r.epsilon->connected_subsets}};
  } else {
    j["epsilon"] = nullptr;
  }
  j["final_distance"] = num(r.final_distance);
  j["threshold"] = num(r.threshold);
  j["time_to_threshold"] = opt_num(r.time_to_threshold);
  if (r.decay) {
    j["decay_fit"] = {{"a_hat", num(r.decay->a_hat)},
                      {"b_hat", num(r.decay->b_hat)},
                      {"residual", num(r.decay->residual)},
                      {"samples", r.decay->samples},
                      {"converged", r.decay->converged}};
  } else {
    j["decay_fit"] = nullptr;
  }
  nlohmann::json eh = nlohmann::json::array();
  for (const auto& e : r.energy_h) eh.push_back(energy_json(e));
  nlohmann::json eh1 = nlohmann::json::array();
  for (const auto& e : r.energy_h1) eh1.push_back(energy_json(e));
  j["energy"] = {{"h", eh},
                 {"h1", eh1},
                 {"min_slack_h", num(r.min_slack_h)},
                 {"min_slack_h1", num(r.min_slack_h1)},
                 {"infinite_bounds", r.infinite_bounds},
                 {"boundedness_excess", opt_num(r.boundedness_excess)}};
  j["w_check"] = {{"max_error", num(r.w_check.max_error)},
                  {"max_increase", num(r.w_check.max_increase)},
                  {"intervals", r.w_check.intervals}};
  j["window_energy"] = {{"first", opt_num(r.first_window_energy)},
                        {"last", opt_num(r.last_window_energy)},
                        {"decreasing", r.window_energy_decreasing}};
  j["switch_events"] = r.switch_events;
  j["samples"] = r.samples;
  j["step"] = num(r.step);
  j["t0"] = num(r.t0);
  j["tf"] = num(r.tf);
  j["wall_seconds"] = num(r.wall_seconds);
  j["warnings"] = r.warnings;
  j["notes"] = r.notes;
  return j;
}

RunReport run_scenario(const ScenarioConfig& cfg, const std::optional<std::filesystem::path>& csv,
                       const std::optional<std::filesystem::path>& report,
                       const BuildOptions& build, const RunOptions& opts) {
  const Scenario sc = build_scenario(cfg, build);
  RunResult res = run(sc, opts);
  if (csv) write_csv(*csv, res.trajectory, res.channels);
  if (report) {
    if (report->has_parent_path()) std::filesystem::create_directories(report->parent_path());
    std::ofstream out(*report, std::ios::binary);
    if (!out) throw RuntimeFailure("cannot write " + report->string());
    out << report_to_json(res.report).dump(2) << '\n';
  }
  return std::move(res.report);
}

std::size_t batch_threads(std::size_t jobs) {
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SWSIM_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) {
      threads = std::min(threads, static_cast<std::size_t>(cap));
    }
  }
  return std::max<std::size_t>(1, std::min(threads, jobs));
}

std::vector<RunReport> run_batch(const std::vector<ScenarioConfig>& configs,
                                 const BuildOptions& build, const RunOptions& opts) {
  std::vector<RunReport> reports(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < configs.size(); k = next++) {
      try {
        reports[k] = run(build_scenario(configs[k], build), opts).report;
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t threads = batch_threads(configs.size());
  for (std::size_t k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return reports;
}

}  // namespace swsim
