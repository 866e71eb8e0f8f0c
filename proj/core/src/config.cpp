#include "swsim/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "swsim/errors.hpp"

namespace swsim {
namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) throw ValidationError(where + ": unknown key '" + item.key() + "'");
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(where + ": missing key '" + key + "'");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ValidationError(where + ": expected a number");
  return v.get<double>();
}

double number_at(const json& obj, const char* key, const std::string& where) {
  return number(require(obj, key, where), where + "." + key);
}

std::optional<double> optional_number(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  return number(*it, where + "." + key);
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ValidationError(where + ": expected an integer");
  return v.get<int>();
}

std::string string_at(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) throw ValidationError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> number_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw ValidationError(where + ": expected an array");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    out.push_back(number(v[k], where + "[" + std::to_string(k) + "]"));
  }
  return out;
}

Mode parse_mode_key(const std::string& key) {
  std::size_t used = 0;
  int mode = 0;
  try {
    mode = std::stoi(key, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != key.size() || key.empty()) {
    throw ValidationError("graphs: mode key '" + key + "' is not an integer");
  }
  return mode;
}

}  // namespace

ScenarioConfig config_from_json(const json& j) {
  check_keys(j, {"n", "graphs", "schedule", "controller", "excitation", "integrator", "init", "gujc",
                 "output"},
             "config");
  ScenarioConfig cfg;
  cfg.n = integer(require(j, "n", "config"), "config.n");

  const json& graphs = require(j, "graphs", "config");
  if (!graphs.is_object()) throw ValidationError("graphs: expected an object of mode -> edge list");
  for (const auto& item : graphs.items()) {
    const Mode mode = parse_mode_key(item.key());
    const std::string where = "graphs." + item.key();
    if (!item.value().is_array()) throw ValidationError(where + ": expected an edge list");
    std::vector<Edge> edges;
    for (std::size_t k = 0; k < item.value().size(); ++k) {
      const json& e = item.value()[k];
      const std::string ew = where + "[" + std::to_string(k) + "]";
      check_keys(e, {"i", "j", "w"}, ew);
      Edge edge;
      edge.i = integer(require(e, "i", ew), ew + ".i") - 1;
      edge.j = integer(require(e, "j", ew), ew + ".j") - 1;
      edge.w = e.contains("w") ? number(e["w"], ew + ".w") : 1.0;
      edges.push_back(edge);
    }
    cfg.graphs.emplace(mode, std::move(edges));
  }

  const json& sched = require(j, "schedule", "config");
  const std::string kind = string_at(sched, "kind", "schedule");
  if (kind == "explicit") {
    check_keys(sched, {"kind", "events"}, "schedule");
    cfg.schedule.kind = ScheduleSpec::Kind::kExplicit;
    const json& events = require(sched, "events", "schedule");
    if (!events.is_array()) throw ValidationError("schedule.events: expected an array");
    for (std::size_t k = 0; k < events.size(); ++k) {
      const std::string ew = "schedule.events[" + std::to_string(k) + "]";
      check_keys(events[k], {"t", "mode"}, ew);
      cfg.schedule.events.push_back(
          {number_at(events[k], "t", ew), integer(require(events[k], "mode", ew), ew + ".mode")});
    }
  } else if (kind == "section4d") {
    check_keys(sched, {"kind", "t_prime", "horizon"}, "schedule");
    cfg.schedule.kind = ScheduleSpec::Kind::kSection4d;
    cfg.schedule.t_prime = number_at(sched, "t_prime", "schedule");
    cfg.schedule.horizon = optional_number(sched, "horizon", "schedule");
  } else {
    throw ValidationError("schedule.kind: expected 'explicit' or 'section4d', got '" + kind + "'");
  }

  const json& ctrl = require(j, "controller", "config");
  check_keys(ctrl, {"kv", "kw"}, "controller");
  cfg.controller.kv = number_at(ctrl, "kv", "controller");
  cfg.controller.kw = number_at(ctrl, "kw", "controller");

  const json& exc = require(j, "excitation", "config");
  check_keys(exc, {"T", "T0", "c"}, "excitation");
  cfg.excitation_window = number_at(exc, "T", "excitation");
  cfg.excitation_period = number_at(exc, "T0", "excitation");
  const json& c = require(exc, "c", "excitation");
  const std::string ckind = string_at(c, "kind", "excitation.c");
  if (ckind == "constant") {
    check_keys(c, {"kind", "value"}, "excitation.c");
    cfg.c = ExcitationProfile::Constant{number_at(c, "value", "excitation.c")};
  } else if (ckind == "table") {
    check_keys(c, {"kind", "times", "values"}, "excitation.c");
    cfg.c = ExcitationProfile::Table{number_array(require(c, "times", "excitation.c"), "excitation.c.times"),
                                     number_array(require(c, "values", "excitation.c"), "excitation.c.values")};
  } else {
    throw ValidationError("excitation.c.kind: expected 'constant' or 'table', got '" + ckind + "'");
  }

  const json& integ = require(j, "integrator", "config");
  check_keys(integ, {"step", "t0", "tf"}, "integrator");
  cfg.integrator.step = optional_number(integ, "step", "integrator");
  cfg.integrator.t0 = optional_number(integ, "t0", "integrator").value_or(0.0);
  cfg.integrator.tf = number_at(integ, "tf", "integrator");

  const json& init = require(j, "init", "config");
  const std::string ikind = string_at(init, "kind", "init");
  if (ikind == "explicit") {
    check_keys(init, {"kind", "states"}, "init");
    cfg.init.kind = InitSpec::Kind::kExplicit;
    const json& states = require(init, "states", "init");
    if (!states.is_array()) throw ValidationError("init.states: expected an array");
    for (std::size_t k = 0; k < states.size(); ++k) {
      const std::string sw = "init.states[" + std::to_string(k) + "]";
      check_keys(states[k], {"x", "y", "theta"}, sw);
      cfg.init.states.push_back(
          {number_at(states[k], "x", sw), number_at(states[k], "y", sw), number_at(states[k], "theta", sw)});
    }
  } else if (ikind == "random") {
    check_keys(init, {"kind", "bound", "seed"}, "init");
    cfg.init.kind = InitSpec::Kind::kRandom;
    cfg.init.bound = optional_number(init, "bound", "init").value_or(10.0);
    if (init.contains("seed")) {
      if (!init["seed"].is_number_unsigned() && !(init["seed"].is_number_integer() && init["seed"].get<long long>() >= 0)) {
        throw ValidationError("init.seed: expected a nonnegative integer");
      }
      cfg.init.seed = init["seed"].get<std::uint64_t>();
    }
  } else {
    throw ValidationError("init.kind: expected 'explicit' or 'random', got '" + ikind + "'");
  }

  if (j.contains("gujc")) {
    const json& g = j["gujc"];
    check_keys(g, {"tau_a", "horizon"}, "gujc");
    cfg.gujc.tau_a = optional_number(g, "tau_a", "gujc");
    cfg.gujc.horizon = optional_number(g, "horizon", "gujc");
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw ValidationError("output: expected a string");
    cfg.output = j["output"].get<std::string>();
  }
  return cfg;
}

json config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["n"] = cfg.n;
  json graphs = json::object();
  for (const auto& [mode, edges] : cfg.graphs) {
    json list = json::array();
    for (const auto& e : edges) list.push_back({{"i", e.i + 1}, {"j", e.j + 1}, {"w", e.w}});
    graphs[std::to_string(mode)] = list;
  }
  j["graphs"] = graphs;

  if (cfg.schedule.kind == ScheduleSpec::Kind::kExplicit) {
    json events = json::array();
    for (const auto& e : cfg.schedule.events) events.push_back({{"t", e.t}, {"mode", e.mode}});
    j["schedule"] = {{"kind", "explicit"}, {"events", events}};
  } else {
    j["schedule"] = {{"kind", "section4d"}, {"t_prime", cfg.schedule.t_prime}};
    if (cfg.schedule.horizon) j["schedule"]["horizon"] = *cfg.schedule.horizon;
  }

  j["controller"] = {{"kv", cfg.controller.kv}, {"kw", cfg.controller.kw}};
  json c;
  if (const auto* k = std::get_if<ExcitationProfile::Constant>(&cfg.c)) {
    c = {{"kind", "constant"}, {"value", k->value}};
  } else {
    const auto& tab = std::get<ExcitationProfile::Table>(cfg.c);
    c = {{"kind", "table"}, {"times", tab.times}, {"values", tab.values}};
  }
  j["excitation"] = {{"T", cfg.excitation_window}, {"T0", cfg.excitation_period}, {"c", c}};

  j["integrator"] = {{"t0", cfg.integrator.t0}, {"tf", cfg.integrator.tf}};
  if (cfg.integrator.step) j["integrator"]["step"] = *cfg.integrator.step;

  if (cfg.init.kind == InitSpec::Kind::kExplicit) {
    json states = json::array();
    for (const auto& s : cfg.init.states) states.push_back({{"x", s.x}, {"y", s.y}, {"theta", s.theta}});
    j["init"] = {{"kind", "explicit"}, {"states", states}};
  } else {
    j["init"] = {{"kind", "random"}, {"bound", cfg.init.bound}, {"seed", cfg.init.seed}};
  }

  if (cfg.gujc.tau_a || cfg.gujc.horizon) {
    json g = json::object();
    if (cfg.gujc.tau_a) g["tau_a"] = *cfg.gujc.tau_a;
    if (cfg.gujc.horizon) g["horizon"] = *cfg.gujc.horizon;
    j["gujc"] = g;
  }
  if (cfg.output) j["output"] = *cfg.output;
  return j;
}

void validate_config(const ScenarioConfig& cfg, bool check_phase) {
  if (cfg.n < 2) throw ValidationError("n must be at least 2");
  if (cfg.graphs.empty()) throw ValidationError("graphs: at least one mode is required");
  for (const auto& [mode, edges] : cfg.graphs) {
    for (const auto& e : edges) {
      if (e.i < 0 || e.j < 0 || e.i >= cfg.n || e.j >= cfg.n) {
        throw ValidationError("graphs." + std::to_string(mode) + ": edge (" + std::to_string(e.i + 1) +
                              "," + std::to_string(e.j + 1) + ") outside 1.." + std::to_string(cfg.n));
      }
      if (e.i == e.j) throw ValidationError("graphs." + std::to_string(mode) + ": self-loop");
      if (!(e.w > 0.0) || !std::isfinite(e.w)) {
        throw ValidationError("graphs." + std::to_string(mode) + ": edge weights must be positive");
      }
    }
  }

  std::set<Mode> used;
  if (cfg.schedule.kind == ScheduleSpec::Kind::kExplicit) {
    if (cfg.schedule.events.empty()) throw ValidationError("schedule.events: must not be empty");
    for (std::size_t k = 0; k < cfg.schedule.events.size(); ++k) {
      if (k > 0 && !(cfg.schedule.events[k].t > cfg.schedule.events[k - 1].t)) {
        throw ValidationError("schedule.events: times must be strictly increasing");
      }
      used.insert(cfg.schedule.events[k].mode);
    }
    if (cfg.schedule.events.front().t > cfg.integrator.t0) {
      throw ValidationError("schedule.events: first event must not come after integrator.t0");
    }
  } else {
    if (!(cfg.schedule.t_prime > 0.0)) throw ValidationError("schedule.t_prime must be positive");
    if (cfg.schedule.horizon && *cfg.schedule.horizon < cfg.integrator.tf) {
      throw ValidationError("schedule.horizon is shorter than integrator.tf");
    }
    used = {1, 2, 3};
  }
  for (Mode m : used) {
    if (!cfg.graphs.count(m)) {
      throw ValidationError("schedule uses mode " + std::to_string(m) + " which has no graph");
    }
  }

  cfg.controller.validate();

  if (!(cfg.excitation_window > 0.0)) throw ValidationError("excitation.T must be positive");
  if (!(cfg.excitation_period > 2.0 * cfg.excitation_window)) {
    throw ValidationError("excitation: T0 must be strictly greater than 2T (T=" +
                          std::to_string(cfg.excitation_window) +
                          ", T0=" + std::to_string(cfg.excitation_period) + ")");
  }
  const ExcitationProfile prof(cfg.excitation_window, cfg.excitation_period, cfg.c);
  const PhaseCheck phase = check_phase_condition(prof);
  if (check_phase && !phase.ok) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "excitation: phase condition violated, integral of c over [0, T0/2 - T) = "
        << phase.integral << " is within 1e-6 of k*pi with nearest_k=" << phase.nearest_k;
    throw ValidationError(msg.str());
  }

  if (!(cfg.integrator.tf > cfg.integrator.t0)) throw ValidationError("integrator: need tf > t0");
  if (cfg.integrator.t0 < 0.0) throw ValidationError("integrator.t0 must be nonnegative");
  if (cfg.integrator.step && !(*cfg.integrator.step > 0.0)) {
    throw ValidationError("integrator.step must be positive");
  }

  if (cfg.init.kind == InitSpec::Kind::kExplicit) {
    if (static_cast<int>(cfg.init.states.size()) != cfg.n) {
      throw ValidationError("init.states has " + std::to_string(cfg.init.states.size()) +
                            " entries, expected n=" + std::to_string(cfg.n));
    }
  } else if (!(cfg.init.bound > 0.0) || !std::isfinite(cfg.init.bound)) {
    throw ValidationError("init.bound must be positive");
  }

  if (cfg.gujc.tau_a && !(*cfg.gujc.tau_a > 0.0 && *cfg.gujc.tau_a <= cfg.excitation_window)) {
    throw ValidationError("gujc.tau_a must lie in (0, T]");
  }
  if (cfg.gujc.horizon && !(*cfg.gujc.horizon > cfg.excitation_window)) {
    throw ValidationError("gujc.horizon must exceed T");
  }
}

ScenarioConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: JSON syntax error: ") + e.what());
  }
  ScenarioConfig cfg;
  try {
    cfg = config_from_json(j);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const ScenarioConfig& cfg) { return config_to_json(cfg).dump(2) + "\n"; }

ScenarioConfig default_scenario_config(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.n = 4;
  cfg.graphs = {{1, {{0, 1, 1.0}}}, {2, {{1, 2, 1.0}}}, {3, {{2, 3, 1.0}}}};
  cfg.schedule.kind = ScheduleSpec::Kind::kSection4d;
  cfg.schedule.t_prime = std::numbers::pi;
  cfg.controller = {1.0, 1.0};
  cfg.excitation_window = std::numbers::pi;
  cfg.excitation_period = 3.0 * std::numbers::pi;
  cfg.c = ExcitationProfile::Constant{5.0};
  cfg.integrator.step = 1e-3;
  cfg.integrator.t0 = 0.0;
  cfg.integrator.tf = 150.0;
  cfg.init.kind = InitSpec::Kind::kRandom;
  cfg.init.bound = 10.0;
  cfg.init.seed = seed;
  cfg.gujc.tau_a = std::numbers::pi / 6.0;
  return cfg;
}

}  // namespace swsim
