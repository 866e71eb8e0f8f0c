#include "swsim/switching.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <shared_mutex>
#include <string>

#include "swsim/errors.hpp"

namespace swsim {
namespace {

constexpr std::size_t kMaxEpsilonModes = 16;
constexpr double kInf = std::numeric_limits<double>::infinity();

double occupancy_slack(double t2) { return 1e-12 * std::max(1.0, std::abs(t2)); }

}  // namespace

struct SwitchSchedule::Impl {
  Kind kind = Kind::kConstant;
  double t0 = 0.0;
  double horizon = kInf;
  double t_prime = 0.0;

  mutable std::shared_mutex mu;
  // Append-only. Events with time < covered_until are complete.
  mutable std::vector<SwitchEvent> events;
  mutable double covered_until = kInf;
  mutable long next_period = 0;

  // Event times are (T' * N) / D with integers N, D so that e.g. T'/3 and
  // 2T'/3 come out bit-identical to the obvious caller expressions.
  void generate_period(long k) const {
    const double d = 3.0 * static_cast<double>(k + 1);
    const long base = 3 * k * (k + 1);
    for (long l = 0; l <= k; ++l) {
      for (int m = 0; m < 3; ++m) {
        const double num = static_cast<double>(base + 3 * l + m);
        events.push_back({(t_prime * num) / d, m + 1});
      }
    }
    const long next_base = 3 * (k + 1) * (k + 2);
    covered_until = (t_prime * static_cast<double>(next_base)) / (3.0 * static_cast<double>(k + 2));
  }

  // Ensures every event with time <= t is cached.
  void ensure(double t) const {
    {
      std::shared_lock lock(mu);
      if (t < covered_until) return;
    }
    std::unique_lock lock(mu);
    while (t >= covered_until) {
      if (covered_until > horizon) break;
      generate_period(next_period++);
    }
  }
};

SwitchSchedule::SwitchSchedule(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}

SwitchSchedule SwitchSchedule::constant(Mode mode, double t0) {
  return from_events({{t0, mode}});
}

SwitchSchedule SwitchSchedule::from_events(std::vector<SwitchEvent> events) {
  if (events.empty()) throw ValidationError("schedule needs at least one event");
  auto impl = std::make_shared<Impl>();
  impl->t0 = events.front().t;
  if (!std::isfinite(impl->t0) || impl->t0 < 0.0) {
    throw ValidationError("schedule start time must be finite and nonnegative");
  }
  for (std::size_t k = 1; k < events.size(); ++k) {
    if (!std::isfinite(events[k].t) || !(events[k].t > events[k - 1].t)) {
      throw ValidationError("schedule event times must be finite and strictly increasing (event " +
                            std::to_string(k) + ")");
    }
  }
  std::vector<SwitchEvent> kept;
  kept.reserve(events.size());
  for (const auto& e : events) {
    if (kept.empty() || kept.back().mode != e.mode) kept.push_back(e);
  }
  impl->kind = kept.size() == 1 ? Kind::kConstant : Kind::kExplicit;
  impl->events = std::move(kept);
  return SwitchSchedule(std::move(impl));
}

SwitchSchedule SwitchSchedule::section4d(double t_prime, double horizon) {
  if (!std::isfinite(t_prime) || t_prime <= 0.0) {
    throw ValidationError("section4d schedule: t_prime must be positive");
  }
  if (!(horizon > 0.0)) throw ValidationError("section4d schedule: horizon must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::kSection4d;
  impl->t0 = 0.0;
  impl->t_prime = t_prime;
  impl->horizon = horizon;
  impl->covered_until = 0.0;
  return SwitchSchedule(std::move(impl));
}

SwitchSchedule::Kind SwitchSchedule::kind() const { return impl_->kind; }
double SwitchSchedule::t0() const { return impl_->t0; }
double SwitchSchedule::horizon() const { return impl_->horizon; }
double SwitchSchedule::t_prime() const { return impl_->t_prime; }

Mode SwitchSchedule::mode_at(double t) const {
  if (!(t >= impl_->t0)) {
    throw ValidationError("mode_at: t=" + std::to_string(t) + " precedes schedule start " +
                          std::to_string(impl_->t0));
  }
  if (t > impl_->horizon) {
    throw RuntimeFailure("mode_at: t=" + std::to_string(t) + " beyond schedule horizon " +
                         std::to_string(impl_->horizon));
  }
  impl_->ensure(t);
  std::shared_lock lock(impl_->mu);
  const auto& ev = impl_->events;
  auto it = std::upper_bound(ev.begin(), ev.end(), t,
                             [](double v, const SwitchEvent& e) { return v < e.t; });
  return std::prev(it)->mode;
}

std::vector<SwitchEvent> SwitchSchedule::switches_between(double a, double b) const {
  std::vector<SwitchEvent> out;
  if (!(b > a)) return out;
  impl_->ensure(std::min(b, impl_->horizon));
  std::shared_lock lock(impl_->mu);
  const auto& ev = impl_->events;
  auto it = std::upper_bound(ev.begin(), ev.end(), a,
                             [](double v, const SwitchEvent& e) { return v < e.t; });
  for (; it != ev.end() && it->t < b; ++it) {
    if (it != ev.begin()) out.push_back(*it);
  }
  return out;
}

double SwitchSchedule::next_switch_after(double t) const {
  if (impl_->kind == Kind::kSection4d) {
    // The next period always contains a switch.
    const double probe = std::min(impl_->horizon, t + 2.0 * impl_->t_prime);
    impl_->ensure(probe);
  }
  std::shared_lock lock(impl_->mu);
  const auto& ev = impl_->events;
  auto it = std::upper_bound(ev.begin(), ev.end(), t,
                             [](double v, const SwitchEvent& e) { return v < e.t; });
  if (it == ev.end() || it->t > impl_->horizon) return kInf;
  return it->t;
}

std::vector<SwitchEvent> SwitchSchedule::events_until(double until) const {
  if (impl_->kind == Kind::kSection4d) {
    if (!std::isfinite(until)) {
      throw ValidationError("events_until: unbounded request on a generated schedule");
    }
    impl_->ensure(std::min(until, impl_->horizon));
  }
  std::shared_lock lock(impl_->mu);
  std::vector<SwitchEvent> out;
  for (const auto& e : impl_->events) {
    if (e.t > until || e.t > impl_->horizon) break;
    out.push_back(e);
  }
  return out;
}

void JointGraphParams::validate() const {
  if (!(tau_a > 0.0)) throw ValidationError("tau_a must be positive");
  if (!(window >= tau_a)) throw ValidationError("window T must be >= tau_a");
}

std::map<Mode, double> occupancies(const SwitchSchedule& sched, double t1, double t2) {
  if (!(t1 >= sched.t0()) || !(t2 >= t1)) {
    throw ValidationError("occupancy: need t0 <= t1 <= t2, got [" + std::to_string(t1) + ", " +
                          std::to_string(t2) + ")");
  }
  std::map<Mode, double> occ;
  if (t2 == t1) return occ;
  double start = t1;
  Mode current = sched.mode_at(t1);
  for (const auto& sw : sched.switches_between(t1, t2)) {
    occ[current] += sw.t - start;
    start = sw.t;
    current = sw.mode;
  }
  occ[current] += t2 - start;
  return occ;
}

double occupancy(const SwitchSchedule& sched, Mode mode, double t1, double t2) {
  const auto occ = occupancies(sched, t1, t2);
  auto it = occ.find(mode);
  return it == occ.end() ? 0.0 : it->second;
}

std::vector<Mode> qualifying_modes(const SwitchSchedule& sched, double tau_a, double t1, double t2) {
  std::vector<Mode> out;
  const double slack = occupancy_slack(t2);
  for (const auto& [mode, time] : occupancies(sched, t1, t2)) {
    if (time >= tau_a - slack) out.push_back(mode);
  }
  return out;
}

WeightedGraph joint_graph(const SwitchSchedule& sched, const GraphFamily& family, double tau_a,
                          double t1, double t2) {
  if (!(t2 > t1)) throw ValidationError("joint_graph: need t2 > t1");
  Matrix sum = Matrix::Zero(family.size(), family.size());
  for (Mode m : qualifying_modes(sched, tau_a, t1, t2)) sum += family.at(m).weights();
  return WeightedGraph(std::move(sum));
}

GujcReport check_gujc(const SwitchSchedule& sched, const GraphFamily& family,
                      const JointGraphParams& params, double horizon) {
  params.validate();
  if (!(horizon > params.window)) throw ValidationError("check_gujc: horizon must exceed T");
  const double first = sched.t0();
  const double last = sched.t0() + horizon - params.window;

  std::vector<double> kinks{first, last};
  for (const auto& sw : sched.switches_between(first, last + params.window)) {
    if (sw.t <= last) kinks.push_back(sw.t);
    const double shifted = sw.t - params.window;
    if (shifted >= first && shifted <= last) kinks.push_back(shifted);
  }
  std::sort(kinks.begin(), kinks.end());
  kinks.erase(std::unique(kinks.begin(), kinks.end()), kinks.end());

  std::vector<double> grid;
  grid.reserve(2 * kinks.size());
  for (std::size_t k = 0; k < kinks.size(); ++k) {
    grid.push_back(kinks[k]);
    if (k + 1 < kinks.size()) grid.push_back(0.5 * (kinks[k] + kinks[k + 1]));
  }

  GujcReport report;
  report.tau_a = params.tau_a;
  report.window = params.window;
  report.t_begin = first;
  report.t_end = last;
  report.grid_points = grid.size();
  report.holds = true;
  for (double t : grid) {
    if (!is_connected(joint_graph(sched, family, params.tau_a, t, t + params.window))) {
      report.holds = false;
      report.witness_t = t;
      break;
    }
  }
  return report;
}

EpsilonBound epsilon_bound(const GraphFamily& family, double tau_a) {
  if (!(tau_a > 0.0)) throw ValidationError("epsilon_bound: tau_a must be positive");
  const auto modes = family.modes();
  if (modes.size() > kMaxEpsilonModes) {
    throw ValidationError("epsilon_bound: " + std::to_string(modes.size()) +
                          " modes exceeds the brute-force limit of 16");
  }
  EpsilonBound best;
  best.epsilon_prime = kInf;
  const unsigned long subsets = 1ul << modes.size();
  std::vector<Mode> subset;
  for (unsigned long mask = 1; mask < subsets; ++mask) {
    subset.clear();
    Matrix weights = Matrix::Zero(family.size(), family.size());
    for (std::size_t k = 0; k < modes.size(); ++k) {
      if (mask & (1ul << k)) {
        subset.push_back(modes[k]);
        weights += family.at(modes[k]).weights();
      }
    }
    if (!is_connected(WeightedGraph(std::move(weights)))) continue;
    ++best.connected_subsets;
    const double sigma = sigma_min_positive(union_laplacian(family, subset));
    if (sigma < best.epsilon_prime) {
      best.epsilon_prime = sigma;
      best.argmin = subset;
    }
  }
  if (best.connected_subsets == 0) {
    throw ValidationError("epsilon_bound: no subset of modes has a connected union");
  }
  best.epsilon = tau_a * best.epsilon_prime;
  return best;
}

double minimum_switch_gap(const SwitchSchedule& sched, double a, double b) {
  const auto sw = sched.switches_between(a, b);
  double gap = kInf;
  for (std::size_t k = 1; k < sw.size(); ++k) gap = std::min(gap, sw[k].t - sw[k - 1].t);
  return gap;
}

}  // namespace swsim
