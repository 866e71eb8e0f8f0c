#pragma once

#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "swsim/graph.hpp"

namespace swsim {

struct SwitchEvent {
  double t = 0.0;
  Mode mode = 0;

  friend bool operator==(const SwitchEvent&, const SwitchEvent&) = default;
};

// Piecewise-constant, right-continuous mode signal on [t0, horizon].
//
// The first event fixes t0 and the initial mode; every later event is a
// switch instant s_k at which the signal takes a new value. Intervals are
// half-open [s_k, s_{k+1}). Copies share one immutable definition and one
// append-only event cache, so a schedule may be queried from several threads.
class SwitchSchedule {
 public:
  enum class Kind { kConstant, kExplicit, kSection4d };

  static SwitchSchedule constant(Mode mode, double t0 = 0.0);

  // Events must have strictly increasing times. Events repeating the current
  // mode are dropped. The last mode holds forever.
  static SwitchSchedule from_events(std::vector<SwitchEvent> events);

  // Dwell-time-free signal: period k in [kT', (k+1)T') is cut into k+1 equal
  // blocks, each split in thirds with modes 1, 2, 3. Events are generated
  // on demand up to `horizon`.
  static SwitchSchedule section4d(double t_prime,
                                  double horizon = std::numeric_limits<double>::infinity());

  Kind kind() const;
  double t0() const;
  double horizon() const;
  // Only meaningful for kSection4d.
  double t_prime() const;

  // lambda(t); throws ValidationError for t < t0 and RuntimeFailure beyond horizon.
  Mode mode_at(double t) const;

  // Switch instants s with a < s < b, with the mode taking effect at s.
  std::vector<SwitchEvent> switches_between(double a, double b) const;

  // Smallest switch instant strictly greater than t, or +inf.
  double next_switch_after(double t) const;

  // Initial event plus all switch instants in (t0, until]. For explicit
  // schedules `until` may be +inf.
  std::vector<SwitchEvent> events_until(double until) const;

 private:
  struct Impl;
  explicit SwitchSchedule(std::shared_ptr<Impl> impl);
  std::shared_ptr<Impl> impl_;
};

inline SwitchSchedule section4d_signal(double t_prime) { return SwitchSchedule::section4d(t_prime); }

struct JointGraphParams {
  double tau_a = 0.0;
  double window = 0.0;  // T

  // Throws ValidationError unless window >= tau_a > 0.
  void validate() const;
};

// Value of the mode signal at t (right-continuous).
inline Mode mode_at(const SwitchSchedule& sched, double t) { return sched.mode_at(t); }

// Time spent in `mode` over [t1, t2), summed over switch-delimited sub-intervals.
double occupancy(const SwitchSchedule& sched, Mode mode, double t1, double t2);

// Occupancy of every mode visited on [t1, t2).
std::map<Mode, double> occupancies(const SwitchSchedule& sched, double t1, double t2);

// Modes whose occupancy on [t1, t2) reaches tau_a. A relative slack of
// 1e-12 * max(1, |t2|) absorbs rounding in switch instants.
std::vector<Mode> qualifying_modes(const SwitchSchedule& sched, double tau_a, double t1, double t2);

// Edge union (weights summed) of the graphs of qualifying modes.
WeightedGraph joint_graph(const SwitchSchedule& sched, const GraphFamily& family, double tau_a,
                          double t1, double t2);

struct GujcReport {
  bool holds = false;
  std::optional<double> witness_t;  // first window start whose joint graph is disconnected
  double tau_a = 0.0;
  double window = 0.0;
  double t_begin = 0.0;  // verdict covers window starts in [t_begin, t_end]
  double t_end = 0.0;
  std::size_t grid_points = 0;
};

// Checks connectivity of joint_graph over [t, t + T) for window starts t in
// [t0, t0 + horizon - T]. The test grid holds t0, the last start, every switch
// instant s, every s - T and the midpoints between consecutive grid points;
// occupancy is piecewise linear in t with kinks only at those points.
GujcReport check_gujc(const SwitchSchedule& sched, const GraphFamily& family,
                      const JointGraphParams& params, double horizon);

struct EpsilonBound {
  double epsilon = 0.0;        // tau_a * epsilon_prime
  double epsilon_prime = 0.0;  // min sigma_min over connected unions
  std::vector<Mode> argmin;    // subset attaining epsilon_prime
  std::size_t connected_subsets = 0;
};

// Brute force over all nonempty mode subsets whose union is connected.
// Refuses families with more than 16 modes.
EpsilonBound epsilon_bound(const GraphFamily& family, double tau_a);

// Smallest gap between consecutive switch instants inside [a, b], or +inf.
double minimum_switch_gap(const SwitchSchedule& sched, double a, double b);

}  // namespace swsim
